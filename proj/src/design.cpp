#include "optinput/design.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace optinput {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix mix(const std::vector<Matrix>& fims, const Vector& gamma) {
  Matrix s = Matrix::Zero(fims.front().rows(), fims.front().cols());
  for (Eigen::Index j = 0; j < gamma.size(); ++j) s += gamma[j] * fims[j];
  return s;
}

// Eigendecomposition of a mixture with the ridge policy applied: when the
// smallest eigenvalue does not clear 1e-12 * (trace/d), every eigenvalue is
// shifted by that amount (equivalent to adding the ridge to the matrix, the
// eigenvectors being unchanged).
struct Eigs {
  Vector lambda;        // possibly ridged, ascending
  Matrix vectors;
  bool ridged = false;
};

Eigs decompose(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("design: eigendecomposition failed");
  Eigs out{es.eigenvalues(), es.eigenvectors(), false};
  const double ridge = 1e-12 * s.trace() / static_cast<double>(s.rows());
  if (out.lambda.minCoeff() <= ridge) {
    out.lambda.array() += ridge;
    out.ridged = true;
  }
  return out;
}

bool positive(const Eigs& e) { return e.lambda.minCoeff() > 0.0; }

Matrix inverse_of(const Eigs& e) {
  return e.vectors * e.lambda.cwiseInverse().asDiagonal() *
         e.vectors.transpose();
}

double objective_of(const Eigs& e, Criterion crit) {
  if (!positive(e)) return -kInf;
  if (crit == Criterion::kDOpt) return e.lambda.array().log().sum();
  return -e.lambda.cwiseInverse().sum();
}

// Gradient of the criterion w.r.t. gamma: dF/dgamma_j = tr(S^-1 A_j) for
// D-opt, tr(S^-1 A_j S^-1) for A-opt (all matrices symmetric).
Vector gradient_of(const Eigs& e, const std::vector<Matrix>& fims,
                   Criterion crit) {
  const Matrix sinv = inverse_of(e);
  const Matrix weight = crit == Criterion::kDOpt ? sinv : Matrix(sinv * sinv);
  Vector grad(static_cast<Eigen::Index>(fims.size()));
  for (std::size_t j = 0; j < fims.size(); ++j)
    grad[static_cast<Eigen::Index>(j)] = weight.cwiseProduct(fims[j]).sum();
  return grad;
}

// Directional derivative d/dalpha F(S + alpha D) at the given mixture.
double directional(const Matrix& s, const Matrix& d, Criterion crit) {
  const Eigs e = decompose(s);
  const Matrix sinv = inverse_of(e);
  if (crit == Criterion::kDOpt) return sinv.cwiseProduct(d).sum();
  return (sinv * sinv).cwiseProduct(d).sum();
}

void check_inputs(const std::vector<Matrix>& fims) {
  if (fims.empty()) throw std::invalid_argument("design: no information matrices");
  const Eigen::Index dim = fims.front().rows();
  for (const Matrix& a : fims) {
    if (a.rows() != dim || a.cols() != dim)
      throw std::invalid_argument("design: inconsistent matrix dimensions");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (symmetry_gap(a) > 1e-9 * scale)
      throw std::invalid_argument("design: information matrix not symmetric");
    if (min_eigenvalue(a) < -1e-10 * scale)
      throw std::invalid_argument("design: information matrix not PSD");
  }
}

}  // namespace

Criterion parse_criterion(const std::string& name) {
  if (name == "det") return Criterion::kDOpt;
  if (name == "trinv") return Criterion::kAOpt;
  throw std::invalid_argument("unknown criterion '" + name +
                              "' (expected det or trinv)");
}

std::string criterion_name(Criterion crit) {
  return crit == Criterion::kDOpt ? "det" : "trinv";
}

double design_objective(const std::vector<Matrix>& fims, const Vector& gamma,
                        Criterion crit) {
  check_inputs(fims);
  if (gamma.size() != static_cast<Eigen::Index>(fims.size()))
    throw std::invalid_argument("design: weight/matrix count mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(mix(fims, gamma));
  const Vector& lambda = es.eigenvalues();
  if (lambda.minCoeff() <= 0.0) return -kInf;
  if (crit == Criterion::kDOpt) return lambda.array().log().sum();
  return -lambda.cwiseInverse().sum();
}

SolveInfo solve_design_full(const std::vector<Matrix>& fims, Criterion crit,
                            const SolverOptions& opts) {
  check_inputs(fims);
  const auto n = static_cast<Eigen::Index>(fims.size());

  // The uniform mixture is singular iff every mixture is (the kernels of PSD
  // summands only intersect); that makes the criterion infeasible.
  Vector gamma = Vector::Constant(n, 1.0 / static_cast<double>(n));
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(mix(fims, gamma));
    const double lo = es.eigenvalues().minCoeff();
    const double hi = std::max(es.eigenvalues().maxCoeff(), 0.0);
    if (lo <= 1e-12 * hi)
      throw std::runtime_error(
          "design: criterion infeasible, every mixture on the simplex is "
          "singular");
  }

  SolveInfo info;
  if (n == 1) {
    info.gamma = Vector::Ones(1);
    info.objective = design_objective(fims, info.gamma, crit);
    return info;
  }

  // Frank-Wolfe with away steps: plain Frank-Wolfe zigzags sublinearly when
  // the optimum sits on a face, which stalls short of the 1e-8 gap; the away
  // direction restores linear convergence.  The stopping rule is still the
  // standard Frank-Wolfe duality gap, which upper-bounds suboptimality.
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Matrix s = mix(fims, gamma);
    const Eigs e = decompose(s);
    const Vector grad = gradient_of(e, fims, crit);

    Eigen::Index toward = 0;
    grad.maxCoeff(&toward);  // ties resolved to the lowest index
    const double gap = grad[toward] - grad.dot(gamma);
    info.gap = gap;
    info.iterations = it;
    if (gap <= opts.gap_tolerance) break;

    Eigen::Index away = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (gamma[j] > 0.0 && (away < 0 || grad[j] < grad[away])) away = j;
    const double away_gain = grad.dot(gamma) - grad[away];

    Matrix dir;          // matrix-space direction of the gamma move
    double alpha_max;
    const bool fw_step = gap >= away_gain;
    if (fw_step) {
      dir = fims[toward] - s;
      alpha_max = 1.0;
    } else {
      dir = s - fims[away];
      alpha_max = gamma[away] / (1.0 - gamma[away]);
    }

    // Exact line search on [0, alpha_max]: the ascent profile is concave, so
    // bisect its decreasing derivative.
    double alpha = alpha_max;
    if (directional(s + alpha_max * dir, dir, crit) < 0.0) {
      double lo = 0.0, hi = alpha_max;
      for (int b = 0; b < 80 && hi - lo > 1e-16 * alpha_max; ++b) {
        const double mid = 0.5 * (lo + hi);
        (directional(s + mid * dir, dir, crit) > 0.0 ? lo : hi) = mid;
      }
      alpha = 0.5 * (lo + hi);
    }

    if (fw_step) {
      gamma *= 1.0 - alpha;
      gamma[toward] += alpha;
    } else {
      gamma *= 1.0 + alpha;
      gamma[away] -= alpha;
      if (alpha == alpha_max) gamma[away] = 0.0;  // clean drop step
    }
    gamma = gamma.cwiseMax(0.0);
    gamma /= gamma.sum();
  }

  info.gamma = gamma;
  info.objective = design_objective(fims, gamma, crit);
  return info;
}

Vector solve_design(const std::vector<Matrix>& fims, Criterion crit,
                    const SolverOptions& opts) {
  return solve_design_full(fims, crit, opts).gamma;
}

DesignResult run_mc_design(const ModelSpec& model, const ParamVector& theta,
                           const std::vector<BasisInput>& bases, Criterion crit,
                           int iterations, int num_scores,
                           Eigen::Index horizon, const SmootherConfig& config,
                           std::uint64_t seed, int threads,
                           const SolverOptions& opts) {
  if (iterations < 1)
    throw std::invalid_argument("run_mc_design: iterations must be >= 1");
  if (bases.empty())
    throw std::invalid_argument("run_mc_design: no basis inputs");
  const auto n = static_cast<Eigen::Index>(bases.size());

  DesignResult result;
  result.gamma_samples.resize(iterations, n);
  result.objective_trace.resize(iterations);

  std::vector<Matrix> fims(bases.size());
  for (int k = 0; k < iterations; ++k) {
    for (std::size_t j = 0; j < bases.size(); ++j) {
      const std::uint64_t s = derive_seed(
          seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(j)});
      fims[j] = fim_for_basis(model, theta, bases[j], horizon, num_scores,
                              config, s, threads);
    }
    const SolveInfo info = solve_design_full(fims, crit, opts);
    result.gamma_samples.row(k) = info.gamma.transpose();
    result.objective_trace[k] = info.objective;
  }

  result.gamma_star = result.gamma_samples.colwise().mean().transpose();
  if (iterations > 1) {
    const auto k = static_cast<double>(iterations);
    Matrix centered =
        result.gamma_samples.rowwise() - result.gamma_star.transpose();
    Vector sd =
        (centered.array().square().colwise().sum() / (k - 1.0)).sqrt();
    result.ci_halfwidth = 1.96 * sd / std::sqrt(k);
  }
  return result;
}

}  // namespace optinput
