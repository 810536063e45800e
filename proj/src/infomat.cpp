#include "optinput/infomat.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "optinput/parallel.hpp"
#include "optinput/rng.hpp"

namespace optinput {

Matrix estimate_fim(const Matrix& score_columns) {
  const Eigen::Index m = score_columns.cols();
  if (m < 2)
    throw std::invalid_argument("estimate_fim: need at least two score samples");
  Matrix fim = score_columns * score_columns.transpose() / static_cast<double>(m - 1);
  return fim;
}

Matrix estimate_fim(const std::vector<Vector>& scores) {
  if (scores.size() < 2)
    throw std::invalid_argument("estimate_fim: need at least two score samples");
  const Eigen::Index d = scores[0].size();
  Matrix cols(d, static_cast<Eigen::Index>(scores.size()));
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].size() != d)
      throw std::invalid_argument("estimate_fim: inconsistent score dimensions");
    cols.col(static_cast<Eigen::Index>(i)) = scores[i];
  }
  return estimate_fim(cols);
}

Matrix fim_for_basis(const ModelSpec& model, const ParamVector& theta,
                     const BasisInput& basis, Eigen::Index horizon, int num_scores,
                     const SmootherConfig& config, std::uint64_t seed,
                     int threads, Vector* score_mean) {
  if (num_scores < 2)
    throw std::invalid_argument("fim_for_basis: need at least two replications");
  const Vector inputs = basis.signal(horizon);

  Matrix cols(model.dim_theta, num_scores);
  parallel_for(num_scores, threads, [&](int m) {
    // Fresh process and measurement noise per replication; one retry on
    // particle collapse with a derived seed.
    for (int attempt = 0; attempt < 2; ++attempt) {
      const std::uint64_t s = derive_seed(
          seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(attempt)});
      try {
        const Trajectory traj =
            simulate(model, theta, inputs, derive_seed(s, {0}));
        cols.col(m) = estimate_score(model, theta, traj, config, derive_seed(s, {1}));
        return;
      } catch (const ParticleCollapse&) {
        if (attempt == 1) throw;
      }
    }
  });

  if (score_mean) *score_mean = cols.rowwise().mean();
  return estimate_fim(cols);
}

Matrix mix_fim(const Vector& gamma, const std::vector<Matrix>& fims) {
  if (fims.empty()) throw std::invalid_argument("mix_fim: no matrices");
  if (gamma.size() != static_cast<Eigen::Index>(fims.size()))
    throw std::invalid_argument("mix_fim: weight/matrix count mismatch");
  if (gamma.minCoeff() < -1e-12 || std::abs(gamma.sum() - 1.0) > 1e-10)
    throw std::invalid_argument("mix_fim: weights are not on the simplex");

  Matrix out = Matrix::Zero(fims[0].rows(), fims[0].cols());
  for (size_t j = 0; j < fims.size(); ++j)
    out += gamma[static_cast<Eigen::Index>(j)] * fims[j];
  return out;
}

double symmetry_gap(const Matrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_psd(const Matrix& m, double tol) { return min_eigenvalue(m) >= -tol; }

}  // namespace optinput
