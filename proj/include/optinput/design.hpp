#ifndef OPTINPUT_DESIGN_HPP
#define OPTINPUT_DESIGN_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "optinput/infomat.hpp"

namespace optinput {

/// Design criterion: D_OPT maximizes log det of the mixed information
/// matrix, A_OPT maximizes -tr of its inverse.  Both are matrix-nondecreasing.
enum class Criterion { kDOpt, kAOpt };

Criterion parse_criterion(const std::string& name);  // "det" | "trinv"
std::string criterion_name(Criterion crit);

struct SolverOptions {
  int max_iterations = 10000;
  double gap_tolerance = 1e-8;
};

/// Criterion value of a simplex-weighted mixture; -inf when the mixture is
/// singular (no ridge applied here).
double design_objective(const std::vector<Matrix>& fims, const Vector& gamma,
                        Criterion crit);

struct SolveInfo {
  Vector gamma;
  double objective = 0.0;  // unridged objective at gamma
  double gap = 0.0;        // final Frank-Wolfe duality gap
  int iterations = 0;
};

/// Maximize the criterion over the simplex by Frank-Wolfe with exact
/// line search (bisection on the analytic directional derivative), uniform
/// initialization.  Numerically singular mixtures met during the search are
/// evaluated with a ridge of 1e-12 * (trace/d) * I; the reported objective is
/// unridged.  Throws when an input matrix is not symmetric PSD or when every
/// mixture on the simplex is singular (criterion infeasible).
SolveInfo solve_design_full(const std::vector<Matrix>& fims, Criterion crit,
                            const SolverOptions& opts = {});

Vector solve_design(const std::vector<Matrix>& fims, Criterion crit,
                    const SolverOptions& opts = {});

/// Output of the Monte Carlo design loop.
struct DesignResult {
  Vector gamma_star;                    // sample mean over iterations
  Matrix gamma_samples;                 // K x n_bases, row k = gamma_k
  std::optional<Vector> ci_halfwidth;   // 95% normal-approx, absent for K=1
  Vector objective_trace;               // solver objective per iteration
};

/// Monte Carlo design: K iterations of (fresh information-matrix estimates
/// per basis, simplex solve), averaged.  A single estimate would ignore the
/// stochastic nature of the information matrices; averaging the per-iteration
/// optima accounts for it.  Deterministic given seed, independent of threads.
DesignResult run_mc_design(const ModelSpec& model, const ParamVector& theta,
                           const std::vector<BasisInput>& bases, Criterion crit,
                           int iterations, int num_scores, Eigen::Index horizon,
                           const SmootherConfig& config, std::uint64_t seed,
                           int threads = 1, const SolverOptions& opts = {});

}  // namespace optinput

#endif  // OPTINPUT_DESIGN_HPP
