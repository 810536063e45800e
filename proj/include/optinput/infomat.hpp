#ifndef OPTINPUT_INFOMAT_HPP
#define OPTINPUT_INFOMAT_HPP

#include <Eigen/Core>
#include <vector>

#include "optinput/smc.hpp"
#include "optinput/stationary_graph.hpp"

namespace optinput {

/// Fisher information estimate from M score samples:
///   I_hat = 1/(M-1) * sum_m s_m s_m^T
/// (uncentered; positive semidefinite by construction).  Throws when fewer
/// than two samples are given.
Matrix estimate_fim(const std::vector<Vector>& scores);

/// Same estimator over the columns of a d x M score matrix.
Matrix estimate_fim(const Matrix& score_columns);

/// Simulate M independent trajectories under a basis input signal of horizon
/// T, estimate one score per trajectory, and form the information matrix.
/// A replication that collapses is retried once with a derived seed, then the
/// failure propagates.  Deterministic given seed, independent of `threads`.
/// If score_mean is non-null it receives the sample mean of the scores
/// (a bias diagnostic; the score has zero mean at the true parameters).
Matrix fim_for_basis(const ModelSpec& model, const ParamVector& theta,
                     const BasisInput& basis, Eigen::Index horizon, int num_scores,
                     const SmootherConfig& config, std::uint64_t seed,
                     int threads = 1, Vector* score_mean = nullptr);

/// Convex combination sum_j gamma_j F_j.  Throws if gamma is off the simplex
/// (tolerance 1e-10) or lengths mismatch.
Matrix mix_fim(const Vector& gamma, const std::vector<Matrix>& fims);

/// Symmetry defect max |A - A^T|.
double symmetry_gap(const Matrix& m);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& m);

/// Positive semidefinite up to tolerance on the smallest eigenvalue.
bool is_psd(const Matrix& m, double tol = 1e-10);

}  // namespace optinput

#endif  // OPTINPUT_INFOMAT_HPP
