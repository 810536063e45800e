#ifndef OPTINPUT_MODEL_HPP
#define OPTINPUT_MODEL_HPP

#include <Eigen/Core>
#include <functional>
#include <stdexcept>
#include <string>

#include "optinput/rng.hpp"

namespace optinput {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Model parameters theta (length d >= 1, finite entries).
using ParamVector = Eigen::VectorXd;

/// Proposal kernel R_t(x_next | x_prev, u) used to propagate particles.  Its
/// support must cover the support of the transition density so importance
/// weights stay finite.
struct ProposalSpec {
  std::function<double(double x_prev, double x_next, double u,
                       const ParamVector& theta)>
      logpdf;
  std::function<double(double x_prev, double u, const ParamVector& theta,
                       Rng& rng)>
      sampler;
};

/// Scalar state-space model
///   x_t ~ f_theta(x_t | x_{t-1}, u),   y_t ~ g_theta(y_t | x_t, u),
/// with a known initial state, log-density gradients w.r.t. theta, forward
/// samplers, and a proposal kernel.  Gradient callbacks write into an
/// out-vector of length dim_theta.  All callbacks are pure given their
/// arguments (plus the rng for samplers), so a ModelSpec can be shared
/// read-only across threads.
struct ModelSpec {
  int dim_theta = 0;
  double initial_state = 0.0;

  std::function<double(double x_prev, double x_next, double u,
                       const ParamVector& theta)>
      transition_logpdf;
  std::function<double(double x, double y, double u, const ParamVector& theta)>
      observation_logpdf;
  std::function<void(double x_prev, double x_next, double u,
                     const ParamVector& theta, Eigen::Ref<Vector> grad)>
      transition_grad;
  std::function<void(double x, double y, double u, const ParamVector& theta,
                     Eigen::Ref<Vector> grad)>
      observation_grad;
  std::function<double(double x_prev, double u, const ParamVector& theta,
                       Rng& rng)>
      transition_sampler;
  std::function<double(double x, double u, const ParamVector& theta, Rng& rng)>
      observation_sampler;

  ProposalSpec proposal;
};

/// Build the bootstrap proposal R = f from a model's transition callbacks.
/// Sharing the same callables makes the weight ratio f/R cancel exactly.
inline ProposalSpec make_bootstrap_proposal(const ModelSpec& model) {
  return ProposalSpec{model.transition_logpdf, model.transition_sampler};
}

/// One simulated run: inputs[k] drives the transition into states[k] and is
/// passed to the observation of states[k], starting from the known initial
/// state.  All three sequences share the same length T.
struct Trajectory {
  Vector inputs;
  Vector states;
  Vector observations;

  Eigen::Index length() const { return inputs.size(); }
};

/// Forward-sample a trajectory of length |inputs|.  Deterministic given seed.
/// Throws std::runtime_error if a sampled state or observation is non-finite
/// (model divergence).
Trajectory simulate(const ModelSpec& model, const ParamVector& theta,
                    const Vector& inputs, std::uint64_t seed);

/// Linear Gaussian state-space model
///   x_t = theta1 x_{t-1} + u + v,  v ~ N(0, theta2^2)
///   y_t = x_t + e,                 e ~ N(0, 0.1^2)
/// with analytic gradients and bootstrap proposal.  theta = (theta1, theta2).
ModelSpec builtin_lgss();

/// Nonlinear benchmark model
///   x_t = theta1 x_{t-1} + x_{t-1} / (theta2 + x_{t-1}^2) + u + v,
///        v ~ N(0, 0.1^2)
///   y_t = x_t / 2 + 2 x_t^2 / 5 + e,  e ~ N(0, 0.1^2)
/// with analytic gradients and bootstrap proposal.
ModelSpec builtin_nonlinear();

/// Kalman filter pass over an LGSS trajectory: filtered means/variances and
/// the exact log-likelihood of the observations given the inputs.
struct KalmanResult {
  Vector filtered_mean;
  Vector filtered_var;
  double loglik = 0.0;
};

KalmanResult lgss_kalman_filter(const ParamVector& theta, const Trajectory& traj);

/// Exact log-likelihood of y given u under the LGSS model (prediction-error
/// decomposition).
double lgss_loglik(const ParamVector& theta, const Trajectory& traj);

/// Exact score (gradient of lgss_loglik w.r.t. theta) via sensitivity
/// recursions through the Kalman filter.  Throws on a non-positive innovation
/// variance.  T = 0 gives the zero vector.
Vector lgss_exact_score(const ParamVector& theta, const Trajectory& traj);

}  // namespace optinput

#endif  // OPTINPUT_MODEL_HPP
