#ifndef OPTINPUT_SMC_HPP
#define OPTINPUT_SMC_HPP

#include <Eigen/Core>
#include <functional>
#include <stdexcept>

#include "optinput/model.hpp"

namespace optinput {

/// Auxiliary particle filter settings.
struct SmootherConfig {
  int num_particles = 1000;  // N >= 2
  int lag = 5;               // fixed-lag Delta >= 0
  /// Optional diagnostics sink; called once per step with the effective
  /// sample size of the normalized weights.
  std::function<void(int t, double ess)> on_ess;
};

/// Thrown when every particle weight underflows or turns non-finite at some
/// step; carries the 1-based step index.
struct ParticleCollapse : std::runtime_error {
  int step;
  explicit ParticleCollapse(int t)
      : std::runtime_error("particle collapse at step " + std::to_string(t)),
        step(t) {}
};

/// Weighted particle system over a length-T trajectory.  Column t-1 holds the
/// time-t particles x_t^(i), their normalized weights w_{t|t}^(i), the raw
/// unnormalised log-weights, and ancestor indices: ancestors(i, t-1) is the
/// index at time t-1 of the particle that x_t^(i) was propagated from.
struct ParticleSystem {
  Matrix particles;     // N x T
  Matrix weights;       // N x T, normalized per column
  Matrix log_weights;   // N x T, unnormalised
  Eigen::MatrixXi ancestors;  // N x T

  Eigen::Index num_particles() const { return particles.rows(); }
  Eigen::Index length() const { return particles.cols(); }
};

/// Run the auxiliary particle filter: per step, multinomial ancestor draws
/// proportional to the previous normalized weights, propagation through the
/// proposal kernel, and weighting by g * f / R (with the bootstrap proposal
/// the weight reduces to the observation density).  All particles start at
/// the model's known initial state.  Deterministic given seed.
ParticleSystem run_apf(const ModelSpec& model, const ParamVector& theta,
                       const Trajectory& traj, const SmootherConfig& config,
                       std::uint64_t seed);

/// Fixed-lag ancestor recovery: for each particle i alive at
/// kappa_t = min(t + lag, T), the index of its time-t ancestor, obtained by
/// backward tracing of the ancestor arrays.  t is 1-based in [1, T].
Eigen::VectorXi fl_ancestors(const ParticleSystem& ps, int t, int lag, int T);

/// Score estimate: sum over t of the kappa_t-weighted observation- and
/// transition-gradient terms over fixed-lag traced ancestors, combined with
/// Fisher's identity.  Deterministic given seed; propagates ParticleCollapse.
Vector estimate_score(const ModelSpec& model, const ParamVector& theta,
                      const Trajectory& traj, const SmootherConfig& config,
                      std::uint64_t seed);

}  // namespace optinput

#endif  // OPTINPUT_SMC_HPP
