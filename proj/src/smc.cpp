#include "optinput/smc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "optinput/rng.hpp"

namespace optinput {

namespace {

// Multinomial draw of n indices proportional to the (normalized) weights.
void multinomial_indices(const Eigen::Ref<const Vector>& weights, Rng& rng,
                         Eigen::Ref<Eigen::VectorXi> out) {
  const Eigen::Index n = weights.size();
  std::vector<double> cum(static_cast<size_t>(n));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += weights[i];
    cum[static_cast<size_t>(i)] = acc;
  }
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    Eigen::Index idx = it == cum.end() ? n - 1 : static_cast<Eigen::Index>(it - cum.begin());
    out[k] = static_cast<int>(idx);
  }
}

}  // namespace

ParticleSystem run_apf(const ModelSpec& model, const ParamVector& theta,
                       const Trajectory& traj, const SmootherConfig& config,
                       std::uint64_t seed) {
  const Eigen::Index T = traj.length();
  const int N = config.num_particles;
  if (T < 1) throw std::invalid_argument("run_apf: empty trajectory");
  if (N < 2) throw std::invalid_argument("run_apf: need at least two particles");

  ParticleSystem ps;
  ps.particles.resize(N, T);
  ps.weights.resize(N, T);
  ps.log_weights.resize(N, T);
  ps.ancestors.resize(N, T);

  Rng rng(seed);
  Vector prev_weights = Vector::Constant(N, 1.0 / N);
  Vector prev_states = Vector::Constant(N, model.initial_state);
  Eigen::VectorXi anc(N);
  Vector logw(N);

  for (Eigen::Index t = 0; t < T; ++t) {
    const double u = traj.inputs[t];
    const double y = traj.observations[t];
    multinomial_indices(prev_weights, rng, anc);
    for (int i = 0; i < N; ++i) {
      const double xp = prev_states[anc[i]];
      const double xn = model.proposal.sampler(xp, u, theta, rng);
      const double lg = model.observation_logpdf(xn, y, u, theta);
      const double lf = model.transition_logpdf(xp, xn, u, theta);
      const double lr = model.proposal.logpdf(xp, xn, u, theta);
      // Grouped so the bootstrap proposal cancels f exactly.
      logw[i] = lg + (lf - lr);
      ps.particles(i, t) = xn;
      ps.ancestors(i, t) = anc[i];
    }
    ps.log_weights.col(t) = logw;

    double max_lw = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i)
      if (std::isfinite(logw[i])) max_lw = std::max(max_lw, logw[i]);
    if (!std::isfinite(max_lw)) throw ParticleCollapse(static_cast<int>(t) + 1);

    Vector w(N);
    for (int i = 0; i < N; ++i)
      w[i] = std::isfinite(logw[i]) ? std::exp(logw[i] - max_lw) : 0.0;
    const double total = w.sum();
    if (!(total > 0.0) || !std::isfinite(total))
      throw ParticleCollapse(static_cast<int>(t) + 1);
    w /= total;
    ps.weights.col(t) = w;

    if (config.on_ess)
      config.on_ess(static_cast<int>(t) + 1, 1.0 / w.squaredNorm());

    prev_weights = w;
    prev_states = ps.particles.col(t);
  }
  return ps;
}

Eigen::VectorXi fl_ancestors(const ParticleSystem& ps, int t, int lag, int T) {
  if (t < 1 || t > T) throw std::invalid_argument("fl_ancestors: t out of range");
  const int kappa = std::min(t + lag, T);
  const Eigen::Index N = ps.num_particles();
  Eigen::VectorXi out(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    int idx = static_cast<int>(i);
    for (int s = kappa; s > t; --s) idx = ps.ancestors(idx, s - 1);
    out[i] = idx;
  }
  return out;
}

Vector estimate_score(const ModelSpec& model, const ParamVector& theta,
                      const Trajectory& traj, const SmootherConfig& config,
                      std::uint64_t seed) {
  const int T = static_cast<int>(traj.length());
  const ParticleSystem ps = run_apf(model, theta, traj, config, seed);
  const Eigen::Index N = ps.num_particles();

  Vector score = Vector::Zero(model.dim_theta);
  Vector grad(model.dim_theta);
  for (int t = 1; t <= T; ++t) {
    const int kappa = std::min(t + config.lag, T);
    const Eigen::VectorXi traced = fl_ancestors(ps, t, config.lag, T);
    const double u = traj.inputs[t - 1];
    const double y = traj.observations[t - 1];
    for (Eigen::Index i = 0; i < N; ++i) {
      const double w = ps.weights(i, kappa - 1);
      const int at = traced[i];
      const double xt = ps.particles(at, t - 1);
      model.observation_grad(xt, y, u, theta, grad);
      score += w * grad;
      const double xprev = t >= 2 ? ps.particles(ps.ancestors(at, t - 1), t - 2)
                                  : model.initial_state;
      model.transition_grad(xprev, xt, u, theta, grad);
      score += w * grad;
    }
  }
  return score;
}

}  // namespace optinput
