#include "optinput/model.hpp"

#include <cmath>

namespace optinput {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double gaussian_logpdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * (kLog2Pi + z * z) - std::log(sd);
}

}  // namespace

Trajectory simulate(const ModelSpec& model, const ParamVector& theta,
                    const Vector& inputs, std::uint64_t seed) {
  if (inputs.size() == 0)
    throw std::invalid_argument("simulate: empty input sequence");
  if (theta.size() != model.dim_theta)
    throw std::invalid_argument("simulate: theta length does not match model");

  const Eigen::Index T = inputs.size();
  Trajectory traj;
  traj.inputs = inputs;
  traj.states.resize(T);
  traj.observations.resize(T);

  Rng rng(seed);
  double x = model.initial_state;
  for (Eigen::Index t = 0; t < T; ++t) {
    const double u = inputs[t];
    x = model.transition_sampler(x, u, theta, rng);
    const double y = model.observation_sampler(x, u, theta, rng);
    if (!std::isfinite(x) || !std::isfinite(y))
      throw std::runtime_error("simulate: non-finite sample at step " +
                               std::to_string(t + 1) + " (model divergence)");
    traj.states[t] = x;
    traj.observations[t] = y;
  }
  return traj;
}

ModelSpec builtin_lgss() {
  ModelSpec m;
  m.dim_theta = 2;
  m.initial_state = 0.0;

  m.transition_logpdf = [](double xp, double xn, double u,
                           const ParamVector& th) {
    return gaussian_logpdf(xn, th[0] * xp + u, th[1]);
  };
  m.observation_logpdf = [](double x, double y, double /*u*/,
                            const ParamVector& /*th*/) {
    return gaussian_logpdf(y, x, 0.1);
  };
  m.transition_grad = [](double xp, double xn, double u, const ParamVector& th,
                         Eigen::Ref<Vector> g) {
    const double r = xn - th[0] * xp - u;
    const double s2 = th[1] * th[1];
    g[0] = r * xp / s2;
    g[1] = -1.0 / th[1] + r * r / (s2 * th[1]);
  };
  m.observation_grad = [](double, double, double, const ParamVector&,
                          Eigen::Ref<Vector> g) { g.setZero(); };
  m.transition_sampler = [](double xp, double u, const ParamVector& th,
                            Rng& rng) {
    return th[0] * xp + u + th[1] * rng.normal();
  };
  m.observation_sampler = [](double x, double /*u*/, const ParamVector&,
                             Rng& rng) { return x + 0.1 * rng.normal(); };
  m.proposal = make_bootstrap_proposal(m);
  return m;
}

ModelSpec builtin_nonlinear() {
  ModelSpec m;
  m.dim_theta = 2;
  m.initial_state = 0.0;

  const double sv = 0.1;  // process noise sd (not a parameter)
  const double se = 0.1;  // observation noise sd

  auto mean = [](double xp, double u, const ParamVector& th) {
    return th[0] * xp + xp / (th[1] + xp * xp) + u;
  };

  m.transition_logpdf = [mean, sv](double xp, double xn, double u,
                                   const ParamVector& th) {
    return gaussian_logpdf(xn, mean(xp, u, th), sv);
  };
  m.observation_logpdf = [se](double x, double y, double /*u*/,
                              const ParamVector&) {
    return gaussian_logpdf(y, 0.5 * x + 0.4 * x * x, se);
  };
  m.transition_grad = [mean, sv](double xp, double xn, double u,
                                 const ParamVector& th, Eigen::Ref<Vector> g) {
    const double r = xn - mean(xp, u, th);
    const double d = th[1] + xp * xp;
    g[0] = r * xp / (sv * sv);
    g[1] = r * (-xp / (d * d)) / (sv * sv);
  };
  m.observation_grad = [](double, double, double, const ParamVector&,
                          Eigen::Ref<Vector> g) { g.setZero(); };
  m.transition_sampler = [mean, sv](double xp, double u, const ParamVector& th,
                                    Rng& rng) {
    return mean(xp, u, th) + sv * rng.normal();
  };
  m.observation_sampler = [se](double x, double /*u*/, const ParamVector&,
                               Rng& rng) {
    return 0.5 * x + 0.4 * x * x + se * rng.normal();
  };
  m.proposal = make_bootstrap_proposal(m);
  return m;
}

KalmanResult lgss_kalman_filter(const ParamVector& theta,
                                const Trajectory& traj) {
  const double a = theta[0];
  const double q = theta[1] * theta[1];
  const double r = 0.1 * 0.1;
  const Eigen::Index T = traj.length();

  KalmanResult res;
  res.filtered_mean.resize(T);
  res.filtered_var.resize(T);

  double m = 0.0;  // known x0
  double p = 0.0;
  double ll = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const double mp = a * m + traj.inputs[t];
    const double pp = a * a * p + q;
    const double s = pp + r;
    if (s <= 0.0)
      throw std::runtime_error("lgss_kalman_filter: non-positive innovation variance");
    const double innov = traj.observations[t] - mp;
    const double k = pp / s;
    m = mp + k * innov;
    p = (1.0 - k) * pp;
    ll += -0.5 * (kLog2Pi + std::log(s) + innov * innov / s);
    res.filtered_mean[t] = m;
    res.filtered_var[t] = p;
  }
  res.loglik = ll;
  return res;
}

double lgss_loglik(const ParamVector& theta, const Trajectory& traj) {
  if (traj.length() == 0) return 0.0;
  return lgss_kalman_filter(theta, traj).loglik;
}

Vector lgss_exact_score(const ParamVector& theta, const Trajectory& traj) {
  const double a = theta[0];
  const double sd = theta[1];
  const double q = sd * sd;
  const double r = 0.1 * 0.1;
  const Eigen::Index T = traj.length();

  Vector score = Vector::Zero(2);
  if (T == 0) return score;
  if (sd <= 0.0)
    throw std::invalid_argument("lgss_exact_score: theta2 must be positive");

  // Sensitivities of the filter recursion w.r.t. (theta1, theta2).
  double m = 0.0, p = 0.0;
  Eigen::Vector2d dm = Eigen::Vector2d::Zero();
  Eigen::Vector2d dp = Eigen::Vector2d::Zero();
  for (Eigen::Index t = 0; t < T; ++t) {
    const double mp = a * m + traj.inputs[t];
    const double pp = a * a * p + q;
    Eigen::Vector2d dmp(m + a * dm[0], a * dm[1]);
    Eigen::Vector2d dpp(2.0 * a * p + a * a * dp[0], a * a * dp[1] + 2.0 * sd);

    const double s = pp + r;
    if (s <= 0.0)
      throw std::runtime_error("lgss_exact_score: non-positive innovation variance");
    const double innov = traj.observations[t] - mp;
    const Eigen::Vector2d ds = dpp;
    const Eigen::Vector2d dinnov = -dmp;

    score += -0.5 * ds / s - (innov / s) * dinnov +
             0.5 * innov * innov / (s * s) * ds;

    const double k = pp / s;
    const Eigen::Vector2d dk = dpp * (r / (s * s));
    m = mp + k * innov;
    dm = dmp + dk * innov + k * dinnov;
    p = (1.0 - k) * pp;
    dp = -dk * pp + (1.0 - k) * dpp;
  }
  return score;
}

}  // namespace optinput
