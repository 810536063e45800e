#include "optinput/pipeline.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "optinput/parallel.hpp"
#include "optinput/rng.hpp"

namespace optinput {
namespace {

using nlohmann::json;

// Seed-derivation tags so every stage draws from an independent stream.
constexpr std::uint64_t kSeedDesign = 1;
constexpr std::uint64_t kSeedChain = 2;
constexpr std::uint64_t kSeedEval = 3;
constexpr std::uint64_t kSeedBaseline = 4;

template <class F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

SmootherConfig smoother_of(const ExperimentConfig& config) {
  SmootherConfig sc;
  sc.num_particles = config.num_particles;
  sc.lag = config.lag;
  return sc;
}

std::pair<double, double> alphabet_range(const ExperimentConfig& config) {
  const auto [lo, hi] =
      std::minmax_element(config.alphabet.begin(), config.alphabet.end());
  return {*lo, *hi};
}

Vector resolved_theta(const ExperimentConfig& config) {
  return config.theta0.size() ? config.theta0 : default_theta(config.model);
}

}  // namespace

const Vector& default_theta(const std::string& model_name) {
  static const Vector lgss = (Vector(2) << 0.5, 0.1).finished();
  static const Vector nonlinear = (Vector(2) << 0.7, 0.6).finished();
  if (model_name == "lgss") return lgss;
  if (model_name == "nonlinear") return nonlinear;
  throw std::invalid_argument("unknown model '" + model_name +
                              "' (expected lgss or nonlinear)");
}

ModelSpec make_model(const ExperimentConfig& config) {
  if (config.model == "lgss") return builtin_lgss();
  if (config.model == "nonlinear") return builtin_nonlinear();
  throw std::invalid_argument("unknown model '" + config.model +
                              "' (expected lgss or nonlinear)");
}

ExperimentConfig profile_config(const std::string& name) {
  ExperimentConfig c;  // the defaults are the Example 1 desk profile
  if (name == "ex1-desk") return c;
  if (name == "ex2-desk") {
    c.model = "nonlinear";
    return c;
  }
  const bool full1 = name == "ex1-full", full2 = name == "ex2-full";
  if (full1 || full2) {
    if (full2) c.model = "nonlinear";
    c.num_particles = 1000;
    c.score_samples = 5000;
    c.design_iterations = 100;
    c.n_seq = 5000;
    c.burn_in = 2000000;
    c.eval_samples = 5000;
    return c;
  }
  throw std::invalid_argument(
      "unknown profile '" + name +
      "' (expected ex1-desk, ex2-desk, ex1-full or ex2-full)");
}

void apply_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file '" + path + "': " + e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("config file '" + path +
                                "': expected a JSON object");

  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "model") config.model = value.get<std::string>();
      else if (key == "theta0") {
        const auto v = value.get<std::vector<double>>();
        config.theta0 = Eigen::Map<const Vector>(v.data(),
                                                 static_cast<Eigen::Index>(v.size()));
      } else if (key == "alphabet") config.alphabet = value.get<std::vector<double>>();
      else if (key == "memory") config.memory = value.get<int>();
      else if (key == "horizon") config.horizon = value.get<Eigen::Index>();
      else if (key == "n_seq") config.n_seq = value.get<Eigen::Index>();
      else if (key == "num_particles") config.num_particles = value.get<int>();
      else if (key == "score_samples") config.score_samples = value.get<int>();
      else if (key == "design_iterations") config.design_iterations = value.get<int>();
      else if (key == "lag") config.lag = value.get<int>();
      else if (key == "eval_samples") config.eval_samples = value.get<int>();
      else if (key == "burn_in") config.burn_in = value.get<long long>();
      else if (key == "criterion") config.criterion = value.get<std::string>();
      else if (key == "seed") config.seed = value.get<std::uint64_t>();
      else if (key == "threads") config.threads = value.get<int>();
      else if (key == "node_budget") config.node_budget = value.get<long long>();
      else if (key == "bases") config.bases = value.get<std::vector<int>>();
      else if (key == "out_dir") config.out_dir = value.get<std::string>();
      else if (key == "dump_cycles") config.dump_cycles = value.get<std::string>();
      else
        throw std::invalid_argument("config file '" + path +
                                    "': unknown key '" + key + "'");
    } catch (const json::exception& e) {
      throw std::invalid_argument("config file '" + path + "', key '" + key +
                                  "': " + e.what());
    }
  }
}

void validate_config(const ExperimentConfig& config) {
  default_theta(config.model);  // throws for unknown models
  parse_criterion(config.criterion);
  Alphabet check(config.alphabet);  // distinct, finite, >= 2 values
  if (config.memory < 1) throw std::invalid_argument("config: memory must be >= 1");
  if (config.horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
  if (config.n_seq < config.horizon + 1)
    throw std::invalid_argument(
        "config: n_seq must be at least horizon+1 (one evaluation window)");
  if (config.num_particles < 2)
    throw std::invalid_argument("config: num_particles must be >= 2");
  if (config.score_samples < 2)
    throw std::invalid_argument("config: score_samples must be >= 2");
  if (config.design_iterations < 1)
    throw std::invalid_argument("config: design_iterations must be >= 1");
  if (config.lag < 0) throw std::invalid_argument("config: lag must be >= 0");
  if (config.eval_samples < 2)
    throw std::invalid_argument("config: eval_samples must be >= 2");
  if (config.burn_in < 0) throw std::invalid_argument("config: burn_in must be >= 0");
  if (config.threads < 0) throw std::invalid_argument("config: threads must be >= 0");
  if (config.node_budget < 1)
    throw std::invalid_argument("config: node_budget must be >= 1");
  if (config.theta0.size() != 0) {
    if (config.theta0.size() != default_theta(config.model).size())
      throw std::invalid_argument("config: theta0 has the wrong dimension");
    if (!config.theta0.allFinite())
      throw std::invalid_argument("config: theta0 must be finite");
  }
  std::set<int> seen;
  for (int b : config.bases) {
    if (b < 0) throw std::invalid_argument("config: bases indices must be >= 0");
    if (!seen.insert(b).second)
      throw std::invalid_argument("config: bases indices must be distinct");
  }
}

Evaluation evaluate_input(const ModelSpec& model, const ParamVector& theta,
                          const Vector& input, Eigen::Index horizon,
                          int eval_samples, const SmootherConfig& config,
                          std::uint64_t seed, int threads) {
  if (eval_samples < 2)
    throw std::invalid_argument("evaluate_input: need at least two windows");
  const Eigen::Index window = horizon + 1;
  if (input.size() < window)
    throw std::invalid_argument(
        "evaluate_input: input shorter than one horizon window");
  const auto num_starts = static_cast<int>(input.size() - window + 1);

  Matrix cols(model.dim_theta, eval_samples);
  parallel_for(eval_samples, threads, [&](int m) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      const std::uint64_t s = derive_seed(
          seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(attempt)});
      try {
        Rng start_rng(derive_seed(s, {0}));
        const auto start =
            static_cast<Eigen::Index>(start_rng.uniform_int(num_starts));
        const Trajectory traj = simulate(model, theta, input.segment(start, window),
                                         derive_seed(s, {1}));
        cols.col(m) = estimate_score(model, theta, traj, config, derive_seed(s, {2}));
        return;
      } catch (const ParticleCollapse&) {
        if (attempt == 1) throw;
      }
    }
  });

  Evaluation out;
  out.fim = estimate_fim(cols);

  Eigen::SelfAdjointEigenSolver<Matrix> es(out.fim);
  const Vector& lambda = es.eigenvalues();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (lambda.minCoeff() <= 0.0) {
    out.log_det = -kInf;
    out.tr_inv = kInf;
    out.log_det_ci = out.tr_inv_ci = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.log_det = lambda.array().log().sum();
  out.tr_inv = lambda.cwiseInverse().sum();

  // Delta method over the per-window outer products z_m = s_m s_m^T:
  // d log det = tr(I^-1 dI) and d tr(I^-1) = -tr(I^-1 dI I^-1), so the
  // per-window statistics are s^T I^-1 s and -|I^-1 s|^2, scaled by
  // M/(M-1) for the estimator's divisor.
  const Matrix finv = es.eigenvectors() * lambda.cwiseInverse().asDiagonal() *
                      es.eigenvectors().transpose();
  const Matrix q = finv * cols;
  const Eigen::ArrayXd a = (cols.array() * q.array()).colwise().sum();
  const Eigen::ArrayXd b = -q.array().square().colwise().sum();
  const auto mm = static_cast<double>(eval_samples);
  const double scale = 1.96 * mm / (mm - 1.0) / std::sqrt(mm);
  out.log_det_ci = scale * std::sqrt((a - a.mean()).square().sum() / (mm - 1.0));
  out.tr_inv_ci = scale * std::sqrt((b - b.mean()).square().sum() / (mm - 1.0));
  return out;
}

Report run_pipeline(const ExperimentConfig& config) {
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();

  const ModelSpec model = make_model(config);
  const Vector theta = resolved_theta(config);
  const Criterion crit = parse_criterion(config.criterion);
  const SmootherConfig smc = smoother_of(config);

  Report report;
  report.kind = "design";
  report.model = config.model;
  report.criterion = config.criterion;

  const Alphabet alphabet(config.alphabet);
  std::vector<BasisInput> bases;
  stage("cycles", [&] {
    const StationaryGraph graph =
        build_graph(alphabet, config.memory, config.node_budget);
    std::vector<BasisInput> all =
        enumerate_basis_inputs(alphabet, config.memory, config.node_budget);
    if (!config.dump_cycles.empty()) {
      std::ofstream dump(config.dump_cycles);
      if (!dump)
        throw std::runtime_error("cannot open cycle dump '" + config.dump_cycles + "'");
      for (const BasisInput& b : all)
        dump << format_cycle(b.prime_cycle, graph) << "\n";
    }
    if (config.bases.empty()) {
      bases = std::move(all);
    } else {
      for (int idx : config.bases) {
        if (idx >= static_cast<int>(all.size()))
          throw std::runtime_error("bases index " + std::to_string(idx) +
                                   " out of range (only " +
                                   std::to_string(all.size()) + " prime cycles)");
        bases.push_back(all[static_cast<size_t>(idx)]);
      }
    }
    for (const BasisInput& b : bases)
      report.basis_labels.push_back(format_cycle(b.prime_cycle, graph));
  });
  report.num_bases = static_cast<int>(bases.size());

  const auto t_design = std::chrono::steady_clock::now();
  stage("design", [&] {
    DesignResult d = run_mc_design(model, theta, bases, crit,
                                   config.design_iterations, config.score_samples,
                                   config.horizon, smc,
                                   derive_seed(config.seed, {kSeedDesign}),
                                   config.threads);
    report.gamma_star = std::move(d.gamma_star);
    report.gamma_ci = std::move(d.ci_halfwidth);
    report.objective_trace = std::move(d.objective_trace);
  });
  report.seconds_design = elapsed(t_design);

  const MarkovChain chain = stage("chain", [&] {
    std::vector<StationaryPmf> pmfs;
    pmfs.reserve(bases.size());
    for (const BasisInput& b : bases) pmfs.push_back(b.uniform_pmf());
    return build_chain(mix_pmfs(report.gamma_star, pmfs));
  });
  report.chain_irreducible = chain.irreducible;

  stage("sample", [&] {
    report.input = sample_input(chain, config.n_seq, config.burn_in,
                                derive_seed(config.seed, {kSeedChain}));
  });

  const auto t_eval = std::chrono::steady_clock::now();
  stage("evaluate", [&] {
    report.eval = evaluate_input(model, theta, report.input, config.horizon,
                                 config.eval_samples, smc,
                                 derive_seed(config.seed, {kSeedEval}),
                                 config.threads);
  });
  report.seconds_eval = elapsed(t_eval);
  report.seconds_total = elapsed(t0);
  return report;
}

Report run_baseline(const ExperimentConfig& config, const std::string& kind) {
  validate_config(config);
  std::uint64_t tag = 0;
  if (kind == "binary") tag = 1;
  else if (kind == "uniform") tag = 2;
  else
    throw std::invalid_argument("unknown baseline kind '" + kind +
                                "' (expected binary or uniform)");
  const auto t0 = std::chrono::steady_clock::now();

  const ModelSpec model = make_model(config);
  const Vector theta = resolved_theta(config);

  Report report;
  report.kind = kind;
  report.model = config.model;
  report.criterion = config.criterion;

  stage("sample", [&] {
    const auto [lo, hi] = alphabet_range(config);
    Rng rng(derive_seed(config.seed, {kSeedBaseline, tag}));
    report.input.resize(config.n_seq);
    for (Eigen::Index t = 0; t < config.n_seq; ++t)
      report.input[t] =
          tag == 1 ? (rng.uniform_int(2) == 0 ? lo : hi) : rng.uniform(lo, hi);
  });

  const auto t_eval = std::chrono::steady_clock::now();
  stage("evaluate", [&] {
    report.eval = evaluate_input(model, theta, report.input, config.horizon,
                                 config.eval_samples, smoother_of(config),
                                 derive_seed(config.seed, {kSeedEval}),
                                 config.threads);
  });
  report.seconds_eval = elapsed(t_eval);
  report.seconds_total = elapsed(t0);
  return report;
}

std::string render_report(const Report& report) {
  std::ostringstream out;
  out << "input    : " << report.kind;
  if (report.kind == "design") out << " (" << report.criterion << ")";
  out << "\nmodel    : " << report.model << "\n";
  if (report.kind == "design") {
    out << "n_V      : " << report.num_bases << "\n";
    for (Eigen::Index j = 0; j < report.gamma_star.size(); ++j) {
      out << "  gamma[" << j << "] = " << fmt_short(report.gamma_star[j]);
      if (report.gamma_ci)
        out << " +/- " << fmt_short((*report.gamma_ci)[j]);
      const auto idx = static_cast<size_t>(j);
      if (idx < report.basis_labels.size())
        out << "   " << report.basis_labels[idx];
      out << "\n";
    }
    if (!report.chain_irreducible)
      out << "note     : mixed pmf support is reducible; a single sampled path "
             "follows one cycle class\n";
  }
  out << "log det  : " << fmt_short(report.eval.log_det) << " +/- "
      << fmt_short(report.eval.log_det_ci) << " (95% CI)\n";
  out << "tr inv   : " << fmt_short(report.eval.tr_inv) << " +/- "
      << fmt_short(report.eval.tr_inv_ci) << " (95% CI)\n";
  out << "runtime  : ";
  if (report.kind == "design")
    out << "design " << fmt_short(report.seconds_design) << " s, ";
  out << "eval " << fmt_short(report.seconds_eval) << " s, total "
      << fmt_short(report.seconds_total) << " s\n";
  return out.str();
}

void write_report_files(const Report& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (out_dir.empty())
    throw std::invalid_argument("write_report_files: empty output directory");
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error(std::string("cannot write ") + name);
    return f;
  };

  {
    auto f = open("report.csv");
    f << "kind,model,criterion,num_bases,irreducible,log_det,log_det_ci95,"
         "tr_inv,tr_inv_ci95\n";
    f << report.kind << ',' << report.model << ',' << report.criterion << ','
      << report.num_bases << ',' << (report.chain_irreducible ? 1 : 0) << ','
      << fmt(report.eval.log_det) << ',' << fmt(report.eval.log_det_ci) << ','
      << fmt(report.eval.tr_inv) << ',' << fmt(report.eval.tr_inv_ci) << "\n";
  }
  {
    auto f = open("fim.csv");
    for (Eigen::Index i = 0; i < report.eval.fim.rows(); ++i) {
      for (Eigen::Index j = 0; j < report.eval.fim.cols(); ++j)
        f << (j ? "," : "") << fmt(report.eval.fim(i, j));
      f << "\n";
    }
  }
  {
    auto f = open("input.csv");
    for (Eigen::Index t = 0; t < report.input.size(); ++t)
      f << fmt(report.input[t]) << "\n";
  }
  if (report.kind == "design") {
    {
      auto f = open("gamma.csv");
      f << "index,cycle,weight,ci95\n";
      for (Eigen::Index j = 0; j < report.gamma_star.size(); ++j) {
        const auto idx = static_cast<size_t>(j);
        f << j << ",\""
          << (idx < report.basis_labels.size() ? report.basis_labels[idx] : "")
          << "\"," << fmt(report.gamma_star[j]) << ',';
        if (report.gamma_ci) f << fmt((*report.gamma_ci)[j]);
        f << "\n";
      }
    }
    {
      auto f = open("objective_trace.csv");
      f << "iteration,objective\n";
      for (Eigen::Index k = 0; k < report.objective_trace.size(); ++k)
        f << k << ',' << fmt(report.objective_trace[k]) << "\n";
    }
  }
}

}  // namespace optinput
