#include <cmath>

#include "doctest.h"
#include "optinput/design.hpp"
#include "oracles.hpp"

using namespace optinput;

namespace {

Matrix random_psd(Rng& rng, bool rank1 = false) {
  if (rank1) {
    Vector b(2);
    b << rng.normal(), rng.normal();
    return b * b.transpose();
  }
  Matrix b(2, 2);
  b << rng.normal(), rng.normal(), rng.normal(), rng.normal();
  return b * b.transpose();
}

}  // namespace

TEST_SUITE("design") {

TEST_CASE("criterion parsing round-trips") {
  CHECK(parse_criterion("det") == Criterion::kDOpt);
  CHECK(parse_criterion("trinv") == Criterion::kAOpt);
  CHECK(criterion_name(Criterion::kDOpt) == "det");
  CHECK(criterion_name(Criterion::kAOpt) == "trinv");
  CHECK_THROWS_AS(parse_criterion("logdet"), std::invalid_argument);
}

TEST_CASE("two diagonal matrices: the balanced mixture wins") {
  const std::vector<Matrix> fims{
      (Matrix(2, 2) << 2, 0, 0, 1).finished(),
      (Matrix(2, 2) << 1, 0, 0, 2).finished()};
  for (Criterion crit : {Criterion::kDOpt, Criterion::kAOpt}) {
    const SolveInfo info = solve_design_full(fims, crit);
    CHECK(info.gamma[0] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(info.gamma[1] == doctest::Approx(0.5).epsilon(1e-7));
  }
  CHECK(solve_design_full(fims, Criterion::kDOpt).objective
        == doctest::Approx(std::log(2.25)).epsilon(1e-9));
  CHECK(solve_design_full(fims, Criterion::kAOpt).objective
        == doctest::Approx(-4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("identical matrices stop immediately at uniform") {
  const std::vector<Matrix> fims{Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  const SolveInfo info = solve_design_full(fims, Criterion::kDOpt);
  CHECK(info.gamma[0] == 0.5);
  CHECK(info.gamma[1] == 0.5);
  CHECK(info.iterations == 0);
  CHECK(info.gap <= 1e-8);
}

TEST_CASE("a dominating vertex is reached") {
  // A1 dominates in every direction; the optimum is the vertex (1,0).
  const std::vector<Matrix> fims{
      (Matrix(2, 2) << 4, 0, 0, 1).finished(), Matrix::Identity(2, 2)};
  const SolveInfo info = solve_design_full(fims, Criterion::kDOpt);
  CHECK(info.gamma[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(info.objective == doctest::Approx(std::log(4.0)).epsilon(1e-7));
}

TEST_CASE("complementary rank-1 matrices balance") {
  const std::vector<Matrix> fims{
      (Matrix(2, 2) << 1, 0, 0, 0).finished(),
      (Matrix(2, 2) << 0, 0, 0, 1).finished()};
  for (Criterion crit : {Criterion::kDOpt, Criterion::kAOpt}) {
    const Vector gamma = solve_design(fims, crit);
    CHECK(gamma[0] == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("single matrix gives the trivial weight") {
  const std::vector<Matrix> fims{Matrix::Identity(2, 2) * 3.0};
  const SolveInfo info = solve_design_full(fims, Criterion::kDOpt);
  REQUIRE(info.gamma.size() == 1);
  CHECK(info.gamma[0] == 1.0);
  CHECK(info.objective == doctest::Approx(2.0 * std::log(3.0)));
}

TEST_CASE("infeasible and malformed problems are rejected") {
  // Shared kernel: every mixture is singular.
  Vector e1(2);
  e1 << 1, 0;
  const std::vector<Matrix> shared{e1 * e1.transpose(), 2.0 * e1 * e1.transpose()};
  CHECK_THROWS_AS(solve_design(shared, Criterion::kDOpt), std::runtime_error);

  const std::vector<Matrix> indefinite{(Matrix(2, 2) << 1, 0, 0, -1).finished(),
                                       Matrix::Identity(2, 2)};
  CHECK_THROWS_AS(solve_design(indefinite, Criterion::kDOpt), std::invalid_argument);

  const std::vector<Matrix> asym{(Matrix(2, 2) << 1, 0.5, 0, 1).finished(),
                                 Matrix::Identity(2, 2)};
  CHECK_THROWS_AS(solve_design(asym, Criterion::kDOpt), std::invalid_argument);

  CHECK_THROWS_AS(solve_design({}, Criterion::kDOpt), std::invalid_argument);
}

TEST_CASE("solver matches the dense grid oracle") {
  Rng rng(314);
  for (int rep = 0; rep < 6; ++rep) {
    const size_t n = rep % 2 == 0 ? 2 : 3;
    std::vector<Matrix> fims;
    fims.push_back(random_psd(rng));  // ensure a nonsingular mixture exists
    while (fims.size() < n) fims.push_back(random_psd(rng, rng.uniform() < 0.3));
    for (Criterion crit : {Criterion::kDOpt, Criterion::kAOpt}) {
      const SolveInfo info = solve_design_full(fims, crit);
      // The solver's claimed objective agrees with an independent evaluation.
      const double check = oracles::objective_2x2(mix_fim(info.gamma, fims), crit);
      CHECK(info.objective == doctest::Approx(check).epsilon(1e-9));
      // And it is at least as good as the best grid point.
      const double grid = oracles::grid_search_best(fims, crit, 1e-3);
      CHECK(info.objective >= grid - 1e-6);
    }
  }
}

TEST_CASE("gamma stays on the simplex across iterations") {
  Rng rng(99);
  std::vector<Matrix> fims;
  for (int j = 0; j < 4; ++j) fims.push_back(random_psd(rng));
  const SolveInfo info = solve_design_full(fims, Criterion::kAOpt);
  CHECK(info.gamma.minCoeff() >= 0.0);
  CHECK(info.gamma.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(info.gap <= 1e-8);
}

TEST_CASE("monte carlo design averages per-iteration optima") {
  const ModelSpec model = builtin_lgss();
  Vector theta(2);
  theta << 0.5, 0.1;
  auto all = enumerate_basis_inputs(Alphabet({-1.0, 0.0, 1.0}), 2);
  const std::vector<BasisInput> bases{all[6], all[7]};  // two period-3 cycles

  SmootherConfig cfg;
  cfg.num_particles = 50;
  cfg.lag = 5;
  const DesignResult res = run_mc_design(model, theta, bases, Criterion::kDOpt,
                                         3, 24, 30, cfg, 555, 1);
  REQUIRE(res.gamma_samples.rows() == 3);
  REQUIRE(res.gamma_samples.cols() == 2);
  for (int k = 0; k < 3; ++k) {
    CHECK(res.gamma_samples.row(k).minCoeff() >= 0.0);
    CHECK(res.gamma_samples.row(k).sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(res.gamma_star.sum() == doctest::Approx(1.0).epsilon(1e-10));
  REQUIRE(res.ci_halfwidth.has_value());
  CHECK(res.ci_halfwidth->minCoeff() >= 0.0);
  CHECK(res.objective_trace.allFinite());

  // Thread-count invariance and K=1 behavior.
  const DesignResult res4 = run_mc_design(model, theta, bases, Criterion::kDOpt,
                                          3, 24, 30, cfg, 555, 4);
  CHECK(res.gamma_samples == res4.gamma_samples);
  const DesignResult single = run_mc_design(model, theta, bases, Criterion::kDOpt,
                                            1, 24, 30, cfg, 555, 1);
  CHECK_FALSE(single.ci_halfwidth.has_value());
}

}  // TEST_SUITE
