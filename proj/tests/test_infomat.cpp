#include "doctest.h"
#include "optinput/infomat.hpp"

using namespace optinput;

TEST_SUITE("infomat") {

TEST_CASE("outer-product estimator on a known score sample") {
  // Scores (1,0), (0,1), (1,1): sum of outer products is [[2,1],[1,2]],
  // divided by M-1 = 2.
  Matrix cols(2, 3);
  cols << 1, 0, 1,
          0, 1, 1;
  const Matrix fim = estimate_fim(cols);
  CHECK(fim(0, 0) == doctest::Approx(1.0));
  CHECK(fim(1, 1) == doctest::Approx(1.0));
  CHECK(fim(0, 1) == doctest::Approx(0.5));
  CHECK(fim(1, 0) == doctest::Approx(0.5));

  std::vector<Vector> scores;
  for (int m = 0; m < 3; ++m) scores.push_back(cols.col(m));
  CHECK(estimate_fim(scores) == fim);
}

TEST_CASE("estimates are symmetric and positive semidefinite") {
  Rng rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    const int dim = 2 + rng.uniform_int(3);
    const int m = dim + rng.uniform_int(20);
    Matrix cols(dim, m);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < m; ++j) cols(i, j) = rng.normal(0.0, 3.0);
    const Matrix fim = estimate_fim(cols);
    CHECK(symmetry_gap(fim) <= 1e-12);
    CHECK(min_eigenvalue(fim) >= -1e-10);
    CHECK(is_psd(fim));
  }
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(estimate_fim(Matrix::Zero(2, 1)), std::invalid_argument);
  CHECK_THROWS_AS(estimate_fim(std::vector<Vector>{}), std::invalid_argument);
  std::vector<Vector> ragged{Vector::Zero(2), Vector::Zero(3)};
  CHECK_THROWS_AS(estimate_fim(ragged), std::invalid_argument);
}

TEST_CASE("fim_for_basis is deterministic and thread-invariant") {
  const ModelSpec model = builtin_lgss();
  Vector theta(2);
  theta << 0.5, 0.1;
  const auto bases = enumerate_basis_inputs(Alphabet({-1.0, 0.0, 1.0}), 2);
  REQUIRE(bases.size() == 8);

  SmootherConfig cfg;
  cfg.num_particles = 50;
  cfg.lag = 5;
  Vector mean1, mean4;
  const Matrix f1 = fim_for_basis(model, theta, bases[7], 40, 24, cfg, 2023, 1, &mean1);
  const Matrix f4 = fim_for_basis(model, theta, bases[7], 40, 24, cfg, 2023, 4, &mean4);
  CHECK(f1 == f4);            // bitwise: work split must not change results
  CHECK(mean1 == mean4);
  CHECK(symmetry_gap(f1) == 0.0);
  CHECK(is_psd(f1));

  const Matrix other = fim_for_basis(model, theta, bases[7], 40, 24, cfg, 2024);
  CHECK(f1 != other);
}

TEST_CASE("mix_fim checks the simplex and combines linearly") {
  const std::vector<Matrix> fims{Matrix::Identity(2, 2),
                                 2.0 * Matrix::Identity(2, 2)};
  Vector gamma(2);
  gamma << 0.25, 0.75;
  CHECK(mix_fim(gamma, fims)(0, 0) == doctest::Approx(1.75));
  gamma << 0.5, 0.6;
  CHECK_THROWS_AS(mix_fim(gamma, fims), std::invalid_argument);
  Vector wrong(3);
  wrong << 0.2, 0.3, 0.5;
  CHECK_THROWS_AS(mix_fim(wrong, fims), std::invalid_argument);
}

}  // TEST_SUITE
