#include <map>

#include "doctest.h"
#include "optinput/chain.hpp"

using namespace optinput;

namespace {

// Random simplex weights via normalized exponentials.
Vector random_simplex(Rng& rng, Eigen::Index n) {
  Vector g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = -std::log(1.0 - rng.uniform());
  return g / g.sum();
}

// Empirical distribution of consecutive value tuples in a sampled sequence.
double tuple_tv_distance(const StationaryPmf& pmf, const Vector& sample) {
  const int c = pmf.alphabet.size();
  std::map<double, int> digit_of;
  for (int i = 0; i < c; ++i) digit_of[pmf.alphabet.values[static_cast<size_t>(i)]] = i;

  const int memory = pmf.memory;
  Vector counts = Vector::Zero(pmf.probs.size());
  for (Eigen::Index t = memory - 1; t < sample.size(); ++t) {
    int id = 0;
    for (int j = memory - 1; j >= 0; --j) id = id * c + digit_of.at(sample[t - j]);
    counts[id] += 1.0;
  }
  counts /= counts.sum();
  return 0.5 * (counts - pmf.probs).cwiseAbs().sum();
}

}  // namespace

TEST_SUITE("chain") {

TEST_CASE("deterministic alternation from the two-cycle pmf") {
  const StationaryGraph g = build_graph(Alphabet({0.0, 1.0}), 2);
  const MarkovChain chain = build_chain(extreme_pmf(Cycle{{1, 2}}, g));
  // Context (0) must go to value 1; context (1) back to value 0.
  CHECK(chain.transition(0, 1) == 1.0);
  CHECK(chain.transition(1, 0) == 1.0);
  CHECK(chain.irreducible);

  const Vector seq = sample_input(chain, 50, 100, 7);
  for (Eigen::Index t = 1; t < seq.size(); ++t)
    CHECK(seq[t] == 1.0 - seq[t - 1]);
}

TEST_CASE("point mass keeps its context and fills unreachable rows uniformly") {
  const StationaryGraph g = build_graph(Alphabet({0.0, 1.0}), 2);
  const MarkovChain chain = build_chain(extreme_pmf(Cycle{{3}}, g));
  CHECK(chain.transition(1, 1) == 1.0);
  // Context (0) has zero marginal: uniform fallback.
  CHECK(chain.transition(0, 0) == 0.5);
  CHECK(chain.transition(0, 1) == 0.5);

  const Vector seq = sample_input(chain, 20, 0, 3);
  CHECK((seq.array() == 1.0).all());
}

TEST_CASE("disjoint cycle mixture is reducible and traps the sampler") {
  const StationaryGraph g = build_graph(Alphabet({0.0, 1.0}), 2);
  const std::vector<StationaryPmf> bases{extreme_pmf(Cycle{{0}}, g),
                                         extreme_pmf(Cycle{{3}}, g)};
  Vector gamma(2);
  gamma << 0.5, 0.5;
  const MarkovChain chain = build_chain(mix_pmfs(gamma, bases));
  CHECK(chain.transition(0, 0) == 1.0);
  CHECK(chain.transition(1, 1) == 1.0);
  CHECK_FALSE(chain.irreducible);

  // One path follows a single class: constant at its initial value.
  const Vector seq = sample_input(chain, 30, 10, 5);
  CHECK((seq.array() == seq[0]).all());
}

TEST_CASE("non-stationary pmfs are rejected") {
  StationaryPmf pmf{Alphabet({0.0, 1.0}), 2, Vector::Zero(4)};
  pmf.probs[1] = 1.0;
  CHECK_THROWS_AS(build_chain(pmf), std::invalid_argument);
  pmf.probs.setConstant(0.3);  // does not sum to one
  CHECK_THROWS_AS(build_chain(pmf), std::invalid_argument);
}

TEST_CASE("the pmf is stationary for the induced node chain") {
  const Alphabet alphabet({-1.0, 0.0, 1.0});
  const StationaryGraph g = build_graph(alphabet, 2);
  const auto primes = prime_cycles(alphabet, 2);
  std::vector<StationaryPmf> bases;
  for (const Cycle& cyc : primes) bases.push_back(extreme_pmf(cyc, g));

  Rng rng(2025);
  for (int rep = 0; rep < 5; ++rep) {
    const StationaryPmf mixed =
        mix_pmfs(random_simplex(rng, static_cast<Eigen::Index>(bases.size())), bases);
    const MarkovChain chain = build_chain(mixed);
    const Matrix p = node_transition_matrix(chain);
    for (Eigen::Index z = 0; z < p.rows(); ++z)
      CHECK(p.row(z).sum() == doctest::Approx(1.0).epsilon(1e-12));
    const Vector residual = p.transpose() * mixed.probs - mixed.probs;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("long sample paths reproduce the pmf on irreducible support") {
  const Alphabet alphabet({-1.0, 0.0, 1.0});
  const StationaryGraph g = build_graph(alphabet, 2);
  const auto primes = prime_cycles(alphabet, 2);
  std::vector<StationaryPmf> bases;
  for (const Cycle& cyc : primes) bases.push_back(extreme_pmf(cyc, g));

  Rng rng(31);
  const StationaryPmf mixed =
      mix_pmfs(random_simplex(rng, static_cast<Eigen::Index>(bases.size())), bases);
  const MarkovChain chain = build_chain(mixed);
  REQUIRE(chain.irreducible);
  const Vector seq = sample_input(chain, 100000, 1000, 17);
  CHECK(tuple_tv_distance(mixed, seq) < 0.02);
}

TEST_CASE("memory one samples values independently from the pmf") {
  StationaryPmf pmf{Alphabet({0.0, 1.0, 2.0}), 1, Vector(3)};
  pmf.probs << 0.2, 0.5, 0.3;
  const MarkovChain chain = build_chain(pmf);
  CHECK(chain.transition.rows() == 1);
  const Vector seq = sample_input(chain, 100000, 0, 23);
  CHECK(tuple_tv_distance(pmf, seq) < 0.02);
}

TEST_CASE("sampling is deterministic and validates arguments") {
  const StationaryGraph g = build_graph(Alphabet({0.0, 1.0}), 2);
  const MarkovChain chain = build_chain(extreme_pmf(Cycle{{1, 2}}, g));
  CHECK(sample_input(chain, 40, 5, 9) == sample_input(chain, 40, 5, 9));
  CHECK_THROWS_AS(sample_input(chain, -1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_input(chain, 10, -2, 1), std::invalid_argument);
}

}  // TEST_SUITE
