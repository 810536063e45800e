#ifndef OPTINPUT_CHAIN_HPP
#define OPTINPUT_CHAIN_HPP

#include <cstdint>

#include "optinput/stationary_graph.hpp"

namespace optinput {

/// Markov chain on memory-graph nodes induced by a stationary pmf.  The next
/// input value depends only on the most recent memory-1 values (the context),
/// with P(v | z) = p(z, v) / sum_v' p(z, v'); contexts of zero marginal get a
/// uniform row, which is never visited under the stationary law.
struct MarkovChain {
  StationaryPmf pmf;
  Matrix transition;  // num_contexts() x c, row z = P(. | context z)
  /// Whether the pmf's support is a single closed communicating class.  A
  /// mixture of disjoint cycles is stationary but not irreducible: one sample
  /// path then stays inside the class its initial state lands in.
  bool irreducible = true;
};

/// Validate the pmf (simplex + stationarity, tolerance `tol`) and build the
/// conditional chain.  Stationarity of the pmf under the chain is exact by
/// construction.
MarkovChain build_chain(const StationaryPmf& pmf, double tol = 1e-10);

/// Full transition matrix on node ids (c^memory square); row z*c+v has mass
/// only on nodes shift(z*c+v, .).  Intended for stationarity diagnostics.
Matrix node_transition_matrix(const MarkovChain& chain);

/// Sample an input sequence of the given length from the chain: initial node
/// drawn from the pmf, `burn_in` warm-up transitions, then one emitted value
/// (the newly shifted-in alphabet value) per step.
Vector sample_input(const MarkovChain& chain, Eigen::Index length,
                    long long burn_in, std::uint64_t seed);

}  // namespace optinput

#endif  // OPTINPUT_CHAIN_HPP
