// Independent reference implementations used to cross-check the library:
// a brute-force simple-cycle enumerator, a windowed prime-cycle construction
// built directly on tuples, central finite differences, and a dense simplex
// grid search for the design objectives.
#ifndef OPTINPUT_TESTS_ORACLES_HPP
#define OPTINPUT_TESTS_ORACLES_HPP

#include <functional>
#include <vector>

#include "optinput/design.hpp"
#include "optinput/stationary_graph.hpp"

namespace oracles {

/// Every elementary cycle of the digraph by exhaustive DFS: a cycle is found
/// once, rooted at its smallest node id (hence already in canonical
/// rotation).  Output sorted by (length, node sequence).
std::vector<optinput::Cycle> brute_force_cycles(const optinput::Digraph& graph);

/// Prime cycles derived from scratch: tuple-level (memory-1)-graph built
/// directly on value tuples, brute-force cycle enumeration, then the sliding
/// length-`memory` window over each cycle's periodic value sequence.  Returns
/// node ids of the memory-`memory` graph, canonical and sorted.
std::vector<optinput::Cycle> windowed_prime_cycles(const optinput::Alphabet& alphabet,
                                                   int memory);

/// Central finite differences with per-coordinate step 1e-6 * max(1, |x_i|).
optinput::Vector fd_gradient(const std::function<double(const optinput::Vector&)>& f,
                             const optinput::Vector& x);

/// Criterion value of a 2x2 mixture in closed form (-inf when singular).
double objective_2x2(const optinput::Matrix& s, optinput::Criterion crit);

/// Best objective over the dense simplex grid with the given step, for 2x2
/// information matrices and 2 or 3 weights.
double grid_search_best(const std::vector<optinput::Matrix>& fims,
                        optinput::Criterion crit, double step);

}  // namespace oracles

#endif  // OPTINPUT_TESTS_ORACLES_HPP
