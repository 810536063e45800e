#ifndef OPTINPUT_STATIONARY_GRAPH_HPP
#define OPTINPUT_STATIONARY_GRAPH_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "optinput/model.hpp"

namespace optinput {

/// Finite ordered input alphabet.  Values must be distinct and finite and
/// there must be at least two of them (a singleton alphabet admits no design
/// choice).  The order fixes node indexing throughout.
struct Alphabet {
  std::vector<double> values;

  explicit Alphabet(std::vector<double> vals);
  int size() const { return static_cast<int>(values.size()); }
};

/// Plain directed graph, adjacency-list form.  Parallel edges are not used;
/// self-loops are allowed.
struct Digraph {
  int num_nodes = 0;
  std::vector<std::vector<int>> adj;

  explicit Digraph(int n) : num_nodes(n), adj(static_cast<size_t>(n)) {}
  void add_edge(int from, int to) { adj[static_cast<size_t>(from)].push_back(to); }
};

/// A directed cycle as the list of node ids it visits (no node repeated);
/// stored in canonical rotation: the smallest node id first.
struct Cycle {
  std::vector<int> nodes;

  int period() const { return static_cast<int>(nodes.size()); }
};

/// Rotate so the smallest node id comes first.  Node ids order tuples
/// lexicographically under the alphabet order, so this is the canonical
/// representation used for set comparisons.
Cycle canonical_rotation(std::vector<int> nodes);

/// Memory graph over n_m-tuples of alphabet values.  Node ids encode tuples
/// in base c with the oldest element most significant, so id order equals
/// lexicographic tuple order.  Every node has out-degree c (one shift edge
/// per alphabet value).
struct StationaryGraph {
  Alphabet alphabet;
  int memory = 1;
  Digraph graph;

  int num_nodes() const { return graph.num_nodes; }
  /// Decode a node id into its tuple of alphabet indices (oldest first).
  std::vector<int> node_digits(int id) const;
  /// Decode a node id into its tuple of alphabet values (oldest first).
  std::vector<double> node_values(int id) const;
  /// Last (most recent) alphabet value of a node's tuple.
  double last_value(int id) const { return alphabet.values[static_cast<size_t>(id % alphabet.size())]; }
  /// Successor node reached by shifting in alphabet index `digit`.
  int shift(int id, int digit) const;
};

/// Number of n_m-tuples, guarded against overflow; throws if it exceeds the
/// budget.
long long tuple_count(int alphabet_size, int memory, long long budget);

/// Build the memory graph.  Throws std::invalid_argument when memory < 1 or
/// when c^memory exceeds node_budget (the message carries the size estimate).
StationaryGraph build_graph(const Alphabet& alphabet, int memory,
                            long long node_budget = 100000);

/// All elementary (simple) cycles of a digraph, one per rotation class, each
/// in canonical rotation; output sorted by (length, node sequence).
/// Johnson's circuit enumeration over Tarjan strongly connected components.
std::vector<Cycle> elementary_cycles(const Digraph& graph);

/// Prime cycles of the memory graph over `alphabet` with the given memory.
/// For memory >= 2 these are produced from the elementary cycles of the
/// (memory-1) graph by sliding a length-memory window over each cycle's
/// periodic value sequence; for memory == 1 they are the elementary cycles of
/// the memory-1 graph itself.  Node ids refer to the memory-`memory` graph.
std::vector<Cycle> prime_cycles(const Alphabet& alphabet, int memory,
                                long long node_budget = 100000);

/// Stationary pmf over n_m-tuples, dense over node ids of the memory graph.
struct StationaryPmf {
  Alphabet alphabet;
  int memory = 1;
  Vector probs;

  int num_contexts() const;  // c^(memory-1)
  /// Max violation of the stationarity marginal condition: for every
  /// (memory-1)-tuple z, sum_v p(v,z) must equal sum_v p(z,v).
  double stationarity_gap() const;
  bool is_valid(double tol = 1e-12) const;
};

/// Basis input: a prime cycle together with the periodic signal and uniform
/// cycle measure it induces (one extreme point of the pmf polytope).
struct BasisInput {
  Cycle prime_cycle;
  Alphabet alphabet;
  int memory = 1;

  int period() const { return prime_cycle.period(); }
  /// Input sequence u_0..u_T (length T+1) traversing the cycle.
  Vector signal(Eigen::Index horizon) const;
  StationaryPmf uniform_pmf() const;
};

/// The length-(T+1) periodic input sequence of a cycle: cycle through the
/// nodes emitting each node's last tuple component.
Vector basis_signal(const Cycle& cycle, const StationaryGraph& graph,
                    Eigen::Index horizon);

/// Uniform distribution on the nodes of a prime cycle (an extreme point of
/// the stationary pmf polytope).  Validates that the cycle is an elementary
/// cycle of the graph.
StationaryPmf extreme_pmf(const Cycle& cycle, const StationaryGraph& graph);

/// Convex combination of stationary pmfs with simplex weights gamma.
/// Throws if gamma is off the simplex (tolerance 1e-10) or sizes mismatch.
StationaryPmf mix_pmfs(const Vector& gamma,
                       const std::vector<StationaryPmf>& bases);

/// Enumerate all basis inputs (extreme points) for an alphabet and memory.
std::vector<BasisInput> enumerate_basis_inputs(const Alphabet& alphabet,
                                               int memory,
                                               long long node_budget = 100000);

/// Debug dump: one cycle per line, nodes as comma-separated value tuples,
/// e.g. "(0,1),(1,0)".
std::string format_cycle(const Cycle& cycle, const StationaryGraph& graph);

}  // namespace optinput

#endif  // OPTINPUT_STATIONARY_GRAPH_HPP
