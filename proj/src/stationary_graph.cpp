#include "optinput/stationary_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace optinput {

Alphabet::Alphabet(std::vector<double> vals) : values(std::move(vals)) {
  if (values.size() < 2)
    throw std::invalid_argument(
        "Alphabet: need at least two values (the design problem is vacuous "
        "otherwise)");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("Alphabet: values must be finite");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("Alphabet: values must be distinct");
}

Cycle canonical_rotation(std::vector<int> nodes) {
  if (nodes.empty()) throw std::invalid_argument("canonical_rotation: empty cycle");
  auto min_it = std::min_element(nodes.begin(), nodes.end());
  std::rotate(nodes.begin(), min_it, nodes.end());
  return Cycle{std::move(nodes)};
}

std::vector<int> StationaryGraph::node_digits(int id) const {
  const int c = alphabet.size();
  std::vector<int> digits(static_cast<size_t>(memory));
  for (int i = memory - 1; i >= 0; --i) {
    digits[static_cast<size_t>(i)] = id % c;
    id /= c;
  }
  return digits;
}

std::vector<double> StationaryGraph::node_values(int id) const {
  std::vector<int> digits = node_digits(id);
  std::vector<double> vals(digits.size());
  for (size_t i = 0; i < digits.size(); ++i)
    vals[i] = alphabet.values[static_cast<size_t>(digits[i])];
  return vals;
}

int StationaryGraph::shift(int id, int digit) const {
  const int c = alphabet.size();
  int tail_count = 1;
  for (int i = 1; i < memory; ++i) tail_count *= c;
  return (id % tail_count) * c + digit;
}

long long tuple_count(int alphabet_size, int memory, long long budget) {
  long long count = 1;
  for (int i = 0; i < memory; ++i) {
    if (count > budget / alphabet_size)
      throw std::invalid_argument(
          "tuple_count: " + std::to_string(alphabet_size) + "^" +
          std::to_string(memory) + " tuples exceed the node budget of " +
          std::to_string(budget));
    count *= alphabet_size;
  }
  return count;
}

StationaryGraph build_graph(const Alphabet& alphabet, int memory,
                            long long node_budget) {
  if (memory < 1) throw std::invalid_argument("build_graph: memory must be >= 1");
  const int c = alphabet.size();
  long long count = tuple_count(c, memory, node_budget);
  if (count > node_budget)
    throw std::invalid_argument(
        "build_graph: node budget exceeded (" + std::to_string(c) + "^" +
        std::to_string(memory) + " > " + std::to_string(node_budget) +
        " nodes); raise the budget to proceed");

  StationaryGraph g{alphabet, memory, Digraph(static_cast<int>(count))};
  for (int id = 0; id < g.num_nodes(); ++id)
    for (int d = 0; d < c; ++d) g.graph.add_edge(id, g.shift(id, d));
  return g;
}

namespace {

// Tarjan strongly connected components of the subgraph induced on nodes with
// allowed[v] != 0; self-loops ignored.  Iterative to keep stack depth flat.
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adj, const std::vector<char>& allowed) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(static_cast<size_t>(n), -1);
  std::vector<int> low(static_cast<size_t>(n), 0);
  std::vector<char> on_stack(static_cast<size_t>(n), 0);
  std::vector<int> stack_s;
  std::vector<std::vector<int>> sccs;
  int counter = 0;

  struct Frame {
    int v;
    size_t ei;
  };
  std::vector<Frame> frames;

  for (int root = 0; root < n; ++root) {
    if (!allowed[static_cast<size_t>(root)] || index[static_cast<size_t>(root)] != -1)
      continue;
    frames.push_back({root, 0});
    index[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = counter++;
    stack_s.push_back(root);
    on_stack[static_cast<size_t>(root)] = 1;
    while (!frames.empty()) {
      Frame& fr = frames.back();
      const int v = fr.v;
      if (fr.ei < adj[static_cast<size_t>(v)].size()) {
        const int w = adj[static_cast<size_t>(v)][fr.ei++];
        if (w == v || !allowed[static_cast<size_t>(w)]) continue;
        if (index[static_cast<size_t>(w)] == -1) {
          index[static_cast<size_t>(w)] = low[static_cast<size_t>(w)] = counter++;
          stack_s.push_back(w);
          on_stack[static_cast<size_t>(w)] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[static_cast<size_t>(w)]) {
          low[static_cast<size_t>(v)] =
              std::min(low[static_cast<size_t>(v)], index[static_cast<size_t>(w)]);
        }
      } else {
        if (low[static_cast<size_t>(v)] == index[static_cast<size_t>(v)]) {
          std::vector<int> comp;
          int w;
          do {
            w = stack_s.back();
            stack_s.pop_back();
            on_stack[static_cast<size_t>(w)] = 0;
            comp.push_back(w);
          } while (w != v);
          sccs.push_back(std::move(comp));
        }
        frames.pop_back();
        if (!frames.empty())
          low[static_cast<size_t>(frames.back().v)] = std::min(
              low[static_cast<size_t>(frames.back().v)], low[static_cast<size_t>(v)]);
      }
    }
  }
  return sccs;
}

}  // namespace

std::vector<Cycle> elementary_cycles(const Digraph& graph) {
  const int n = graph.num_nodes;
  std::vector<Cycle> result;

  // Deduplicated adjacency without self-loops; self-loops are emitted
  // directly as length-1 cycles.
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    std::vector<int> nb = graph.adj[static_cast<size_t>(v)];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    for (int w : nb) {
      if (w == v)
        result.push_back(Cycle{{v}});
      else
        adj[static_cast<size_t>(v)].push_back(w);
    }
  }

  std::vector<char> blocked(static_cast<size_t>(n), 0);
  std::vector<std::vector<int>> blocked_by(static_cast<size_t>(n));
  std::vector<char> in_scc(static_cast<size_t>(n), 0);
  std::vector<int> path;

  auto unblock = [&](int v) {
    std::vector<int> work{v};
    while (!work.empty()) {
      const int u = work.back();
      work.pop_back();
      blocked[static_cast<size_t>(u)] = 0;
      for (int w : blocked_by[static_cast<size_t>(u)])
        if (blocked[static_cast<size_t>(w)]) work.push_back(w);
      blocked_by[static_cast<size_t>(u)].clear();
    }
  };

  struct Frame {
    int v;
    size_t ei;
    bool found;
  };
  std::vector<Frame> frames;

  auto circuit = [&](int start) {
    path.clear();
    frames.clear();
    path.push_back(start);
    blocked[static_cast<size_t>(start)] = 1;
    frames.push_back({start, 0, false});
    while (!frames.empty()) {
      Frame& fr = frames.back();
      const int v = fr.v;
      const auto& nb = adj[static_cast<size_t>(v)];
      if (fr.ei < nb.size()) {
        const int w = nb[fr.ei++];
        if (!in_scc[static_cast<size_t>(w)]) continue;
        if (w == start) {
          result.push_back(canonical_rotation(path));
          fr.found = true;
        } else if (!blocked[static_cast<size_t>(w)]) {
          path.push_back(w);
          blocked[static_cast<size_t>(w)] = 1;
          frames.push_back({w, 0, false});
        }
      } else {
        if (fr.found) {
          unblock(v);
        } else {
          for (int w : nb) {
            if (!in_scc[static_cast<size_t>(w)]) continue;
            auto& lst = blocked_by[static_cast<size_t>(w)];
            if (std::find(lst.begin(), lst.end(), v) == lst.end()) lst.push_back(v);
          }
        }
        path.pop_back();
        const bool found = fr.found;
        frames.pop_back();
        if (!frames.empty() && found) frames.back().found = true;
      }
    }
  };

  int s = 0;
  std::vector<char> allowed(static_cast<size_t>(n), 0);
  while (s < n) {
    for (int v = 0; v < n; ++v) allowed[static_cast<size_t>(v)] = v >= s ? 1 : 0;
    auto sccs = strongly_connected_components(adj, allowed);
    // Component containing the least vertex among the non-trivial ones.
    int best = -1, least = std::numeric_limits<int>::max();
    for (size_t k = 0; k < sccs.size(); ++k) {
      if (sccs[k].size() < 2) continue;
      const int m = *std::min_element(sccs[k].begin(), sccs[k].end());
      if (m < least) {
        least = m;
        best = static_cast<int>(k);
      }
    }
    if (best < 0) break;
    std::fill(in_scc.begin(), in_scc.end(), 0);
    for (int v : sccs[static_cast<size_t>(best)]) in_scc[static_cast<size_t>(v)] = 1;
    for (int v : sccs[static_cast<size_t>(best)]) {
      blocked[static_cast<size_t>(v)] = 0;
      blocked_by[static_cast<size_t>(v)].clear();
    }
    circuit(least);
    s = least + 1;
  }

  std::sort(result.begin(), result.end(), [](const Cycle& a, const Cycle& b) {
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
    return a.nodes < b.nodes;
  });
  return result;
}

std::vector<Cycle> prime_cycles(const Alphabet& alphabet, int memory,
                                long long node_budget) {
  if (memory < 1)
    throw std::invalid_argument("prime_cycles: memory must be >= 1");
  // The prime cycles live in the memory-`memory` graph; enforce its budget
  // even though only the (memory-1) graph is enumerated.
  if (tuple_count(alphabet.size(), memory, node_budget) > node_budget)
    throw std::invalid_argument(
        "prime_cycles: node budget exceeded for the memory graph");

  if (memory == 1) {
    StationaryGraph g = build_graph(alphabet, 1, node_budget);
    return elementary_cycles(g.graph);
  }

  const int c = alphabet.size();
  StationaryGraph sub = build_graph(alphabet, memory - 1, node_budget);
  std::vector<Cycle> elem = elementary_cycles(sub.graph);

  std::set<std::vector<int>> seen;
  std::vector<Cycle> primes;
  for (const Cycle& e : elem) {
    const int p = e.period();
    // Periodic value-index sequence: the last component of each node.
    std::vector<int> digits(static_cast<size_t>(p));
    for (int k = 0; k < p; ++k) digits[static_cast<size_t>(k)] = e.nodes[static_cast<size_t>(k)] % c;
    // Slide a length-`memory` window over the periodic extension.
    std::vector<int> nodes(static_cast<size_t>(p));
    for (int k = 0; k < p; ++k) {
      int id = 0;
      for (int j = 0; j < memory; ++j) {
        const int pos = ((k - memory + 1 + j) % p + p) % p;
        id = id * c + digits[static_cast<size_t>(pos)];
      }
      nodes[static_cast<size_t>(k)] = id;
    }
    Cycle prime = canonical_rotation(std::move(nodes));
    if (seen.insert(prime.nodes).second) primes.push_back(std::move(prime));
  }

  std::sort(primes.begin(), primes.end(), [](const Cycle& a, const Cycle& b) {
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
    return a.nodes < b.nodes;
  });
  return primes;
}

int StationaryPmf::num_contexts() const {
  int c = alphabet.size(), count = 1;
  for (int i = 1; i < memory; ++i) count *= c;
  return count;
}

double StationaryPmf::stationarity_gap() const {
  const int c = alphabet.size();
  const int contexts = num_contexts();
  double gap = 0.0;
  for (int z = 0; z < contexts; ++z) {
    double incoming = 0.0, outgoing = 0.0;
    for (int v = 0; v < c; ++v) {
      incoming += probs[v * contexts + z];  // tuple (v, z)
      outgoing += probs[z * c + v];         // tuple (z, v)
    }
    gap = std::max(gap, std::abs(incoming - outgoing));
  }
  return gap;
}

bool StationaryPmf::is_valid(double tol) const {
  if (probs.size() != tuple_count(alphabet.size(), memory,
                                  std::numeric_limits<long long>::max() / 2))
    return false;
  if (probs.minCoeff() < -tol) return false;
  if (std::abs(probs.sum() - 1.0) > tol) return false;
  return stationarity_gap() <= tol;
}

Vector basis_signal(const Cycle& cycle, const StationaryGraph& graph,
                    Eigen::Index horizon) {
  if (horizon < 0) throw std::invalid_argument("basis_signal: negative horizon");
  const int p = cycle.period();
  Vector out(horizon + 1);
  for (Eigen::Index k = 0; k <= horizon; ++k)
    out[k] = graph.last_value(cycle.nodes[static_cast<size_t>(k % p)]);
  return out;
}

StationaryPmf extreme_pmf(const Cycle& cycle, const StationaryGraph& graph) {
  const int p = cycle.period();
  if (p == 0) throw std::invalid_argument("extreme_pmf: empty cycle");
  std::vector<int> sorted = cycle.nodes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("extreme_pmf: cycle repeats a node");
  for (int k = 0; k < p; ++k) {
    const int cur = cycle.nodes[static_cast<size_t>(k)];
    const int next = cycle.nodes[static_cast<size_t>((k + 1) % p)];
    if (cur < 0 || cur >= graph.num_nodes() ||
        graph.shift(cur, next % graph.alphabet.size()) != next)
      throw std::invalid_argument("extreme_pmf: cycle is not a cycle of the graph");
  }
  StationaryPmf pmf{graph.alphabet, graph.memory, Vector::Zero(graph.num_nodes())};
  for (int node : cycle.nodes) pmf.probs[node] = 1.0 / p;
  return pmf;
}

StationaryPmf mix_pmfs(const Vector& gamma,
                       const std::vector<StationaryPmf>& bases) {
  if (bases.empty()) throw std::invalid_argument("mix_pmfs: no bases");
  if (gamma.size() != static_cast<Eigen::Index>(bases.size()))
    throw std::invalid_argument("mix_pmfs: weight/bases size mismatch");
  if (gamma.minCoeff() < -1e-12 || std::abs(gamma.sum() - 1.0) > 1e-10)
    throw std::invalid_argument("mix_pmfs: weights are not on the simplex");

  StationaryPmf out{bases[0].alphabet, bases[0].memory,
                    Vector::Zero(bases[0].probs.size())};
  for (size_t j = 0; j < bases.size(); ++j) {
    if (bases[j].probs.size() != out.probs.size() || bases[j].memory != out.memory)
      throw std::invalid_argument("mix_pmfs: incompatible basis pmfs");
    out.probs += gamma[static_cast<Eigen::Index>(j)] * bases[j].probs;
  }
  return out;
}

Vector BasisInput::signal(Eigen::Index horizon) const {
  if (horizon < 0) throw std::invalid_argument("BasisInput: negative horizon");
  const int c = alphabet.size();
  const int p = period();
  Vector out(horizon + 1);
  for (Eigen::Index k = 0; k <= horizon; ++k)
    out[k] = alphabet.values[static_cast<size_t>(
        prime_cycle.nodes[static_cast<size_t>(k % p)] % c)];
  return out;
}

StationaryPmf BasisInput::uniform_pmf() const {
  const long long count =
      tuple_count(alphabet.size(), memory, std::numeric_limits<long long>::max() / 2);
  StationaryPmf pmf{alphabet, memory, Vector::Zero(static_cast<Eigen::Index>(count))};
  for (int node : prime_cycle.nodes) pmf.probs[node] = 1.0 / period();
  return pmf;
}

std::vector<BasisInput> enumerate_basis_inputs(const Alphabet& alphabet,
                                               int memory,
                                               long long node_budget) {
  std::vector<Cycle> primes = prime_cycles(alphabet, memory, node_budget);
  std::vector<BasisInput> bases;
  bases.reserve(primes.size());
  for (Cycle& cyc : primes) bases.push_back(BasisInput{std::move(cyc), alphabet, memory});
  return bases;
}

std::string format_cycle(const Cycle& cycle, const StationaryGraph& graph) {
  std::string out;
  char buf[64];
  for (size_t k = 0; k < cycle.nodes.size(); ++k) {
    if (k > 0) out += ",";
    out += "(";
    std::vector<double> vals = graph.node_values(cycle.nodes[k]);
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i > 0) out += ",";
      std::snprintf(buf, sizeof(buf), "%g", vals[i]);
      out += buf;
    }
    out += ")";
  }
  return out;
}

}  // namespace optinput
