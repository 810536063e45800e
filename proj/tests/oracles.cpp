#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace oracles {

using optinput::Alphabet;
using optinput::Criterion;
using optinput::Cycle;
using optinput::Digraph;
using optinput::Matrix;
using optinput::Vector;

std::vector<Cycle> brute_force_cycles(const Digraph& graph) {
  const int n = graph.num_nodes;
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    std::set<int> uniq(graph.adj[static_cast<size_t>(v)].begin(),
                       graph.adj[static_cast<size_t>(v)].end());
    adj[static_cast<size_t>(v)].assign(uniq.begin(), uniq.end());
  }

  std::vector<Cycle> out;
  std::vector<int> path;
  std::vector<char> on_path(static_cast<size_t>(n), 0);
  // Each cycle is reported exactly once: rooted at its smallest node, so the
  // DFS may only walk nodes larger than the root.
  std::function<void(int, int)> dfs = [&](int root, int v) {
    for (int w : adj[static_cast<size_t>(v)]) {
      if (w == root) {
        out.push_back(Cycle{path});
      } else if (w > root && !on_path[static_cast<size_t>(w)]) {
        on_path[static_cast<size_t>(w)] = 1;
        path.push_back(w);
        dfs(root, w);
        path.pop_back();
        on_path[static_cast<size_t>(w)] = 0;
      }
    }
  };
  for (int root = 0; root < n; ++root) {
    path.assign(1, root);
    std::fill(on_path.begin(), on_path.end(), 0);
    on_path[static_cast<size_t>(root)] = 1;
    dfs(root, root);
  }

  std::sort(out.begin(), out.end(), [](const Cycle& a, const Cycle& b) {
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
    return a.nodes < b.nodes;
  });
  return out;
}

std::vector<Cycle> windowed_prime_cycles(const Alphabet& alphabet, int memory) {
  const int c = alphabet.size();
  if (memory < 1) throw std::invalid_argument("memory must be >= 1");

  if (memory == 1) {
    // The memory-1 graph is complete with self-loops and its node ids are
    // the values themselves; its elementary cycles are the prime cycles.
    Digraph vg(c);
    for (int a = 0; a < c; ++a)
      for (int b = 0; b < c; ++b) vg.add_edge(a, b);
    return brute_force_cycles(vg);
  }

  // Tuples of length memory-1, enumerated odometer-style; ids assigned by
  // lexicographic order.
  const int tuple_len = memory - 1;
  std::vector<std::vector<int>> tuples;
  std::vector<int> digits(static_cast<size_t>(tuple_len), 0);
  while (true) {
    tuples.push_back(digits);
    int pos = tuple_len - 1;
    while (pos >= 0 && ++digits[static_cast<size_t>(pos)] == c) {
      digits[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  std::map<std::vector<int>, int> id_of;
  for (size_t i = 0; i < tuples.size(); ++i)
    id_of[tuples[i]] = static_cast<int>(i);

  Digraph g(static_cast<int>(tuples.size()));
  // Successor tuple: drop the oldest element, append the new value.
  for (size_t i = 0; i < tuples.size(); ++i)
    for (int v = 0; v < c; ++v) {
      std::vector<int> next(tuples[i].begin() + (tuple_len > 0 ? 1 : 0),
                            tuples[i].end());
      if (tuple_len > 0) next.push_back(v);
      g.add_edge(static_cast<int>(i), id_of.at(next));
    }

  // Value sequence around a cycle: the element shifted in when entering each
  // node is that node's last tuple component.
  std::set<std::vector<int>> seen;
  std::vector<Cycle> primes;
  auto emit = [&](const std::vector<int>& value_cycle) {
    const int p = static_cast<int>(value_cycle.size());
    std::vector<int> ids(static_cast<size_t>(p));
    for (int k = 0; k < p; ++k) {
      int id = 0;
      for (int j = 0; j < memory; ++j) {
        const int pos = ((k - memory + 1 + j) % p + p) % p;
        id = id * c + value_cycle[static_cast<size_t>(pos)];
      }
      ids[static_cast<size_t>(k)] = id;
    }
    const Cycle canon = optinput::canonical_rotation(ids);
    if (seen.insert(canon.nodes).second) primes.push_back(canon);
  };

  for (const Cycle& cyc : brute_force_cycles(g)) {
    std::vector<int> values;
    const int p = cyc.period();
    for (int k = 0; k < p; ++k)
      values.push_back(
          tuples[static_cast<size_t>(cyc.nodes[static_cast<size_t>(k)])].back());
    emit(values);
  }

  std::sort(primes.begin(), primes.end(), [](const Cycle& a, const Cycle& b) {
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
    return a.nodes < b.nodes;
  });
  return primes;
}

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x) {
  Vector grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    Vector hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    grad[i] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return grad;
}

double objective_2x2(const Matrix& s, Criterion crit) {
  const double a = s(0, 0), b = s(0, 1), d = s(1, 1);
  const double det = a * d - b * b;
  if (a <= 0.0 || det <= 0.0) return -std::numeric_limits<double>::infinity();
  return crit == Criterion::kDOpt ? std::log(det) : -(a + d) / det;
}

double grid_search_best(const std::vector<Matrix>& fims, Criterion crit,
                        double step) {
  const auto n = fims.size();
  if (n != 2 && n != 3)
    throw std::invalid_argument("grid_search_best: 2 or 3 weights only");
  const int s = static_cast<int>(std::lround(1.0 / step));
  double best = -std::numeric_limits<double>::infinity();
  auto at = [&](double g0, double g1, double g2) {
    Matrix m = g0 * fims[0] + g1 * fims[1];
    if (n == 3) m += g2 * fims[2];
    best = std::max(best, objective_2x2(m, crit));
  };
  if (n == 2) {
    for (int i = 0; i <= s; ++i) {
      const double g = static_cast<double>(i) / s;
      at(g, 1.0 - g, 0.0);
    }
  } else {
    for (int i = 0; i <= s; ++i)
      for (int j = 0; j <= s - i; ++j) {
        const double g0 = static_cast<double>(i) / s;
        const double g1 = static_cast<double>(j) / s;
        at(g0, g1, 1.0 - g0 - g1);
      }
  }
  return best;
}

}  // namespace oracles
