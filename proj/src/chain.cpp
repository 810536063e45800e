#include "optinput/chain.hpp"

#include <stdexcept>
#include <vector>

#include "optinput/rng.hpp"

namespace optinput {
namespace {

// Tarjan over the support of the pmf restricted to shift edges with positive
// conditional probability; iterative to keep large graphs off the call stack.
bool support_is_irreducible(const StationaryPmf& pmf, const Matrix& transition) {
  const int c = pmf.alphabet.size();
  const int contexts = pmf.num_contexts();
  const auto n = static_cast<int>(pmf.probs.size());

  std::vector<int> support;
  std::vector<char> in_support(static_cast<size_t>(n), 0);
  for (int id = 0; id < n; ++id)
    if (pmf.probs[id] > 0.0) {
      support.push_back(id);
      in_support[static_cast<size_t>(id)] = 1;
    }
  if (support.empty()) return false;

  // Support-restricted shift edges, forward and reversed.  The context of a
  // node's successors is its newest memory-1 digits, i.e. id mod contexts.
  std::vector<std::vector<int>> fwd(static_cast<size_t>(n)), rev(static_cast<size_t>(n));
  for (int id : support) {
    const int z = id % contexts;
    for (int v = 0; v < c; ++v) {
      const int next = z * c + v;
      if (transition(z, v) > 0.0 && in_support[static_cast<size_t>(next)]) {
        fwd[static_cast<size_t>(id)].push_back(next);
        rev[static_cast<size_t>(next)].push_back(id);
      }
    }
  }

  // A DFS from any support node must reach all of the support, and likewise
  // over reversed edges; together that is exactly one communicating class.
  auto reaches_all = [&](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<int> stack{support.front()};
    seen[static_cast<size_t>(support.front())] = 1;
    int count = 0;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      ++count;
      for (int w : adj[static_cast<size_t>(v)])
        if (!seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = 1;
          stack.push_back(w);
        }
    }
    return count == static_cast<int>(support.size());
  };
  return reaches_all(fwd) && reaches_all(rev);
}

}  // namespace

MarkovChain build_chain(const StationaryPmf& pmf, double tol) {
  if (!pmf.is_valid(tol))
    throw std::invalid_argument(
        "build_chain: pmf is not a stationary distribution (simplex or "
        "marginal condition violated)");

  const int c = pmf.alphabet.size();
  const int contexts = pmf.num_contexts();

  MarkovChain chain{pmf, Matrix(), true};
  chain.transition.resize(contexts, c);
  for (int z = 0; z < contexts; ++z) {
    double marginal = 0.0;
    for (int v = 0; v < c; ++v) marginal += std::max(pmf.probs[z * c + v], 0.0);
    if (marginal > 0.0) {
      for (int v = 0; v < c; ++v)
        chain.transition(z, v) = std::max(pmf.probs[z * c + v], 0.0) / marginal;
    } else {
      chain.transition.row(z).setConstant(1.0 / static_cast<double>(c));
    }
  }
  chain.irreducible = support_is_irreducible(pmf, chain.transition);
  return chain;
}

Matrix node_transition_matrix(const MarkovChain& chain) {
  const int c = chain.pmf.alphabet.size();
  const int contexts = chain.pmf.num_contexts();
  const auto n = static_cast<Eigen::Index>(chain.pmf.probs.size());
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index id = 0; id < n; ++id) {
    const int z = static_cast<int>(id) % contexts;
    for (int v = 0; v < c; ++v) p(id, z * c + v) = chain.transition(z, v);
  }
  return p;
}

Vector sample_input(const MarkovChain& chain, Eigen::Index length,
                    long long burn_in, std::uint64_t seed) {
  if (length < 0) throw std::invalid_argument("sample_input: negative length");
  if (burn_in < 0) throw std::invalid_argument("sample_input: negative burn-in");

  const int c = chain.pmf.alphabet.size();
  const int contexts = chain.pmf.num_contexts();
  Rng rng(seed);

  int node = static_cast<int>(sample_categorical(chain.pmf.probs, rng));
  auto step = [&](int id) {
    const int z = id % contexts;
    const int v =
        static_cast<int>(sample_categorical(chain.transition.row(z).transpose(), rng));
    return z * c + v;
  };
  for (long long t = 0; t < burn_in; ++t) node = step(node);

  Vector out(length);
  for (Eigen::Index t = 0; t < length; ++t) {
    node = step(node);
    out[t] = chain.pmf.alphabet.values[static_cast<size_t>(node % c)];
  }
  return out;
}

}  // namespace optinput
