#ifndef OPTINPUT_RNG_HPP
#define OPTINPUT_RNG_HPP

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>

namespace optinput {

/// SplitMix64 finalizer; used to derive independent seeds from (seed, path).
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic sub-stream seed for a (seed, index path) pair, e.g.
/// derive_seed(seed, {iteration, basis, replication}).  Distinct paths give
/// statistically independent streams.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p));
  return h;
}

/// Random number stream with explicit sampling algorithms so that output is
/// bit-reproducible for a fixed seed, independent of the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform on {0, ..., n-1}.
  int uniform_int(int n) {
    return static_cast<int>(uniform() * static_cast<double>(n));
  }

  /// Standard normal via Box-Muller; no cached spare, one value per call.
  double normal() {
    // u1 in (0, 1] so the log is finite.
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
};

/// Draw an index from a probability vector (entries nonnegative, summing to
/// roughly 1); linear scan, suitable for small supports.
inline int sample_categorical(const Eigen::VectorXd& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  const Eigen::Index n = probs.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  // Rounding pushed the cumulative sum below u; return the last positive entry.
  for (Eigen::Index i = n - 1; i >= 0; --i)
    if (probs[i] > 0.0) return static_cast<int>(i);
  throw std::invalid_argument("sample_categorical: all probabilities are zero");
}

}  // namespace optinput

#endif  // OPTINPUT_RNG_HPP
