#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace qadd::rng {

// SplitMix64 step (Vigna 2015). Advances `state` and returns a mixed word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic substream derivation: absorb each index into a SplitMix64
// chain. derive(master, {a, b}) != derive(master, {b, a}) in general, and the
// mapping is stable across runs and platforms. All seeded streams in this
// project (per realization, per qubit, per sigma point) go through here.
inline std::uint64_t derive(std::uint64_t master,
                            std::initializer_list<std::uint64_t> indices) {
  std::uint64_t s = master;
  std::uint64_t out = splitmix64(s);
  for (std::uint64_t ix : indices) {
    s ^= ix;
    out = splitmix64(s);
  }
  return out;
}

// Seeded Gaussian stream. std::normal_distribution is implementation-defined,
// so the Box-Muller transform is spelled out explicitly: given the same seed,
// the stream is bit-identical wherever mt19937_64 and libm agree.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  // uniform in [0, 1), 53 significant bits
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qadd::rng
