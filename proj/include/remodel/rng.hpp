#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace remodel {

// Self-contained generator so that streams are identical across platforms
// and standard-library versions.
inline std::uint64_t splitmix64_step(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x2545f4914f6cdd1dull) {}

  std::uint64_t next() { return splitmix64_step(state_); }

  // Uniform in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  int index(std::size_t n) { return static_cast<int>(below(n)); }

  bool coin() { return (next() & 1u) != 0; }

  double unit() {
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
  }

  // Fisher-Yates prefix: after the call, v[0..k) is a uniform k-subset.
  template <typename T>
  void shuffle_prefix(std::vector<T>& v, std::size_t k) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t hash64(const std::string& s, std::uint64_t seed = 14695981039346656037ull) {
  std::uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Deterministic per-trial seed stream derived from a master seed and a label.
inline std::uint64_t derive_seed(std::uint64_t master, const std::string& label) {
  std::uint64_t h = hash64(label, master ^ 0x9e3779b97f4a7c15ull);
  splitmix64_step(h);
  return h;
}

}  // namespace remodel
