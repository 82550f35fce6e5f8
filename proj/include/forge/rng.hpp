#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace forge {

// Deterministic random source. The engine (std::mt19937_64) is fully
// specified by the standard; the bounded draws below are implemented here
// because the std distributions are not portable across libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be >= 1.
  std::size_t index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit =
        std::uint64_t(-1) - std::uint64_t(-1) % bound;
    std::uint64_t draw;
    do {
      draw = next();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % bound);
  }

  // Uniform integer in [lo, hi], inclusive.
  long long integer(long long lo, long long hi) {
    return lo + static_cast<long long>(
                    index(static_cast<std::size_t>(hi - lo + 1)));
  }

  // Uniform in [0, 1).
  double real() { return static_cast<double>(next() >> 11) * 0x1p-53; }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

  template <class T>
  const T& pick(const std::vector<T>& items) {
    return items[index(items.size())];
  }

  // Stable per-item sub-seed: FNV-1a over the tags folded into the base seed,
  // finalized with a splitmix64 round so nearby seeds diverge.
  static std::uint64_t mix(std::uint64_t seed, std::string_view a,
                           std::string_view b = {}) {
    std::uint64_t h = 1469598103934665603ull ^ seed;
    auto eat = [&h](std::string_view s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
      }
      h ^= 0x1f;
      h *= 1099511628211ull;
    };
    eat(a);
    eat(b);
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace forge
