#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>

namespace ptz {

/// Anything that can hand out uniform doubles in [0,1) and uniform indices.
template <class R>
concept UniformSource = requires(R r, std::size_t n) {
  { r.uniform() } -> std::convertible_to<double>;
  { r.below(n) } -> std::convertible_to<std::size_t>;
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded 64-bit stream. Bit extraction is done by hand so that draws are
/// identical across standard library implementations.
class Stream {
 public:
  Stream() : Stream(0) {}
  explicit Stream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Independent child stream, e.g. one per sensor.
  static Stream derive(std::uint64_t master, std::uint64_t index) {
    return Stream(splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n). n must be positive.
  std::size_t below(std::size_t n) {
    // Reject the short tail so every residue is equally likely.
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  std::uint64_t next() { return engine_(); }

  friend bool operator==(const Stream&, const Stream&) = default;

 private:
  std::mt19937_64 engine_;
};

static_assert(UniformSource<Stream>);

}  // namespace ptz
