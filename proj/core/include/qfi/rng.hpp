#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace qfi {

__extension__ using uint128 = unsigned __int128;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: the stream for (seed, index) is a pure function
/// of those two numbers, so draws do not depend on evaluation order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t index) noexcept
      : key_(splitmix64(seed ^ splitmix64(index ^ 0x6a09e667f3bcc909ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform in (0, 1].
  double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

  /// Uniform integer in [0, n) by 128-bit multiply-shift.
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<uint128>((*this)()) * n) >> 64);
  }

  /// Standard normal pair by Box–Muller; written out so results do not depend
  /// on the standard library's distribution implementation.
  void normal_pair(double& a, double& b) noexcept {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    a = r * std::cos(phi);
    b = r * std::sin(phi);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qfi
