#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace gmf {

/// Portable deterministic random stream: xoshiro256++ seeded through
/// splitmix64. Every draw is specified exactly so that independent
/// implementations can reproduce the same sequences:
///   - u64:      one xoshiro256++ step
///   - double:   (u64 >> 11) * 2^-53, uniform in [0,1)
///   - int n:    floor(double * n)
///   - gaussian: Box-Muller, z = sqrt(-2 ln(1-u1)) * cos(2*pi*u2),
///               consuming exactly two uniform doubles (no cached spare)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    ++draws_;
    return result;
  }

  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  int next_int(int n) { return static_cast<int>(next_double() * n); }

  double next_gaussian() {
    const double u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t draws() const { return draws_; }
  std::array<std::uint64_t, 4> state() const { return state_; }
  void set_state(const std::array<std::uint64_t, 4>& s, std::uint64_t draws) {
    state_ = s;
    draws_ = draws;
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t draws_ = 0;
};

}  // namespace gmf
