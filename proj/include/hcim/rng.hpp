// rng.hpp -- deterministic, platform-independent random streams.
//
// Every random draw in the simulator flows through RngStream so a run is
// reproducible bit-for-bit from one master seed.  Independent jobs get
// independent streams derived by mixing the master seed with a path of
// integer ids (hmu index, analog group ordinal, image id, layer id, ...).
// Derivation is order-free: results do not depend on evaluation order or
// thread count.
//
// std::normal_distribution is not bit-portable across standard libraries,
// so the Gaussian uses an explicit Box-Muller transform over splitmix64
// output.
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace hcim {

inline constexpr uint64_t kGolden64 = 0x9e3779b97f4a7c15ull;

// Finalizer from the splitmix64 reference implementation.
constexpr uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t splitmix64(uint64_t& state) {
  state += kGolden64;
  return mix64(state);
}

class RngStream {
 public:
  RngStream() : state_(0) {}
  explicit RngStream(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal, one value per call.  u1 is kept in (0, 1] so the log
  // never sees zero.  The sine twin of the Box-Muller pair is discarded;
  // wasting one uniform keeps the stream stateless and portable.
  double next_gaussian() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [lo, hi], inclusive.  Modulo bias at these range
  // sizes (< 2^32) is far below anything the tests can resolve.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(next_u64() % range);
  }

 private:
  uint64_t state_;
};

// Derive an independent stream from a master seed and an id path.
inline RngStream derive_stream(uint64_t master,
                               std::initializer_list<uint64_t> path) {
  uint64_t s = mix64(master + kGolden64);
  for (uint64_t id : path) {
    s = mix64(s + kGolden64) ^ mix64(id * kGolden64 + 0x517cc1b727220a95ull);
  }
  return RngStream(s);
}

}  // namespace hcim
