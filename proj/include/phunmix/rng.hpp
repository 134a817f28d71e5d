#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "phunmix/types.hpp"

namespace phunmix {

/// SplitMix64 (Steele, Lea & Flood). Chosen over std:: engines because the
/// whole stream, not just the seed, must be reproducible across platforms
/// and library versions for the benchmark CSVs to be byte-stable.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; usable as a log() argument.
  double next_double_open() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Folds `v` into seed `h` with one SplitMix64 scrambling round. All derived
/// streams (per trial, per start, per time-frequency bin) go through this so
/// results are independent of scheduling. Constants are documented in the
/// README for reimplementation.
inline std::uint64_t mix_seed(std::uint64_t h, std::uint64_t v) {
  std::uint64_t z = h ^ v;
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Canonical 64-bit encoding of a double for seed derivation.
inline std::uint64_t seed_bits(double x) { return std::bit_cast<std::uint64_t>(x); }

/// One draw from the circular complex Gaussian CN(0, sigma^2): E|z|^2 =
/// sigma^2, real and imaginary parts independent with variance sigma^2 / 2.
inline Complex complex_gaussian(double sigma, SplitMix64& rng) {
  const double u1 = rng.next_double_open();
  const double u2 = rng.next_double();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (sigma / std::numbers::sqrt2) *
         Complex(radius * std::cos(angle), radius * std::sin(angle));
}

inline CVec sample_complex_gaussian(double sigma, Index count, SplitMix64& rng) {
  if (sigma < 0.0 || !std::isfinite(sigma))
    throw std::invalid_argument("sample_complex_gaussian: sigma must be finite and >= 0");
  if (count < 0) throw std::invalid_argument("sample_complex_gaussian: negative count");
  CVec out(count);
  for (Index k = 0; k < count; ++k) out[k] = complex_gaussian(sigma, rng);
  return out;
}

}  // namespace phunmix
