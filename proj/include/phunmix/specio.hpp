#pragma once

#include <bit>
#include <cstring>
#include <fstream>

#include "phunmix/types.hpp"

namespace phunmix {

/// Spectrogram dump: 16-byte header (magic "PHUNSPEC", u32 F, u32 T, little
/// endian) followed by F*T row-major complex entries as interleaved
/// little-endian 64-bit floats (re, im).
inline constexpr char kSpecMagic[8] = {'P', 'H', 'U', 'N', 'S', 'P', 'E', 'C'};

inline void write_spectrogram(const std::string& path, const CMat& spec) {
  static_assert(std::endian::native == std::endian::little,
                "spectrogram dump assumes a little-endian host");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kSpecMagic, 8);
  const std::uint32_t f = static_cast<std::uint32_t>(spec.rows());
  const std::uint32_t t = static_cast<std::uint32_t>(spec.cols());
  out.write(reinterpret_cast<const char*>(&f), 4);
  out.write(reinterpret_cast<const char*>(&t), 4);
  for (Index r = 0; r < spec.rows(); ++r) {
    for (Index c = 0; c < spec.cols(); ++c) {
      const double re = spec(r, c).real();
      const double im = spec(r, c).imag();
      out.write(reinterpret_cast<const char*>(&re), 8);
      out.write(reinterpret_cast<const char*>(&im), 8);
    }
  }
}

inline CMat read_spectrogram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kSpecMagic, 8) != 0)
    throw std::runtime_error(path + ": bad spectrogram magic");
  std::uint32_t f = 0, t = 0;
  in.read(reinterpret_cast<char*>(&f), 4);
  in.read(reinterpret_cast<char*>(&t), 4);
  CMat spec(f, t);
  for (std::uint32_t r = 0; r < f; ++r) {
    for (std::uint32_t c = 0; c < t; ++c) {
      double re, im;
      in.read(reinterpret_cast<char*>(&re), 8);
      in.read(reinterpret_cast<char*>(&im), 8);
      spec(r, c) = Complex(re, im);
    }
  }
  if (!in) throw std::runtime_error(path + ": truncated spectrogram file");
  return spec;
}

}  // namespace phunmix
