#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>

#include "phunmix/types.hpp"

namespace phunmix {

struct AudioBuffer {
  RVec samples;  // mono, in [-1, 1] nominally
  double sample_rate = 16000.0;
};

namespace detail {

inline std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (std::uint32_t(b[3]) << 24);
}

inline std::uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

inline void write_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  out.write(b, 2);
}

}  // namespace detail

/// Reads a mono RIFF/WAVE file, PCM 16-bit or IEEE float 32-bit.
inline AudioBuffer read_wav_mono(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open wav: " + path);
  char tag[5] = {0};
  in.read(tag, 4);
  if (std::strncmp(tag, "RIFF", 4) != 0) throw std::runtime_error(path + ": not a RIFF file");
  detail::read_u32(in);  // chunk size
  in.read(tag, 4);
  if (std::strncmp(tag, "WAVE", 4) != 0) throw std::runtime_error(path + ": not a WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::vector<char> data;
  while (in.read(tag, 4)) {
    const std::uint32_t size = detail::read_u32(in);
    if (std::strncmp(tag, "fmt ", 4) == 0) {
      format = detail::read_u16(in);
      channels = detail::read_u16(in);
      rate = detail::read_u32(in);
      detail::read_u32(in);  // byte rate
      detail::read_u16(in);  // block align
      bits = detail::read_u16(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
    } else if (std::strncmp(tag, "data", 4) == 0) {
      data.resize(size);
      in.read(data.data(), size);
    } else {
      in.seekg(size + (size % 2), std::ios::cur);  // chunks are word-aligned
    }
  }
  if (channels != 1) throw std::runtime_error(path + ": only mono files are supported");
  if (data.empty()) throw std::runtime_error(path + ": missing data chunk");

  AudioBuffer buf;
  buf.sample_rate = rate;
  if (format == 1 && bits == 16) {
    const Index n = static_cast<Index>(data.size() / 2);
    buf.samples.resize(n);
    for (Index i = 0; i < n; ++i) {
      std::int16_t v;
      std::memcpy(&v, data.data() + 2 * i, 2);
      buf.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    const Index n = static_cast<Index>(data.size() / 4);
    buf.samples.resize(n);
    for (Index i = 0; i < n; ++i) {
      float v;
      std::memcpy(&v, data.data() + 4 * i, 4);
      buf.samples[i] = static_cast<double>(v);
    }
  } else {
    throw std::runtime_error(path + ": only PCM16 and float32 wav are supported");
  }
  return buf;
}

/// Writes a mono 32-bit float WAVE file.
inline void write_wav_mono(const std::string& path, const RVec& samples, double sample_rate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(samples.size());
  const std::uint32_t data_bytes = 4 * n;
  out.write("RIFF", 4);
  detail::write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  detail::write_u32(out, 16);
  detail::write_u16(out, 3);  // IEEE float
  detail::write_u16(out, 1);  // mono
  detail::write_u32(out, static_cast<std::uint32_t>(sample_rate));
  detail::write_u32(out, static_cast<std::uint32_t>(sample_rate) * 4);
  detail::write_u16(out, 4);
  detail::write_u16(out, 32);
  out.write("data", 4);
  detail::write_u32(out, data_bytes);
  for (Index i = 0; i < samples.size(); ++i) {
    const float v = static_cast<float>(samples[i]);
    char b[4];
    std::memcpy(b, &v, 4);
    out.write(b, 4);
  }
}

}  // namespace phunmix
