#pragma once

#include <unsupported/Eigen/FFT>

#include <string>

#include "phunmix/types.hpp"

namespace phunmix {

enum class Window { Hann, Rect };

inline Window window_from_name(const std::string& name) {
  if (name == "hann") return Window::Hann;
  if (name == "rect") return Window::Rect;
  throw std::invalid_argument("unknown window: " + name);
}

/// Analysis framing. The defaults (16 kHz, 1024-sample periodic Hann, 50%
/// overlap) give 64 ms frames with F = 512 positive-frequency rows.
struct StftConfig {
  double sample_rate = 16000.0;
  Index window_len = 1024;
  Index hop = 512;
  Window window = Window::Hann;

  Index bins() const { return window_len / 2; }
};

/// Periodic window samples; periodic Hann sums to exactly 1 across 50%
/// overlaps, which is what makes the inverse transform exact.
inline RVec make_window(Window w, Index n) {
  RVec out(n);
  switch (w) {
    case Window::Hann:
      for (Index i = 0; i < n; ++i)
        out[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
      break;
    case Window::Rect:
      out.setOnes();
      break;
  }
  return out;
}

/// Max deviation of the overlapped window sum from a constant over one
/// period; 0 (to rounding) for windows satisfying constant overlap-add.
inline double cola_deviation(const StftConfig& cfg) {
  const RVec w = make_window(cfg.window, cfg.window_len);
  RVec acc = RVec::Zero(cfg.hop);
  for (Index i = 0; i < cfg.hop; ++i)
    for (Index j = i; j < cfg.window_len; j += cfg.hop) acc[i] += w[j];
  return (acc.array() - acc[0]).abs().maxCoeff();
}

inline void validate_stft_config(const StftConfig& cfg) {
  if (cfg.window_len < 2 || cfg.window_len % 2 != 0)
    throw std::invalid_argument("stft: window_len must be even and >= 2");
  if (cfg.hop < 1 || cfg.window_len % cfg.hop != 0)
    throw std::invalid_argument("stft: hop must divide window_len");
  if (cola_deviation(cfg) > 1e-10)
    throw std::invalid_argument("stft: window does not satisfy overlap-add at this hop");
}

/// Forward transform: Hann-windowed frames every `hop` samples, keeping
/// F = window_len/2 rows. The real-valued Nyquist coefficient is packed
/// into the imaginary part of the (also real) DC row, so the spectrogram
/// is exactly F x T complex and the transform stays invertible.
inline CMat stft(const RVec& signal, const StftConfig& cfg) {
  validate_stft_config(cfg);
  const Index n = cfg.window_len;
  if (signal.size() < n) throw std::invalid_argument("stft: signal shorter than one window");
  const Index frames = (signal.size() - n) / cfg.hop + 1;
  const RVec w = make_window(cfg.window, n);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  CMat spec(cfg.bins(), frames);
  Eigen::VectorXd frame(n);
  Eigen::VectorXcd full(n / 2 + 1);
  for (Index t = 0; t < frames; ++t) {
    frame = signal.segment(t * cfg.hop, n).cwiseProduct(w);
    fft.fwd(full, frame);  // half spectrum: bins 0..n/2
    spec.col(t) = full.head(cfg.bins());
    spec(0, t) = Complex(full[0].real(), full[n / 2].real());
  }
  return spec;
}

/// Weighted overlap-add inverse: each frame is inverse-transformed,
/// multiplied by the synthesis window (same as analysis), accumulated at
/// the hops, and normalized by the accumulated squared-window profile.
/// Unmodified spectra reconstruct exactly wherever the profile is nonzero;
/// modified spectra (the separation case) stay bounded because the
/// synthesis window tapers frame boundaries instead of the normalization
/// amplifying them. Output length is (T-1)*hop + window_len.
inline RVec istft(const CMat& spec, const StftConfig& cfg) {
  validate_stft_config(cfg);
  const Index n = cfg.window_len;
  if (spec.rows() != cfg.bins()) throw std::invalid_argument("istft: bin count mismatch");
  const Index frames = spec.cols();
  const Index out_len = (frames - 1) * cfg.hop + n;
  const RVec w = make_window(cfg.window, n);
  const RVec w2 = w.cwiseProduct(w);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  RVec out = RVec::Zero(out_len);
  RVec weight = RVec::Zero(out_len);
  Eigen::VectorXcd full(n / 2 + 1);
  Eigen::VectorXd frame(n);
  for (Index t = 0; t < frames; ++t) {
    full.head(cfg.bins()) = spec.col(t);
    full[0] = Complex(spec(0, t).real(), 0.0);
    full[n / 2] = Complex(spec(0, t).imag(), 0.0);
    fft.inv(frame, full);
    out.segment(t * cfg.hop, n) += frame.cwiseProduct(w);
    weight.segment(t * cfg.hop, n) += w2;
  }
  // Clamping the denominator keeps fully covered samples exact while the
  // partially covered boundary half-windows fade out instead of dividing
  // by a vanishing window tail.
  const double clamp = 0.25 * weight.maxCoeff();
  for (Index i = 0; i < out_len; ++i) out[i] /= std::max(weight[i], clamp);
  return out;
}

}  // namespace phunmix
