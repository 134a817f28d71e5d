#pragma once

#include <vector>

#include "phunmix/registry.hpp"
#include "phunmix/stft.hpp"

namespace phunmix {

/// Per-channel-per-source mixing description: a broadband gain in dB and an
/// integer delay in samples, turned into one M x K complex matrix per
/// frequency bin.
struct MixSpec {
  RMat gains_db;  // M x K
  IMat delays;    // M x K, samples

  Index channels() const { return gains_db.rows(); }
  Index sources() const { return gains_db.cols(); }
};

inline void validate_mix_spec(const MixSpec& mix) {
  if (mix.gains_db.rows() != mix.delays.rows() || mix.gains_db.cols() != mix.delays.cols())
    throw std::invalid_argument("mix spec: gain/delay shape mismatch");
  if (mix.gains_db.rows() < 1 || mix.gains_db.cols() < 1)
    throw std::invalid_argument("mix spec: empty");
}

/// A_f(m, k) = 10^(g(m,k)/20) * exp(j tau(m,k) f / F) for f = 0..F-1.
inline CMat mixing_matrix(const MixSpec& mix, Index f, Index bins) {
  validate_mix_spec(mix);
  if (f < 0 || f >= bins) throw std::invalid_argument("mixing_matrix: bin index out of range");
  CMat a(mix.channels(), mix.sources());
  for (Index m = 0; m < mix.channels(); ++m) {
    for (Index k = 0; k < mix.sources(); ++k) {
      const double gain = std::pow(10.0, mix.gains_db(m, k) / 20.0);
      const double phase = static_cast<double>(mix.delays(m, k)) * static_cast<double>(f) /
                           static_cast<double>(bins);
      a(m, k) = gain * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return a;
}

/// Worst singular-value ratio of A_f over all bins.
inline double mix_spec_conditioning(const MixSpec& mix, Index bins) {
  double worst = std::numeric_limits<double>::infinity();
  for (Index f = 0; f < bins; ++f)
    worst = std::min(worst, singular_value_ratio(mixing_matrix(mix, f, bins)));
  return worst;
}

/// Draws gains uniformly from [-5, +5] dB and delays uniformly from
/// {0, ..., 50} samples, redrawing until every per-bin matrix is
/// comfortably full rank.
inline MixSpec generate_mix_spec(Index m, Index k, Index bins, SplitMix64& rng) {
  if (m < 1 || k < 1) throw std::invalid_argument("generate_mix_spec: need M, K >= 1");
  MixSpec mix;
  mix.gains_db.resize(m, k);
  mix.delays.resize(m, k);
  do {
    for (Index r = 0; r < m; ++r) {
      for (Index c = 0; c < k; ++c) {
        mix.gains_db(r, c) = -5.0 + 10.0 * rng.next_double();
        mix.delays(r, c) = static_cast<int>(rng.next() % 51);
      }
    }
  } while (mix_spec_conditioning(mix, bins) <= 1e-6);
  return mix;
}

using Spectrogram = CMat;  // F bins x T frames

/// Applies y(f, t) = A_f s(f, t) bin by bin.
inline std::vector<Spectrogram> mix_stft(const std::vector<Spectrogram>& sources,
                                         const MixSpec& mix) {
  validate_mix_spec(mix);
  if (static_cast<Index>(sources.size()) != mix.sources())
    throw std::invalid_argument("mix_stft: source count mismatch");
  const Index bins = sources.front().rows();
  const Index frames = sources.front().cols();
  for (const Spectrogram& s : sources)
    if (s.rows() != bins || s.cols() != frames)
      throw std::invalid_argument("mix_stft: spectrogram shapes differ");

  std::vector<Spectrogram> out(mix.channels(), Spectrogram::Zero(bins, frames));
  for (Index f = 0; f < bins; ++f) {
    const CMat a = mixing_matrix(mix, f, bins);
    for (Index t = 0; t < frames; ++t) {
      CVec s(mix.sources());
      for (Index k = 0; k < mix.sources(); ++k) s[k] = sources[k](f, t);
      const CVec y = a * s;
      for (Index m = 0; m < mix.channels(); ++m) out[m](f, t) = y[m];
    }
  }
  return out;
}

struct SeparateOptions {
  double threshold_db = -40.0;  // skip rule, relative to each source's peak
  SolverOptions solver;
};

/// Per-bin informed separation. Sources whose magnitude falls below
/// threshold_db of their own spectrogram peak are excluded from the solve
/// and given a random phase; the remaining sub-problem (columns of A_f for
/// the active set, observed bin vector, active magnitudes) goes to the
/// named solver. Output magnitudes always equal the given ones.
///
/// Mixtures here carry no additive noise, so the Wiener solvers get a tiny
/// ridge derived from the bin's observation energy unless the caller set
/// SolverOptions::sigma_n explicitly.
inline std::vector<Spectrogram> separate(const std::vector<Spectrogram>& mixture,
                                         const MixSpec& mix,
                                         const std::vector<Spectrogram>& magnitudes,
                                         const std::string& solver_name, std::uint64_t seed,
                                         const SeparateOptions& opts = {}) {
  validate_mix_spec(mix);
  if (!is_valid_solver(solver_name))
    throw std::invalid_argument("separate: unknown solver " + solver_name);
  if (static_cast<Index>(mixture.size()) != mix.channels() ||
      static_cast<Index>(magnitudes.size()) != mix.sources())
    throw std::invalid_argument("separate: channel/source count mismatch");
  const Index bins = mixture.front().rows();
  const Index frames = mixture.front().cols();
  const Index n_src = mix.sources();

  RVec peak(n_src);
  for (Index k = 0; k < n_src; ++k) {
    if (magnitudes[k].rows() != bins || magnitudes[k].cols() != frames)
      throw std::invalid_argument("separate: magnitude spectrogram shape mismatch");
    peak[k] = magnitudes[k].cwiseAbs().maxCoeff();
  }
  const double rel_thresh = std::pow(10.0, opts.threshold_db / 20.0);

  std::vector<Spectrogram> out(n_src, Spectrogram::Zero(bins, frames));
  std::vector<CMat> a_f(bins);
  for (Index f = 0; f < bins; ++f) a_f[f] = mixing_matrix(mix, f, bins);

  for (Index f = 0; f < bins; ++f) {
    for (Index t = 0; t < frames; ++t) {
      SplitMix64 bin_rng(mix_seed(mix_seed(seed, static_cast<std::uint64_t>(f)),
                                  static_cast<std::uint64_t>(t)));
      std::vector<Index> active;
      for (Index k = 0; k < n_src; ++k) {
        const double mag = std::abs(magnitudes[k](f, t));
        if (mag > 0.0 && mag >= rel_thresh * peak[k]) {
          active.push_back(k);
        } else {
          const double theta = 2.0 * std::numbers::pi * bin_rng.next_double();
          out[k](f, t) = mag * Complex(std::cos(theta), std::sin(theta));
        }
      }
      if (active.empty()) continue;

      Instance sub;
      sub.mixing.resize(mix.channels(), static_cast<Index>(active.size()));
      sub.magnitudes.resize(static_cast<Index>(active.size()));
      for (std::size_t j = 0; j < active.size(); ++j) {
        sub.mixing.col(static_cast<Index>(j)) = a_f[f].col(active[j]);
        sub.magnitudes[static_cast<Index>(j)] = std::abs(magnitudes[active[j]](f, t));
      }
      sub.observation.resize(mix.channels());
      for (Index m = 0; m < mix.channels(); ++m) sub.observation[m] = mixture[m](f, t);

      SolverOptions solver_opts = opts.solver;
      if (!solver_opts.sigma_n)
        solver_opts.sigma_n = 1e-7 * (sub.observation.norm() + sub.magnitudes.norm() + 1e-30);
      const SolverResult res = solve_by_name(solver_name, sub, bin_rng, solver_opts);
      for (std::size_t j = 0; j < active.size(); ++j)
        out[active[j]](f, t) = res.estimate[static_cast<Index>(j)];
    }
  }
  return out;
}

/// Plain energy-ratio signal-to-distortion measure, capped at +100 dB.
inline double sdr(const RVec& estimate, const RVec& reference) {
  if (estimate.size() != reference.size()) throw std::invalid_argument("sdr: length mismatch");
  const double ref = reference.squaredNorm();
  if (ref == 0.0) throw std::invalid_argument("sdr: zero reference");
  const double err = (reference - estimate).squaredNorm();
  if (err == 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(ref / err));
}

}  // namespace phunmix
