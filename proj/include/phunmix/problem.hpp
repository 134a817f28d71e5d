#pragma once

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "phunmix/rng.hpp"
#include "phunmix/types.hpp"

namespace phunmix {

/// One phase-unmixing problem: recover the phases of K complex sources from
/// an M-channel mixture y = A s0 + n, given A and the magnitudes b = |s0|.
struct Instance {
  CMat mixing;       // M x K, full rank
  CVec observation;  // length M
  RVec magnitudes;   // length K, strictly positive
  std::optional<CVec> ground_truth;
  std::optional<CVec> noise;
  std::optional<double> noise_stddev;

  Index channels() const { return mixing.rows(); }
  Index sources() const { return mixing.cols(); }
};

/// sigma_min / sigma_max of a matrix; 0 for an all-zero matrix.
inline double singular_value_ratio(const CMat& a) {
  Eigen::JacobiSVD<CMat> svd(a);
  const RVec& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0.0;
  return sv[sv.size() - 1] / sv[0];
}

inline constexpr double kRankTol = 1e-12;

inline void validate_instance(const Instance& inst) {
  const Index m = inst.mixing.rows();
  const Index k = inst.mixing.cols();
  if (m < 1 || k < 1) throw std::invalid_argument("instance: empty mixing matrix");
  if (inst.observation.size() != m)
    throw std::invalid_argument("instance: observation length != channel count");
  if (inst.magnitudes.size() != k)
    throw std::invalid_argument("instance: magnitude count != source count");
  if (!(inst.magnitudes.array() > 0.0).all())
    throw std::invalid_argument("instance: magnitudes must be strictly positive");
  if (singular_value_ratio(inst.mixing) <= kRankTol)
    throw std::invalid_argument("instance: mixing matrix is (numerically) rank deficient");
  if (inst.ground_truth) {
    const CVec& s0 = *inst.ground_truth;
    if (s0.size() != k) throw std::invalid_argument("instance: ground truth length mismatch");
    for (Index i = 0; i < k; ++i) {
      if (std::abs(std::abs(s0[i]) - inst.magnitudes[i]) > 1e-12 * inst.magnitudes[i])
        throw std::invalid_argument("instance: |ground_truth| inconsistent with magnitudes");
    }
    if (inst.noise) {
      if (inst.noise->size() != m) throw std::invalid_argument("instance: noise length mismatch");
      const double gap = (inst.observation - inst.mixing * s0 - *inst.noise).norm();
      if (gap > 1e-10 * inst.observation.norm())
        throw std::invalid_argument("instance: y != A s0 + n");
    }
  }
  if (inst.noise_stddev && !(*inst.noise_stddev >= 0.0))
    throw std::invalid_argument("instance: negative noise stddev");
}

/// Squared residual ||A s - y||_2^2.
inline double residual(const CMat& a, const CVec& s, const CVec& y) {
  if (s.size() != a.cols() || y.size() != a.rows())
    throw std::invalid_argument("residual: dimension mismatch");
  return (a * s - y).squaredNorm();
}

inline double residual(const Instance& inst, const CVec& s) {
  return residual(inst.mixing, s, inst.observation);
}

/// ||s_hat - s0||^2 / ||s0||^2.
inline double relative_error(const CVec& s_hat, const CVec& s0) {
  if (s_hat.size() != s0.size())
    throw std::invalid_argument("relative_error: length mismatch");
  const double denom = s0.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("relative_error: zero reference");
  return (s_hat - s0).squaredNorm() / denom;
}

inline constexpr double kExactThreshold = 1e-8;

inline bool is_exact(const CVec& s_hat, const CVec& s0) {
  return relative_error(s_hat, s0) < kExactThreshold;
}

/// Random-instance recipe. snr_db = +infinity means noiseless (n = 0 exactly,
/// never a huge finite SNR, so exact-recovery experiments stay clean).
struct GenerationSpec {
  Index m = 2;
  Index k = 2;
  double snr_db = 60.0;
  std::optional<double> sigma_a;  // drawn uniformly from [0, 2] when absent
  std::optional<double> sigma_s;
  std::uint64_t seed = 0;
};

inline constexpr double kNoiselessSnr = std::numeric_limits<double>::infinity();

inline void validate_spec(const GenerationSpec& spec) {
  if (spec.m < 1 || spec.k < 1) throw std::invalid_argument("generation spec: M, K must be >= 1");
  if (std::isnan(spec.snr_db)) throw std::invalid_argument("generation spec: snr_db is NaN");
  if ((spec.sigma_a && *spec.sigma_a <= 0.0) || (spec.sigma_s && *spec.sigma_s <= 0.0))
    throw std::invalid_argument("generation spec: sigma_A, sigma_s must be positive");
}

namespace detail {

inline CMat sample_complex_gaussian_matrix(double sigma, Index rows, Index cols,
                                           SplitMix64& rng) {
  CMat out(rows, cols);
  for (Index r = 0; r < rows; ++r)      // row-major fill order, part of the
    for (Index c = 0; c < cols; ++c)    // reproducibility contract
      out(r, c) = complex_gaussian(sigma, rng);
  return out;
}

}  // namespace detail

/// Draws A ~ CN(0, sigma_A^2) entrywise (redrawn if numerically rank
/// deficient), s0 ~ CN(0, sigma_s^2) with exact-zero entries redrawn,
/// b = |s0|, and i.i.d. noise calibrated so that ||A s0||^2 / (M sigma_n^2)
/// matches the requested SNR.
inline Instance generate_instance(const GenerationSpec& spec, SplitMix64& rng) {
  validate_spec(spec);
  const double sigma_a = spec.sigma_a ? *spec.sigma_a : 2.0 * rng.next_double();
  const double sigma_s = spec.sigma_s ? *spec.sigma_s : 2.0 * rng.next_double();

  CMat a = detail::sample_complex_gaussian_matrix(sigma_a, spec.m, spec.k, rng);
  while (singular_value_ratio(a) <= kRankTol)
    a = detail::sample_complex_gaussian_matrix(sigma_a, spec.m, spec.k, rng);

  CVec s0(spec.k);
  for (Index i = 0; i < spec.k; ++i) {
    do {
      s0[i] = complex_gaussian(sigma_s, rng);
    } while (std::abs(s0[i]) == 0.0);
  }

  Instance inst;
  inst.mixing = std::move(a);
  inst.magnitudes = s0.cwiseAbs();
  inst.ground_truth = s0;

  const CVec image = inst.mixing * s0;
  if (spec.snr_db == kNoiselessSnr) {
    inst.noise = CVec::Zero(spec.m);
    inst.noise_stddev = 0.0;
    inst.observation = image;
  } else {
    const double snr_linear = std::pow(10.0, spec.snr_db / 10.0);
    const double sigma_n = image.norm() / std::sqrt(static_cast<double>(spec.m) * snr_linear);
    inst.noise = sample_complex_gaussian(sigma_n, spec.m, rng);
    inst.noise_stddev = sigma_n;
    inst.observation = image + *inst.noise;
  }
  validate_instance(inst);
  return inst;
}

inline Instance generate_instance(const GenerationSpec& spec) {
  SplitMix64 rng(spec.seed);
  return generate_instance(spec, rng);
}

/// Moore-Penrose solution of the unconstrained least-squares problem.
/// Only the determined/over-determined regime has a unique solution.
inline CVec least_squares(const CMat& a, const CVec& y) {
  if (y.size() != a.rows()) throw std::invalid_argument("least_squares: dimension mismatch");
  if (a.cols() > a.rows())
    throw UnsupportedRegime("least_squares: K > M has infinitely many solutions");
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()[a.cols() - 1] <= kRankTol * svd.singularValues()[0])
    throw std::invalid_argument("least_squares: rank-deficient matrix");
  return svd.solve(y);
}

}  // namespace phunmix
