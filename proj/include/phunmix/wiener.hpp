#pragma once

#include <Eigen/Cholesky>

#include "phunmix/problem.hpp"

namespace phunmix {

/// Multichannel Wiener filter: MAP estimate under CN(0, b_k^2) source priors
/// and CN(0, sigma_n^2) i.i.d. noise. Output magnitudes are unconstrained.
///
/// Determined regime solves the K x K Tikhonov system
///   (sigma_n^2 D(b)^-2 + A^H A) s = A^H y;
/// under-determined regime uses the algebraically equivalent M x M form
///   s = D(b)^2 A^H (A D(b)^2 A^H + sigma_n^2 I)^-1 y,
/// which stays well conditioned when K > M.
inline CVec mwf_estimate(const CMat& a, const CVec& y, const RVec& b, double sigma_n) {
  if (sigma_n <= 0.0 || !std::isfinite(sigma_n))
    throw std::invalid_argument("mwf: sigma_n must be finite and > 0");
  const Index m = a.rows();
  const Index k = a.cols();
  if (y.size() != m || b.size() != k) throw std::invalid_argument("mwf: dimension mismatch");
  const double sn2 = sigma_n * sigma_n;
  if (k <= m) {
    CMat h = a.adjoint() * a;
    h.diagonal() += (sn2 * b.array().square().inverse()).matrix().cast<Complex>();
    return h.ldlt().solve(a.adjoint() * y);
  }
  const RVec b2 = b.array().square();
  CMat g = a * b2.asDiagonal() * a.adjoint();
  g.diagonal().array() += sn2;
  return b2.asDiagonal() * (a.adjoint() * g.ldlt().solve(y));
}

inline SolverResult mwf(const Instance& inst, double sigma_n) {
  SolverResult res;
  res.estimate = mwf_estimate(inst.mixing, inst.observation, inst.magnitudes, sigma_n);
  res.residual_history = {residual(inst, res.estimate)};
  res.iterations = 0;
  res.converged = true;
  res.method_name = "mwf";
  return res;
}

/// Rescales a vector onto the magnitude constraint set, keeping phases.
/// Zero entries get phase 0 (reported through `zero_count` when given).
inline CVec rescale_to_magnitudes(const CVec& s, const RVec& b, int* zero_count = nullptr) {
  if (s.size() != b.size()) throw std::invalid_argument("rescale: length mismatch");
  CVec out(s.size());
  int zeros = 0;
  for (Index i = 0; i < s.size(); ++i) {
    const double mod = std::abs(s[i]);
    if (mod == 0.0) {
      out[i] = Complex(b[i], 0.0);
      ++zeros;
    } else {
      out[i] = b[i] * (s[i] / mod);
    }
  }
  if (zero_count) *zero_count = zeros;
  return out;
}

/// Normalized multichannel Wiener filter: MWF phases with the known
/// magnitudes imposed, so |s_k| = b_k holds exactly.
inline SolverResult nmwf(const Instance& inst, double sigma_n) {
  SolverResult res = mwf(inst, sigma_n);
  res.estimate = rescale_to_magnitudes(res.estimate, inst.magnitudes);
  res.residual_history = {residual(inst, res.estimate)};
  res.method_name = "nmwf";
  return res;
}

}  // namespace phunmix
