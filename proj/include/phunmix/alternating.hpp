#pragma once

#include "phunmix/problem.hpp"
#include "phunmix/wiener.hpp"

namespace phunmix {

struct AltConfig {
  double tol = 1e-3;     // relative decrease threshold on the residual
  int max_iter = 10000;  // sweeps; a hard cap, normally unreached
};

inline void validate_alt_config(const AltConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("alt config: tol must be > 0");
  if (cfg.max_iter < 1) throw std::invalid_argument("alt config: max_iter must be >= 1");
}

/// Exact minimizer of ||A s - y||^2 over s_i with |s_i| = b_i and all other
/// coordinates fixed: s_i = b_i * u / |u| with u = a_i^H (y - A_{:,i^c} s_{i^c}).
/// When u == 0 every phase is equally good; the current value is kept and
/// `degenerate` (if given) set, which preserves the descent property.
inline Complex phunalt_update(const Instance& inst, const CVec& s, Index i,
                              bool* degenerate = nullptr) {
  if (s.size() != inst.sources()) throw std::invalid_argument("phunalt_update: length mismatch");
  if (i < 0 || i >= inst.sources()) throw std::invalid_argument("phunalt_update: index out of range");
  if (degenerate) *degenerate = false;
  const CVec deflated = inst.observation - inst.mixing * s + inst.mixing.col(i) * s[i];
  const Complex u = inst.mixing.col(i).dot(deflated);  // a_i^H (y - A_{:,i^c} s_{i^c})
  const double mod = std::abs(u);
  if (mod == 0.0) {
    if (degenerate) *degenerate = true;
    return s[i];
  }
  return inst.magnitudes[i] * (u / mod);
}

/// s_k = b_k e^{i theta_k} with theta_k uniform on [0, 2pi).
inline CVec random_phase_init(const RVec& b, SplitMix64& rng) {
  if (!(b.array() > 0.0).all())
    throw std::invalid_argument("random_phase_init: magnitudes must be positive");
  CVec s(b.size());
  for (Index i = 0; i < b.size(); ++i) {
    const double theta = 2.0 * std::numbers::pi * rng.next_double();
    s[i] = b[i] * Complex(std::cos(theta), std::sin(theta));
  }
  return s;
}

/// Coordinate descent on the constrained residual (Gauss-Seidel order
/// i = 1..K per sweep). Stops when the relative residual decrease falls
/// below cfg.tol, the residual reaches exactly zero, or max_iter sweeps.
inline SolverResult phunalt(const Instance& inst, const CVec& init, const AltConfig& cfg = {}) {
  validate_alt_config(cfg);
  const Index k = inst.sources();
  if (init.size() != k) throw std::invalid_argument("phunalt: init length mismatch");
  for (Index i = 0; i < k; ++i) {
    if (std::abs(std::abs(init[i]) - inst.magnitudes[i]) > 1e-10 * inst.magnitudes[i])
      throw std::invalid_argument("phunalt: init magnitudes do not match b");
  }

  SolverResult res;
  res.method_name = "phunalt";
  CVec s = init;
  res.residual_history.push_back(residual(inst, s));

  for (int p = 1; p <= cfg.max_iter; ++p) {
    // Residual vector maintained incrementally within the sweep and
    // recomputed from scratch at sweep boundaries to cap drift.
    CVec t = inst.observation - inst.mixing * s;
    for (Index i = 0; i < k; ++i) {
      const CVec a_i = inst.mixing.col(i);
      const Complex u = a_i.dot(t + a_i * s[i]);
      const double mod = std::abs(u);
      if (mod == 0.0) continue;  // keep s_i, still a coordinate minimizer
      const Complex updated = inst.magnitudes[i] * (u / mod);
      t += a_i * (s[i] - updated);
      s[i] = updated;
    }
    const double r = residual(inst, s);
    res.residual_history.push_back(r);
    res.iterations = p;
    if (r == 0.0) {
      res.converged = true;
      break;
    }
    const double prev = res.residual_history[p - 1];
    if ((prev - r) / r < cfg.tol) {
      res.converged = true;
      break;
    }
  }
  res.estimate = std::move(s);
  return res;
}

/// Best of `n_starts` randomly initialized runs; ties keep the earliest
/// start. Start j draws its phases from the shared stream, so the whole
/// procedure is deterministic in the incoming rng state.
inline SolverResult multistart_phunalt(const Instance& inst, int n_starts, const AltConfig& cfg,
                                       SplitMix64& rng) {
  if (n_starts < 1) throw std::invalid_argument("multistart: n_starts must be >= 1");
  SolverResult best;
  for (int j = 0; j < n_starts; ++j) {
    SolverResult run = phunalt(inst, random_phase_init(inst.magnitudes, rng), cfg);
    if (j == 0 || run.final_objective() < best.final_objective()) best = std::move(run);
  }
  best.method_name = "phunalt*" + std::to_string(n_starts);
  return best;
}

/// Warm-started chain: polish a first-stage estimate with coordinate
/// descent. Estimates off the constraint set (e.g. raw MWF) are projected
/// onto it first. The polished residual never exceeds the first stage's.
inline SolverResult chain_polish(const Instance& inst, const SolverResult& first,
                                 const AltConfig& cfg = {}) {
  const CVec init = rescale_to_magnitudes(first.estimate, inst.magnitudes);
  SolverResult res = phunalt(inst, init, cfg);
  res.iterations += first.iterations;
  res.method_name = first.method_name + "+";
  return res;
}

}  // namespace phunmix
