#pragma once

#include <algorithm>

#include "phunmix/alternating.hpp"
#include "phunmix/problem.hpp"

namespace phunmix {

/// Exhaustive search over the phase torus, G points per coordinate.
/// G^K residual evaluations, so only small K is practical; the budget guard
/// refuses instead of silently crawling.
struct GridSpec {
  int points_per_phase = 96;  // 3.75 degree resolution
  bool polish = true;         // run coordinate descent from the best cell
  double budget = 1e7;        // maximum number of grid evaluations
  double phase_offset = 0.0;  // radians added to every grid angle
};

/// Evaluates s_k = b_k exp(i (2 pi g_k / G + offset)) over the full grid and
/// returns the best point, optionally polished. Iteration order is
/// lexicographic in (g_1, ..., g_K) and ties keep the first (smallest) index,
/// so the result is deterministic.
inline SolverResult grid_search(const Instance& inst, const GridSpec& spec = {},
                                const AltConfig& polish_cfg = {}) {
  if (spec.points_per_phase < 4) throw std::invalid_argument("grid_search: need G >= 4");
  const Index k = inst.sources();
  const int g = spec.points_per_phase;
  const double total = std::pow(static_cast<double>(g), static_cast<double>(k));
  if (total > spec.budget) {
    throw std::runtime_error("grid_search: " + std::to_string(total) +
                             " evaluations exceed the budget of " +
                             std::to_string(spec.budget) +
                             "; raise GridSpec::budget or lower G");
  }

  // Per-source columns at every grid phase, so each step is O(M).
  std::vector<CMat> phased(k);
  for (Index j = 0; j < k; ++j) {
    phased[j].resize(inst.channels(), g);
    for (int q = 0; q < g; ++q) {
      const double theta = 2.0 * std::numbers::pi * q / g + spec.phase_offset;
      phased[j].col(q) =
          inst.mixing.col(j) * (inst.magnitudes[j] * Complex(std::cos(theta), std::sin(theta)));
    }
  }

  std::vector<int> digits(k, 0);
  CVec sum = CVec::Zero(inst.channels());
  for (Index j = 0; j < k; ++j) sum += phased[j].col(0);

  double best_value = (sum - inst.observation).squaredNorm();
  std::vector<int> best_digits = digits;
  const auto n_points = static_cast<std::uint64_t>(total);
  for (std::uint64_t step = 1; step < n_points; ++step) {
    Index j = k - 1;
    while (digits[j] == g - 1) {
      digits[j] = 0;
      --j;
    }
    ++digits[j];
    if (j == k - 1) {
      sum += phased[j].col(digits[j]) - phased[j].col(digits[j] - 1);
    } else {
      // A carry resets trailing digits; refresh the sum to kill drift.
      sum.setZero();
      for (Index q = 0; q < k; ++q) sum += phased[q].col(digits[q]);
    }
    const double value = (sum - inst.observation).squaredNorm();
    if (value < best_value) {
      best_value = value;
      best_digits = digits;
    }
  }

  CVec best_point(k);
  for (Index j = 0; j < k; ++j) {
    const double theta = 2.0 * std::numbers::pi * best_digits[j] / g + spec.phase_offset;
    best_point[j] = inst.magnitudes[j] * Complex(std::cos(theta), std::sin(theta));
  }

  if (!spec.polish) {
    SolverResult res;
    res.estimate = std::move(best_point);
    res.residual_history = {best_value};
    res.iterations = 0;
    res.converged = true;
    res.method_name = "oracle-grid";
    return res;
  }
  SolverResult res = phunalt(inst, best_point, polish_cfg);
  res.method_name = "oracle-grid";
  return res;
}

/// True iff the candidate's residual matches the (polished) oracle optimum
/// within max(1e-8, 1e-6 * oracle residual).
inline bool certify_global(const Instance& inst, const SolverResult& candidate,
                           const GridSpec& spec = {}) {
  const SolverResult oracle = grid_search(inst, spec);
  const double ref = oracle.final_objective();
  const double slack = std::max(1e-8, 1e-6 * ref);
  return residual(inst, candidate.estimate) <= ref + slack;
}

}  // namespace phunmix
