#pragma once

#include <array>
#include <string_view>

#include "phunmix/alternating.hpp"
#include "phunmix/lifting.hpp"
#include "phunmix/wiener.hpp"

namespace phunmix {

inline constexpr std::array<std::string_view, 8> kSolverNames = {
    "mwf", "nmwf", "nmwf+", "phunalt", "phunalt*5", "phunlift", "phunlift+", "rand"};

inline bool is_valid_solver(std::string_view name) {
  return std::find(kSolverNames.begin(), kSolverNames.end(), name) != kSolverNames.end();
}

struct SolverOptions {
  AltConfig alt;
  BcdConfig bcd;
  int n_starts = 5;
  /// Noise level handed to the Wiener solvers. Defaults to the instance's
  /// own noise_stddev; must be positive, so noiseless instances need an
  /// explicit (small) value here to run mwf/nmwf at all.
  std::optional<double> sigma_n;
};

inline double wiener_sigma(const Instance& inst, const SolverOptions& opts) {
  if (opts.sigma_n) return *opts.sigma_n;
  if (inst.noise_stddev && *inst.noise_stddev > 0.0) return *inst.noise_stddev;
  throw std::invalid_argument(
      "wiener solvers need sigma_n > 0; use least_squares for the noiseless limit");
}

/// Dispatch by the solver labels used in reports and on the command line.
/// `rng` feeds random initializations ("phunalt", "phunalt*5", "rand"); the
/// closed-form and lifted solvers never consume from it.
inline SolverResult solve_by_name(std::string_view name, const Instance& inst, SplitMix64& rng,
                                  const SolverOptions& opts = {}) {
  if (name == "mwf") return mwf(inst, wiener_sigma(inst, opts));
  if (name == "nmwf") return nmwf(inst, wiener_sigma(inst, opts));
  if (name == "nmwf+")
    return chain_polish(inst, nmwf(inst, wiener_sigma(inst, opts)), opts.alt);
  if (name == "phunalt")
    return phunalt(inst, random_phase_init(inst.magnitudes, rng), opts.alt);
  if (name == "phunalt*5") return multistart_phunalt(inst, opts.n_starts, opts.alt, rng);
  if (name == "phunlift") return phunlift(inst, opts.bcd);
  if (name == "phunlift+") return chain_polish(inst, phunlift(inst, opts.bcd), opts.alt);
  if (name == "rand") {
    SolverResult res;
    res.estimate = random_phase_init(inst.magnitudes, rng);
    res.residual_history = {residual(inst, res.estimate)};
    res.converged = true;
    res.method_name = "rand";
    return res;
  }
  throw std::invalid_argument("unknown solver: " + std::string(name));
}

}  // namespace phunmix
