#pragma once

#include <Eigen/Eigenvalues>

#include "phunmix/alternating.hpp"
#include "phunmix/problem.hpp"

namespace phunmix {

/// Lifted form of the constrained residual: with Atil = [A, -y] and
/// x = [s; 1], ||A s - y||^2 = trace(C x x^H) where C = Atil^H Atil.
/// `diag_target` is the required diagonal of the lifted variable X,
/// i.e. [b_1^2, ..., b_K^2, 1] before normalization.
struct LiftedProblem {
  CMat cost;         // (K+1) x (K+1), Hermitian PSD
  RVec diag_target;  // length K+1, strictly positive
  Index k = 0;
};

struct LiftedIterate {
  CMat x_mat;  // (K+1) x (K+1), Hermitian PSD, diagonal == target
  int sweeps = 0;
  bool converged = false;  // stopped by tolerance or floor, not by max_iter

  /// Largest |X - X^H| entry; exact 0 by construction of the BCD updates.
  double hermitian_defect() const { return (x_mat - x_mat.adjoint()).cwiseAbs().maxCoeff(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMat> es(x_mat, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
};

struct BcdConfig {
  double nu = 0.0;          // interior shift of the column updates; 0 works well
  double tol = 1e-3;        // relative objective decrease threshold
  int max_iter = 100000;    // sweeps
  double objective_floor = 1e-15;  // stop once trace(C X) falls this low
  bool check_iterates = false;     // per-sweep PSD diagnostics (slow, O(K^3))
};

/// Per-sweep diagnostics gathered when BcdConfig::check_iterates is set.
struct BcdDiagnostics {
  double max_hermitian_defect = 0.0;
  double max_diag_deviation = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  bool monotone = true;
};

inline void validate_bcd_config(const BcdConfig& cfg) {
  if (!(cfg.nu >= 0.0 && cfg.nu < 1.0)) throw std::invalid_argument("bcd config: need 0 <= nu < 1");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("bcd config: tol must be > 0");
  if (cfg.max_iter < 1) throw std::invalid_argument("bcd config: max_iter must be >= 1");
  if (cfg.objective_floor < 0.0) throw std::invalid_argument("bcd config: negative floor");
}

inline LiftedProblem build_lifted(const CMat& a, const CVec& y, const RVec& b) {
  if (y.size() != a.rows() || b.size() != a.cols())
    throw std::invalid_argument("build_lifted: dimension mismatch");
  if (!(b.array() > 0.0).all())
    throw std::invalid_argument("build_lifted: magnitudes must be strictly positive");
  const Index k = a.cols();
  CMat atil(a.rows(), k + 1);
  atil.leftCols(k) = a;
  atil.col(k) = -y;
  LiftedProblem p;
  p.cost = atil.adjoint() * atil;
  p.cost = 0.5 * (p.cost + p.cost.adjoint().eval());  // exact Hermitian symmetry
  p.diag_target = RVec(k + 1);
  p.diag_target.head(k) = b.array().square();
  p.diag_target[k] = 1.0;
  p.k = k;
  return p;
}

inline LiftedProblem build_lifted(const Instance& inst) {
  return build_lifted(inst.mixing, inst.observation, inst.magnitudes);
}

/// Rescales the cost so the diagonal constraint becomes all-ones:
/// C -> D C D with D = diag(sqrt(diag_target)). Feasible sets correspond
/// via X -> D^-1 X D^-1, which leaves all off-diagonal phases unchanged.
inline LiftedProblem normalize(const LiftedProblem& p) {
  const RVec d = p.diag_target.cwiseSqrt();
  LiftedProblem out;
  out.cost = d.asDiagonal() * p.cost * d.asDiagonal();
  out.diag_target = RVec::Ones(p.diag_target.size());
  out.k = p.k;
  return out;
}

inline double lifted_objective(const CMat& c, const CMat& x) {
  // trace(C X) = sum_ij C_ij X_ji; real for Hermitian C, X.
  return std::real((c.cwiseProduct(x.transpose())).sum());
}

/// Row-by-row block-coordinate descent on the normalized relaxation
///   min trace(C X)  s.t.  diag(X) = 1, X PSD.
/// Each sweep updates the first K rows/columns in order; the homogenization
/// row K+1 moves only through the others' updates. The update for row i,
///   z = X_{i^c,i^c} C_{i^c,i},  gamma = z^H C_{i^c,i},
///   X_{i^c,i} = -sqrt((1 - nu) / gamma) z   (zero when gamma == 0),
/// is the exact minimizer over that row subject to PSD feasibility, so the
/// objective is nonincreasing and X keeps a unit diagonal throughout.
inline LiftedIterate bcd_solve(const LiftedProblem& p, const BcdConfig& cfg = {},
                               std::vector<double>* objective_history = nullptr,
                               BcdDiagnostics* diag = nullptr) {
  validate_bcd_config(cfg);
  const Index n = p.cost.rows();
  if (n != p.k + 1 || p.cost.cols() != n)
    throw std::invalid_argument("bcd_solve: malformed lifted problem");
  if ((p.diag_target.array() - 1.0).abs().maxCoeff() > 1e-12)
    throw std::invalid_argument("bcd_solve: problem must be normalized first");

  LiftedIterate it;
  it.x_mat = CMat::Identity(n, n);
  CMat& x = it.x_mat;

  std::vector<double> local_history;
  std::vector<double>& hist = objective_history ? *objective_history : local_history;
  hist.clear();
  hist.push_back(lifted_objective(p.cost, x));

  std::vector<Index> others(n - 1);
  for (int p_iter = 1; p_iter <= cfg.max_iter; ++p_iter) {
    for (Index i = 0; i < p.k; ++i) {
      Index w = 0;
      for (Index j = 0; j < n; ++j)
        if (j != i) others[w++] = j;
      const CVec c_col = p.cost(others, i);
      const CVec z = x(others, others) * c_col;
      const double gamma = std::real(z.dot(c_col));
      if (gamma > 0.0) {
        const CVec col = -std::sqrt((1.0 - cfg.nu) / gamma) * z;
        x(others, i) = col;
        x(i, others) = col.adjoint();
      } else {
        x(others, i).setZero();
        x(i, others).setZero();
      }
    }
    const double r = lifted_objective(p.cost, x);
    hist.push_back(r);

    if (diag) {
      diag->max_hermitian_defect = std::max(diag->max_hermitian_defect, it.hermitian_defect());
      diag->max_diag_deviation =
          std::max(diag->max_diag_deviation, (x.diagonal().real().array() - 1.0).abs().maxCoeff());
      diag->min_eigenvalue = std::min(diag->min_eigenvalue, it.min_eigenvalue());
      if (r > hist[p_iter - 1] + 1e-12 * (1.0 + std::abs(hist.front()))) diag->monotone = false;
    }

    it.sweeps = p_iter;
    if (r <= cfg.objective_floor) {
      it.converged = true;
      break;
    }
    if ((hist[p_iter - 1] - r) / r < cfg.tol) {
      it.converged = true;
      break;
    }
  }
  return it;
}

/// True lower bound on the relaxation optimum (hence on the constrained
/// least-squares optimum) extracted from any unit-diagonal PSD iterate.
/// The primal objective trace(C X) approaches the optimum from above, so
/// it only bounds once fully converged; this certificate is valid at every
/// iterate by weak duality: lambda_i = (C X)_ii is dual-optimal in the
/// limit, and shifting by min(0, lambda_min(C - D(lambda))) restores dual
/// feasibility, giving the bound sum_i lambda_i + n * min(0, lambda_min).
inline double certified_lower_bound(const LiftedProblem& normalized, const LiftedIterate& it) {
  const Index n = normalized.cost.rows();
  if ((normalized.diag_target.array() - 1.0).abs().maxCoeff() > 1e-12)
    throw std::invalid_argument("certified_lower_bound: problem must be normalized");
  const RVec lambda = (normalized.cost * it.x_mat).diagonal().real();
  CMat slack = normalized.cost;
  slack.diagonal() -= lambda.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMat> es(slack, Eigen::EigenvaluesOnly);
  const double shift = std::min(0.0, es.eigenvalues().minCoeff());
  return lambda.sum() + static_cast<double>(n) * shift;
}

/// Reads the source phases off the last column of the lifted iterate and
/// reapplies the known magnitudes. Zero entries (possible when whole columns
/// were zeroed) fall back to phase 0 and are counted in `zero_count`.
inline CVec extract_solution(const LiftedIterate& it, const RVec& b, int* zero_count = nullptr) {
  const Index k = b.size();
  if (it.x_mat.rows() != k + 1) throw std::invalid_argument("extract_solution: size mismatch");
  return rescale_to_magnitudes(it.x_mat.topRightCorner(k, 1).col(0), b, zero_count);
}

/// Convex relaxation pipeline: lift, normalize, block-coordinate descent,
/// phase extraction. residual_history holds the relaxation objective per
/// sweep; its final value is a lower bound on the constrained least-squares
/// optimum (up to BCD convergence), usable as an optimality certificate.
inline SolverResult phunlift(const Instance& inst, const BcdConfig& cfg = {},
                             BcdDiagnostics* diag = nullptr) {
  const LiftedProblem lifted = normalize(build_lifted(inst));
  SolverResult res;
  const LiftedIterate it = bcd_solve(lifted, cfg, &res.residual_history, diag);
  res.estimate = extract_solution(it, inst.magnitudes);
  res.iterations = it.sweeps;
  res.converged = it.converged;
  res.method_name = "phunlift";
  res.lower_bound = certified_lower_bound(lifted, it);
  return res;
}

/// Stability constant 2 sqrt(2) ||n|| / sigma_min(A) bounding the recovery
/// error of the relaxation in the determined regime.
inline double stability_bound(const CMat& a, const CVec& n) {
  if (n.size() != a.rows()) throw std::invalid_argument("stability_bound: dimension mismatch");
  if (a.cols() > a.rows())
    throw UnsupportedRegime("stability_bound: sigma_min vanishes for K > M");
  Eigen::JacobiSVD<CMat> svd(a);
  const double smin = svd.singularValues()[a.cols() - 1];
  if (smin <= kRankTol * svd.singularValues()[0])
    throw std::invalid_argument("stability_bound: rank-deficient matrix");
  return 2.0 * std::numbers::sqrt2 * n.norm() / smin;
}

/// Gap between a feasible candidate's residual and the relaxation objective.
/// A small nonnegative gap certifies near-global optimality of the candidate.
inline double duality_gap(const Instance& inst, const SolverResult& result,
                          double lift_objective) {
  return residual(inst, result.estimate) - lift_objective;
}

}  // namespace phunmix
