#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phunmix {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using IMat = Eigen::MatrixXi;
using Index = Eigen::Index;

/// Thrown when a problem falls outside a method's supported regime,
/// e.g. asking for the unique least-squares solution when K > M.
class UnsupportedRegime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Output of every solver. `residual_history` holds the objective value per
/// sweep (the squared data residual for direct solvers, the lifted objective
/// for the SDP relaxation) and is nonincreasing for iterative methods.
struct SolverResult {
  CVec estimate;
  std::vector<double> residual_history;
  int iterations = 0;
  bool converged = false;
  std::string method_name;
  /// Certified lower bound on the constrained least-squares optimum,
  /// filled by the relaxation solver (dual feasibility certificate).
  std::optional<double> lower_bound;

  double final_objective() const {
    return residual_history.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : residual_history.back();
  }
};

}  // namespace phunmix
