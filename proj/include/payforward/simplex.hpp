#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace payforward {

struct LpFailure : std::runtime_error {
  double worst_violation;
  LpFailure(const std::string& what, double violation)
      : std::runtime_error(what), worst_violation(violation) {}
};

struct LpResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  double worst_violation = 0.0;  // max over constraints of (b - A x)+
};

// Minimizes c.x subject to A x >= b and x >= 0, for c >= 0. Solved exactly
// by a dense simplex on the dual (which is feasible at y = 0 precisely
// because c is nonnegative); the primal solution is read back from the
// reduced costs of the slack columns. Throws LpFailure on an infeasible
// or numerically broken instance.
LpResult solve_min_nonneg(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& b);

}  // namespace payforward
