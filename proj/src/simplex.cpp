#include "payforward/simplex.hpp"

#include <cmath>
#include <vector>

namespace payforward {

namespace {

constexpr double kPriceTol = 1e-9;
constexpr double kPivotEps = 1e-11;

}  // namespace

LpResult solve_min_nonneg(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& b) {
  const int n = static_cast<int>(c.size());   // primal variables = dual rows
  const int m = static_cast<int>(b.size());   // primal constraints = dual variables
  if (A.rows() != m || A.cols() != n) throw LpFailure("LP dimensions disagree", 0.0);
  if (n > 0 && c.minCoeff() < 0.0)
    throw LpFailure("objective must be nonnegative for the dual start", 0.0);

  // Dual tableau: rows are the n constraints A^T y + s = c, columns are the
  // m dual variables, n slacks, and the right-hand side.
  Eigen::MatrixXd T(n + 1, m + n + 1);
  T.setZero();
  T.topLeftCorner(n, m) = A.transpose();
  T.block(0, m, n, n).setIdentity();
  T.col(m + n).head(n) = c;
  T.row(n).head(m) = -b.transpose();  // reduced costs of a maximization

  std::vector<int> basis(n);
  for (int i = 0; i < n; ++i) basis[i] = m + i;

  const int max_iterations = 200000;
  const int bland_after = 20 * (n + m);
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    // entering column
    int q = -1;
    if (iter < bland_after) {
      double best = -kPriceTol;
      for (int j = 0; j < m + n; ++j)
        if (T(n, j) < best) {
          best = T(n, j);
          q = j;
        }
    } else {  // Bland's rule, guards against cycling on degenerate vertices
      for (int j = 0; j < m + n; ++j)
        if (T(n, j) < -kPriceTol) {
          q = j;
          break;
        }
    }
    if (q < 0) break;  // optimal

    // ratio test
    int r = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = T(i, q);
      if (a <= kPivotEps) continue;
      const double ratio = T(i, m + n) / a;
      if (r < 0 || ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && basis[i] < basis[r])) {
        r = i;
        best_ratio = ratio;
      }
    }
    if (r < 0)
      throw LpFailure("dual unbounded: the primal program is infeasible", 0.0);

    // pivot on (r, q)
    T.row(r) /= T(r, q);
    Eigen::VectorXd col = T.col(q);
    col(r) = 0.0;
    T.noalias() -= col * T.row(r);
    basis[r] = q;
  }
  if (iter >= max_iterations) throw LpFailure("simplex iteration limit reached", 0.0);

  LpResult out;
  out.iterations = iter;
  out.objective = T(n, m + n);
  out.x = T.row(n).segment(m, n);  // primal values live under the slack columns
  for (int i = 0; i < n; ++i)
    if (out.x[i] < 0.0 && out.x[i] > -kPriceTol) out.x[i] = 0.0;

  if (m > 0) {
    const Eigen::VectorXd residual = b - A * out.x;
    out.worst_violation = std::max(0.0, residual.maxCoeff());
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    if (out.worst_violation > 1e-6 * scale)
      throw LpFailure("recovered primal violates a constraint", out.worst_violation);
  }
  return out;
}

}  // namespace payforward
