#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <optional>

#include "payforward/rng.hpp"
#include "payforward/simplex.hpp"

using namespace payforward;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Independent oracle: enumerate every basic solution of
// [A -I] [x; s] = b, x >= 0, s >= 0 and take the best feasible objective.
std::optional<double> enumerate_optimum(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                                        const Eigen::VectorXd& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(b.size());
  Eigen::MatrixXd full(m, n + m);
  full.leftCols(n) = A;
  full.rightCols(m) = -Eigen::MatrixXd::Identity(m, m);

  std::optional<double> best;
  std::vector<int> pick(m);
  const int total = n + m;
  // iterate over all m-subsets of the columns
  for (int i = 0; i < m; ++i) pick[i] = i;
  for (;;) {
    Eigen::MatrixXd basis(m, m);
    for (int i = 0; i < m; ++i) basis.col(i) = full.col(pick[i]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (lu.isInvertible()) {
      const Eigen::VectorXd vals = lu.solve(b);
      if (vals.minCoeff() >= -1e-9) {
        double obj = 0.0;
        for (int i = 0; i < m; ++i)
          if (pick[i] < n) obj += c[pick[i]] * vals[i];
        if (!best || obj < *best) best = obj;
      }
    }
    int k = m - 1;
    while (k >= 0 && pick[k] == total - m + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int j = k + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

}  // namespace

TEST_CASE("one-variable program") {
  Eigen::MatrixXd A(1, 1);
  A << 1.0;
  const LpResult r = solve_min_nonneg(vec({1.0}), A, vec({5.0}));
  CHECK(r.x[0] == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(r.objective == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("two binding constraints pick the vertex") {
  // min 2x + 3y  s.t.  x + y >= 2,  x + 3y >= 3
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 1.0, 1.0, 3.0;
  const LpResult r = solve_min_nonneg(vec({2.0, 3.0}), A, vec({2.0, 3.0}));
  CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(r.x[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.objective == doctest::Approx(4.5).epsilon(1e-9));
  CHECK(r.worst_violation < 1e-9);
}

TEST_CASE("degenerate overlap still terminates") {
  // min x + y  s.t.  x >= 1, y >= 1, x + y >= 2 (redundant)
  Eigen::MatrixXd A(3, 2);
  A << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
  const LpResult r = solve_min_nonneg(vec({1.0, 1.0}), A, vec({1.0, 1.0, 2.0}));
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("slack constraints leave cheap variables at zero") {
  // min x + 10y  s.t.  x + y >= 4; optimum (4, 0)
  Eigen::MatrixXd A(1, 2);
  A << 1.0, 1.0;
  const LpResult r = solve_min_nonneg(vec({1.0, 10.0}), A, vec({4.0}));
  CHECK(r.x[0] == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(r.x[1] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("infeasible program is reported") {
  // x >= 0 and -x >= 1 cannot hold together
  Eigen::MatrixXd A(1, 1);
  A << -1.0;
  CHECK_THROWS_AS(solve_min_nonneg(vec({1.0}), A, vec({1.0})), LpFailure);
}

TEST_CASE("negative objective coefficients are rejected") {
  Eigen::MatrixXd A(1, 1);
  A << 1.0;
  CHECK_THROWS_AS(solve_min_nonneg(vec({-1.0}), A, vec({1.0})), LpFailure);
}

TEST_CASE("random programs agree with exhaustive vertex enumeration") {
  CounterRng rng(2024);
  int feasible_seen = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 3);
    const int m = 2 + static_cast<int>(rng.next_u64() % 5);
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd b(m), c(n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = -1.0 + 3.0 * rng.next_unit();
      b[i] = -1.0 + 3.0 * rng.next_unit();
    }
    for (int j = 0; j < n; ++j) c[j] = 2.0 * rng.next_unit();

    const auto expected = enumerate_optimum(c, A, b);
    if (!expected) {
      CHECK_THROWS_AS(solve_min_nonneg(c, A, b), LpFailure);
      continue;
    }
    ++feasible_seen;
    const LpResult got = solve_min_nonneg(c, A, b);
    CHECK(got.objective == doctest::Approx(*expected).epsilon(1e-7));
    CHECK(got.worst_violation < 1e-7);
    CHECK(got.x.minCoeff() >= -1e-9);
  }
  CHECK(feasible_seen > 20);
}
