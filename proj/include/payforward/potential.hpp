#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "payforward/game.hpp"
#include "payforward/state_grid.hpp"
#include "payforward/value_iteration.hpp"

namespace payforward {

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
};

// One inequality sum(coef * var) >= rhs.
struct LinearConstraint {
  std::vector<LinearTerm> terms;
  double rhs = 0.0;
  std::string label;
};

// The potential program: minimize g + sum(phi)/D subject to the winning,
// capitulation and mining families (plus release in the strategic variant),
// phi >= 0 and phi(0,0,0) pinned to 0.
struct LinearProgramSpec {
  MiningParams params;
  StateGrid grid;
  std::vector<std::string> variable_names;  // [0] is g, then phi_a_b_c
  std::vector<double> objective;
  std::vector<LinearConstraint> constraints;
  int pinned_var = -1;  // phi(0,0,0)

  int g_var() const { return 0; }
  int phi_var(int a, int b, int c) const { return 1 + grid.index(a, b, c); }
  int variable_count() const { return static_cast<int>(variable_names.size()); }
};

LinearProgramSpec build_lp(const MiningParams& params);

// Plain-text listing, one constraint per line, for external cross-checks.
void dump_lp(const LinearProgramSpec& spec, std::ostream& os);

struct PotentialSolution {
  MiningParams params;
  StateGrid grid;
  double g = 0.0;
  Eigen::VectorXd phi;  // indexed by grid
  double lp_objective = 0.0;
  int lp_iterations = 0;

  double phi_at(int a, int b, int c) const { return phi[grid.index(a, b, c)]; }
  double phi_at(const ForkState& s) const { return phi[grid.index(s)]; }
};

PotentialSolution solve_lp(const LinearProgramSpec& spec);

enum class RecurrenceBranch { Winning, Capitulation, Mining, Release };

std::string to_string(RecurrenceBranch branch);

struct StateTightness {
  ForkState state;
  double phi = 0.0;
  double best_value = 0.0;       // max over available recurrence branches
  double slack = 0.0;            // phi - best_value (nonnegative up to fp noise)
  RecurrenceBranch best_branch = RecurrenceBranch::Mining;
  int capitulate_to = -1;        // argmax target when best_branch is Capitulation
};

struct PotentialReport {
  std::vector<StateTightness> states;
  double max_slack = 0.0;
  bool all_tight = false;
  // Frontier readback: mining tight at (0,0,*) and capitulation-to-(0,0,1)
  // tight at (0,1,*).
  bool frontier_readback = false;
};

// Checks that the solved potential satisfies the gain recurrence with
// equality at every game state (the sum-of-phi objective term exists to
// force this) and reads the argmax branch back as a policy.
PotentialReport verify_potential(const PotentialSolution& sol, double tol = 1e-6);

// The certified bound g_k(a,b,c) <= phi(a,b,c) + k*g, machine-checked on
// every stored layer. Throws when the two engines were run with different
// parameters or the table kept no layers.
bool check_induction_bound(const PotentialSolution& sol, const ValueTable& table,
                           double tol = 1e-7);

// Closed-form constants extending the potential linearly to a > b + 1.
struct PhiBarParams {
  double lambda = 0.0;
  double mu = 0.0;
  double kappa = 0.0;
};

// Requires p != 0.5 (the constants carry 1 - 2p denominators).
PhiBarParams phi_bar_params(double p, double w);

// Potential for the strategic analysis: the solved immediate potential on
// a <= b + 1 and the linear extension a*lambda + b*mu + kappa + c*w beyond.
struct PhiBar {
  PhiBarParams consts;
  PotentialSolution immediate;
  double w = 0.0;

  double at(int a, int b, int c) const;
};

PhiBar make_phi_bar(double p, double w, int d);

double phi_bar(int a, int b, int c, double p, double w, int d = 8);

struct ClaimViolation {
  int claim = 0;
  ForkState state;
  double value = 0.0;
};

struct StrategicClaimsReport {
  std::vector<ClaimViolation> violations;
  double release_claim_c0 = 0.0;  // inequality value at c = 0
  double release_claim_c1 = 0.0;  // inequality value at c = 1

  bool all_hold() const { return violations.empty(); }
};

// Grid check of the strategic-release claims on a,b <= 2d, c in {0,1}:
//   1. mining dominates release strictly above the diagonal (a > b + 1),
//      both via the printed closed form and the potential itself;
//   2. the capitulation value stays below w * p / (1 - p);
//   3. the release value stays above 1 - p(1-p)w for a > b + 1;
//   4. release beats mining on the diagonal a = b + 1 iff the quartic
//      inequality value is nonnegative.
StrategicClaimsReport check_strategic_claims(double p, double w, const PhiBar& bar);

// phi(a+l, b+l, 1) <= phi(a, b, 0) + (l + w) * (p/(1-p))^(b-a+1) for all
// in-range a <= b and l in {0, 1}.
bool check_potential_upper_bound(const PotentialSolution& sol, double p, double w,
                                 double tol = 1e-7);

}  // namespace payforward
