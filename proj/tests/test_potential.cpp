#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "payforward/potential.hpp"
#include "payforward/value_iteration.hpp"

using namespace payforward;

namespace {

MiningParams make(double p, double w, int d, ReleaseVariant variant = ReleaseVariant::Immediate,
                  PayforwardScheme scheme = PayforwardScheme::Uniform, double w_half = 0.0) {
  MiningParams params;
  params.p = p;
  params.w = w;
  params.d = d;
  params.variant = variant;
  params.scheme = scheme;
  params.w_half = w_half;
  return params;
}

const LinearConstraint* find_constraint(const LinearProgramSpec& spec, const std::string& label) {
  for (const LinearConstraint& cons : spec.constraints)
    if (cons.label == label) return &cons;
  return nullptr;
}

double coef_of(const LinearProgramSpec& spec, const LinearConstraint& cons,
               const std::string& name) {
  for (const LinearTerm& t : cons.terms)
    if (spec.variable_names[t.var] == name) return t.coef;
  return 0.0;
}

}  // namespace

TEST_CASE("d = 1 program has g plus the full tag grid") {
  const LinearProgramSpec spec = build_lp(make(0.3, 0.5, 1));
  CHECK(spec.variable_count() == 9);
  // families: winning 2, capitulation 4, mining 2
  CHECK(spec.constraints.size() == 8);
}

TEST_CASE("winning constraint instance") {
  const LinearProgramSpec spec = build_lp(make(0.3, 0.5, 1));
  const LinearConstraint* cons = find_constraint(spec, "win(1,0,1)");
  REQUIRE(cons != nullptr);
  CHECK(cons->rhs == doctest::Approx(1.5));
  CHECK(coef_of(spec, *cons, "phi_1_0_1") == doctest::Approx(1.0));
  CHECK(coef_of(spec, *cons, "g") == doctest::Approx(1.0));
}

TEST_CASE("mining constraint instance drops the pinned variable") {
  const LinearProgramSpec spec = build_lp(make(0.3, 0.5, 1));
  const LinearConstraint* cons = find_constraint(spec, "mine(0,0,0)");
  REQUIRE(cons != nullptr);
  CHECK(cons->rhs == 0.0);
  CHECK(coef_of(spec, *cons, "phi_0_0_0") == 0.0);
  CHECK(coef_of(spec, *cons, "phi_1_0_0") == doctest::Approx(-0.3));
  CHECK(coef_of(spec, *cons, "phi_0_1_0") == doctest::Approx(-0.7));
  CHECK(coef_of(spec, *cons, "g") == doctest::Approx(0.7));
}

TEST_CASE("release family appears only for the strategic variant") {
  const LinearProgramSpec spec = build_lp(make(0.3, 0.5, 2, ReleaseVariant::Strategic));
  CHECK(find_constraint(spec, "rel(3,0,1)") != nullptr);
  CHECK(find_constraint(spec, "win(1,0,1)") == nullptr);
  const LinearConstraint* rel = find_constraint(spec, "rel(3,1,1)");
  REQUIRE(rel != nullptr);
  CHECK(rel->rhs == doctest::Approx(2.5));
  CHECK(coef_of(spec, *rel, "phi_1_0_0") == doctest::Approx(-1.0));
}

TEST_CASE("dump lists one constraint per line") {
  const LinearProgramSpec spec = build_lp(make(0.3, 0.5, 1));
  std::ostringstream os;
  dump_lp(spec, os);
  const std::string text = os.str();
  CHECK(text.find("win(1,0,1): 1*phi_1_0_1 + 1*g >= 1.5") != std::string::npos);
  CHECK(text.find("cap(0,1,0;0): 1*phi_0_1_0 - 1*phi_0_0_1 >= 0") != std::string::npos);
}

TEST_CASE("honest regime gain from the program") {
  const PotentialSolution sol = solve_lp(build_lp(make(0.3, 0.0, 8)));
  CHECK(sol.g == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(sol.phi_at(0, 0, 0) == 0.0);
}

TEST_CASE("compliance boundary gain from the figure pair") {
  const PotentialSolution sol = solve_lp(build_lp(make(0.43, 0.045, 8)));
  CHECK(std::abs(sol.g - (0.43 + 0.43 * 0.57 * 0.045)) < 1e-3);
}

TEST_CASE("strategic mining beats honesty at one half") {
  const PotentialSolution sol = solve_lp(build_lp(make(0.5, 0.0, 8)));
  CHECK(sol.g > 0.5 + 1e-3);
}

TEST_CASE("program gain equals value iteration across variants") {
  const MiningParams configs[] = {
      make(0.2, 0.0, 8),
      make(0.45, 0.5, 8),
      make(0.35, 1.0, 8, ReleaseVariant::Strategic),
      make(0.5, 0.0, 6, ReleaseVariant::Strategic),
      make(0.45, 0.0, 8, ReleaseVariant::Immediate, PayforwardScheme::Shared, 0.2),
      make(0.4, 0.0, 6, ReleaseVariant::Strategic, PayforwardScheme::Shared, 0.3),
  };
  for (const MiningParams& params : configs) {
    const PotentialSolution sol = solve_lp(build_lp(params));
    const GainEstimate est = gain_per_level(value_iterate_converged(params));
    CHECK(std::abs(sol.g - est.g_star) < 1e-4);
  }
}

TEST_CASE("potential is tight at every state") {
  for (const MiningParams& params :
       {make(0.3, 1.0, 8), make(0.45, 0.2, 8), make(0.35, 0.5, 6, ReleaseVariant::Strategic)}) {
    const PotentialSolution sol = solve_lp(build_lp(params));
    const PotentialReport report = verify_potential(sol);
    CHECK(report.all_tight);
    CHECK(report.max_slack < 1e-6);
  }
}

TEST_CASE("Frontier readback in the honest regime") {
  const PotentialSolution sol = solve_lp(build_lp(make(0.3, 1.0, 8)));
  const PotentialReport report = verify_potential(sol);
  CHECK(report.frontier_readback);
  CHECK(sol.phi_at(0, 0, 1) <= 1.0 * 0.3 / 0.7 + 1e-9);
  for (const StateTightness& st : report.states)
    if (st.state == ForkState{0, 1, 0}) {
      CHECK(st.best_branch == RecurrenceBranch::Capitulation);
      CHECK(st.capitulate_to == 0);
    }
}

TEST_CASE("induction bound holds and a corrupted potential is caught") {
  const MiningParams params = make(0.3, 0.0, 8);
  PotentialSolution sol = solve_lp(build_lp(params));
  const ValueTable table = value_iterate(params, 200, true);
  CHECK(check_induction_bound(sol, table));
  PotentialSolution corrupted = sol;
  corrupted.phi[corrupted.grid.index(0, 0, 1)] -= 1.0;
  CHECK(!check_induction_bound(corrupted, table));
  CHECK_THROWS_AS(check_induction_bound(sol, value_iterate(make(0.31, 0.0, 8), 10, true)),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_induction_bound(sol, value_iterate(params, 10, false)),
                  std::invalid_argument);
}

TEST_CASE("linear extension constants at a quarter") {
  const PhiBarParams consts = phi_bar_params(0.25, 0.0);
  CHECK(consts.lambda == doctest::Approx(1.125).epsilon(1e-12));
  CHECK(consts.mu == doctest::Approx(-0.125).epsilon(1e-12));
  CHECK(consts.kappa == doctest::Approx(-0.375).epsilon(1e-12));
  CHECK_THROWS_AS(phi_bar_params(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("linear extension identities") {
  for (double p : {0.25, 0.3, 0.34})
    for (double w : {0.0, 0.5, 1.0}) {
      const PhiBarParams consts = phi_bar_params(p, w);
      const double honest = p + p * (1 - p) * w;
      CHECK(p * consts.lambda + (1 - p) * consts.mu ==
            doctest::Approx((1 - p) * honest).epsilon(1e-12));
      CHECK(consts.lambda + consts.mu == doctest::Approx(1.0).epsilon(1e-12));
      for (int b = 0; b <= 5; ++b)
        CHECK(consts.kappa + consts.lambda * (b + 1) + consts.mu * b ==
              doctest::Approx(b + 1 - honest).epsilon(1e-11));
    }
}

TEST_CASE("extension agrees with the potential on the winning diagonal") {
  const PhiBar bar = make_phi_bar(0.25, 0.5, 8);
  const double honest = 0.25 + 0.25 * 0.75 * 0.5;
  for (int b = 0; b <= 5; ++b)
    for (int c = 0; c <= 1; ++c)
      CHECK(bar.at(b + 1, b, c) ==
            doctest::Approx(b + 1 + c * 0.5 - honest).epsilon(1e-9));
}

TEST_CASE("extension satisfies the mining recurrence on its linear region") {
  for (double p : {0.25, 0.34})
    for (double w : {0.0, 1.0}) {
      const PhiBar bar = make_phi_bar(p, w, 8);
      const double honest = p + p * (1 - p) * w;
      for (int b = 0; b <= 5; ++b)
        for (int a = b + 2; a <= 12; ++a)
          for (int c = 0; c <= 1; ++c)
            CHECK(bar.at(a, b, c) ==
                  doctest::Approx(p * bar.at(a + 1, b, c) +
                                  (1 - p) * (bar.at(a, b + 1, c) - honest))
                      .epsilon(1e-9));
    }
}

TEST_CASE("strategic claims below the threshold") {
  const PhiBar bar = make_phi_bar(0.34, 1.0, 8);
  const StrategicClaimsReport report = check_strategic_claims(0.34, 1.0, bar);
  CHECK(report.release_claim_c0 > 0.0);
  CHECK(report.release_claim_c1 > 0.0);
  CHECK(report.all_hold());
}

TEST_CASE("release claim flips just above the threshold") {
  const PhiBar bar = make_phi_bar(0.35, 1.0, 8);
  const StrategicClaimsReport report = check_strategic_claims(0.35, 1.0, bar);
  CHECK(report.release_claim_c0 == doctest::Approx(-0.00612).epsilon(0.05));
  CHECK(!report.all_hold());
  bool found = false;
  for (const ClaimViolation& v : report.violations) found |= v.claim == 4;
  CHECK(found);
}

TEST_CASE("release claim with a claimable base holds to 0.44") {
  const PhiBar bar = make_phi_bar(0.44, 1.0, 8);
  const StrategicClaimsReport report = check_strategic_claims(0.44, 1.0, bar);
  CHECK(report.release_claim_c1 >= 0.0);
}

TEST_CASE("pay-forward shift bound on the solved potential") {
  const PotentialSolution sol = solve_lp(build_lp(make(0.3, 1.0, 8)));
  CHECK(check_potential_upper_bound(sol, 0.3, 1.0));
  // single instance (0,0) -> (1,1): slack of the displayed bound
  const double bound = sol.phi_at(0, 0, 0) + (1 + 1.0) * (0.3 / 0.7);
  CHECK(sol.phi_at(1, 1, 1) <= bound + 1e-9);
}

TEST_CASE("tags collapse when the pay-forward is zero") {
  const PotentialSolution sol = solve_lp(build_lp(make(0.3, 0.0, 8)));
  for (int a = 0; a <= 2; ++a)
    for (int b = a; b <= 3; ++b)
      CHECK(sol.phi_at(a, b, 1) == doctest::Approx(sol.phi_at(a, b, 0)).epsilon(1e-7));
}
