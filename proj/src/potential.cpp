#include "payforward/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "payforward/bounds.hpp"
#include "payforward/simplex.hpp"

namespace payforward {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string phi_name(int a, int b, int c) {
  return "phi_" + std::to_string(a) + "_" + std::to_string(b) + "_" + std::to_string(c);
}

double normalizer(const MiningParams& params) {
  // Large enough that the phi-sum tie-break term stays below the solver
  // tolerance and never trades against g.
  const double dd = params.d + 1;
  return 1e4 * dd * dd;
}

}  // namespace

LinearProgramSpec build_lp(const MiningParams& params) {
  params.validate();
  LinearProgramSpec spec;
  spec.params = params;
  spec.grid = StateGrid::for_params(params);

  spec.variable_names.reserve(1 + spec.grid.size());
  spec.variable_names.push_back("g");
  for (int i = 0; i < spec.grid.size(); ++i) {
    const ForkState s = spec.grid.state(i);
    spec.variable_names.push_back(phi_name(s.a, s.b, s.c));
  }
  spec.pinned_var = spec.phi_var(0, 0, 0);

  const double inv_d = 1.0 / normalizer(params);
  spec.objective.assign(spec.variable_names.size(), inv_d);
  spec.objective[spec.g_var()] = 1.0;
  spec.objective[spec.pinned_var] = 0.0;

  const double p = params.p;
  const double q = 1.0 - p;
  const int d = params.d;
  const int a_cap = params.own_branch_cap();
  const int tags = params.tag_count();

  auto add = [&](LinearConstraint cons) { spec.constraints.push_back(std::move(cons)); };
  auto term = [&](LinearConstraint& cons, int var, double coef) {
    if (var == spec.pinned_var) return;  // phi(0,0,0) = 0
    cons.terms.push_back({var, coef});
  };

  if (!params.strategic()) {
    // winning: phi(b+1,b,c) >= phi(0,0,0) + b + 1 + pf(c) - g
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < tags; ++c) {
        LinearConstraint cons;
        cons.label = "win(" + std::to_string(b + 1) + "," + std::to_string(b) + "," +
                     std::to_string(c) + ")";
        term(cons, spec.phi_var(b + 1, b, c), 1.0);
        term(cons, spec.g_var(), 1.0);
        cons.rhs = (b + 1) + payforward_amount(c, params);
        add(std::move(cons));
      }
  }

  // capitulation: phi(a,b,c) >= phi(0,s,tag(s)); covers the forced row b = d
  for (int b = 1; b <= d; ++b) {
    const int hi = params.strategic() ? a_cap : b;
    for (int a = 0; a <= hi; ++a)
      for (int c = 0; c < tags; ++c)
        for (int s = 0; s < b; ++s) {
          const int tag = capitulation_tag({a, b, c}, s, params);
          LinearConstraint cons;
          cons.label = "cap(" + std::to_string(a) + "," + std::to_string(b) + "," +
                       std::to_string(c) + ";" + std::to_string(s) + ")";
          term(cons, spec.phi_var(a, b, c), 1.0);
          term(cons, spec.phi_var(0, s, tag), -1.0);
          cons.rhs = 0.0;
          add(std::move(cons));
        }
  }

  // mining: phi(a,b,c) >= p*phi(a+1,b,c) + (1-p)*(phi(a,b+1,c) - g)
  for (int b = 0; b < d; ++b) {
    const int hi = params.strategic() ? a_cap - 1 : b;
    for (int a = 0; a <= hi; ++a)
      for (int c = 0; c < tags; ++c) {
        LinearConstraint cons;
        cons.label = "mine(" + std::to_string(a) + "," + std::to_string(b) + "," +
                     std::to_string(c) + ")";
        term(cons, spec.phi_var(a, b, c), 1.0);
        term(cons, spec.phi_var(a + 1, b, c), -p);
        term(cons, spec.phi_var(a, b + 1, c), -q);
        term(cons, spec.g_var(), q);
        cons.rhs = 0.0;
        add(std::move(cons));
      }
  }

  if (params.strategic()) {
    // release: phi(a,b,c) >= phi(a-b-1,0,0) + b + 1 + pf(c) - g
    for (int b = 0; b <= d; ++b)
      for (int a = b + 1; a <= a_cap; ++a)
        for (int c = 0; c < tags; ++c) {
          LinearConstraint cons;
          cons.label = "rel(" + std::to_string(a) + "," + std::to_string(b) + "," +
                       std::to_string(c) + ")";
          term(cons, spec.phi_var(a, b, c), 1.0);
          term(cons, spec.phi_var(a - b - 1, 0, 0), -1.0);
          term(cons, spec.g_var(), 1.0);
          cons.rhs = (b + 1) + payforward_amount(c, params);
          add(std::move(cons));
        }
  }

  return spec;
}

void dump_lp(const LinearProgramSpec& spec, std::ostream& os) {
  os << "# minimize g + (1/" << normalizer(spec.params) << ") * sum(phi)\n";
  os << "# " << spec.variable_names[spec.pinned_var] << " = 0; all phi >= 0\n";
  for (const LinearConstraint& cons : spec.constraints) {
    os << cons.label << ":";
    bool first = true;
    for (const LinearTerm& t : cons.terms) {
      const double coef = t.coef;
      if (first) {
        os << " " << coef << "*" << spec.variable_names[t.var];
        first = false;
      } else {
        os << (coef < 0 ? " - " : " + ") << std::abs(coef) << "*" << spec.variable_names[t.var];
      }
    }
    os << " >= " << cons.rhs << "\n";
  }
}

PotentialSolution solve_lp(const LinearProgramSpec& spec) {
  // Column map with the pinned variable eliminated.
  const int n_all = spec.variable_count();
  std::vector<int> col(n_all, -1);
  int n = 0;
  for (int v = 0; v < n_all; ++v)
    if (v != spec.pinned_var) col[v] = n++;

  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int v = 0; v < n_all; ++v)
    if (col[v] >= 0) c[col[v]] = spec.objective[v];

  const int m = static_cast<int>(spec.constraints.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const LinearConstraint& cons = spec.constraints[i];
    for (const LinearTerm& t : cons.terms) A(i, col[t.var]) += t.coef;
    b[i] = cons.rhs;
  }

  LpResult lp = solve_min_nonneg(c, A, b);

  PotentialSolution sol;
  sol.params = spec.params;
  sol.grid = spec.grid;
  sol.lp_objective = lp.objective;
  sol.lp_iterations = lp.iterations;
  sol.g = lp.x[col[spec.g_var()]];
  sol.phi = Eigen::VectorXd::Zero(spec.grid.size());
  for (int i = 0; i < spec.grid.size(); ++i) {
    const int v = 1 + i;
    sol.phi[i] = (v == spec.pinned_var) ? 0.0 : lp.x[col[v]];
  }
  return sol;
}

std::string to_string(RecurrenceBranch branch) {
  switch (branch) {
    case RecurrenceBranch::Winning: return "winning";
    case RecurrenceBranch::Capitulation: return "capitulation";
    case RecurrenceBranch::Mining: return "mining";
    case RecurrenceBranch::Release: return "release";
  }
  return "?";
}

namespace {

struct BranchValues {
  double winning = kNegInf;
  double capitulation = kNegInf;
  double mining = kNegInf;
  double release = kNegInf;
  int best_capitulation = -1;
};

BranchValues recurrence_branches(const PotentialSolution& sol, const ForkState& s) {
  const MiningParams& params = sol.params;
  BranchValues out;
  if (is_winning(s, params)) {
    out.winning = sol.phi_at(0, 0, 0) + s.a + payforward_amount(s.c, params) - sol.g;
    return out;
  }
  for (int t = 0; t < s.b; ++t) {
    const double v = sol.phi_at(0, t, capitulation_tag(s, t, params));
    if (v > out.capitulation) {
      out.capitulation = v;
      out.best_capitulation = t;
    }
  }
  const bool mine_ok =
      s.b < params.d && !(params.strategic() && s.a == params.own_branch_cap());
  if (mine_ok)
    out.mining = params.p * sol.phi_at(s.a + 1, s.b, s.c) +
                 (1.0 - params.p) * (sol.phi_at(s.a, s.b + 1, s.c) - sol.g);
  if (params.strategic() && s.a >= s.b + 1)
    out.release = sol.phi_at(s.a - s.b - 1, 0, 0) + (s.b + 1) +
                  payforward_amount(s.c, params) - sol.g;
  return out;
}

}  // namespace

PotentialReport verify_potential(const PotentialSolution& sol, double tol) {
  const MiningParams& params = sol.params;
  PotentialReport report;
  report.max_slack = 0.0;

  bool mine_tight_at_root = true;
  bool capitulation_tight_next = true;

  for (int idx = 0; idx < sol.grid.size(); ++idx) {
    const ForkState s = sol.grid.state(idx);
    if (!state_valid(s, params)) continue;
    const BranchValues branches = recurrence_branches(sol, s);

    StateTightness st;
    st.state = s;
    st.phi = sol.phi[idx];
    st.best_value = std::max({branches.winning, branches.capitulation, branches.mining,
                              branches.release});
    st.slack = st.phi - st.best_value;
    if (branches.winning == st.best_value) {
      st.best_branch = RecurrenceBranch::Winning;
    } else if (branches.mining == st.best_value) {
      st.best_branch = RecurrenceBranch::Mining;
    } else if (branches.release == st.best_value) {
      st.best_branch = RecurrenceBranch::Release;
    } else {
      st.best_branch = RecurrenceBranch::Capitulation;
      st.capitulate_to = branches.best_capitulation;
    }
    report.max_slack = std::max(report.max_slack, st.slack);

    if (s.a == 0 && s.b == 0 && branches.mining < st.phi - tol) mine_tight_at_root = false;
    if (s.a == 0 && s.b == 1 && branches.capitulation < st.phi - tol)
      capitulation_tight_next = false;

    report.states.push_back(st);
  }
  report.all_tight = report.max_slack <= tol;
  report.frontier_readback = mine_tight_at_root && capitulation_tight_next;
  return report;
}

bool check_induction_bound(const PotentialSolution& sol, const ValueTable& table, double tol) {
  if (!(sol.params == table.params))
    throw std::invalid_argument("induction bound: potential and table parameters differ");
  if (!table.keeps_layers)
    throw std::invalid_argument("induction bound: value table kept no layers");
  for (int k = 0; k <= table.horizon; ++k) {
    const Eigen::VectorXd& layer = table.layers[static_cast<size_t>(k)];
    for (int idx = 0; idx < table.grid.size(); ++idx) {
      const ForkState s = table.grid.state(idx);
      if (!state_valid(s, table.params)) continue;
      if (layer[idx] > sol.phi[idx] + k * sol.g + tol) return false;
    }
  }
  return true;
}

PhiBarParams phi_bar_params(double p, double w) {
  if (std::abs(1.0 - 2.0 * p) < 1e-12)
    throw std::invalid_argument("phi_bar constants are undefined at p = 0.5");
  PhiBarParams out;
  out.lambda = (p - 1.0) * (p - 1.0) * (1.0 - p * w) / (1.0 - 2.0 * p);
  out.mu = p * (p - (p - 1.0) * (p - 1.0) * w) / (2.0 * p - 1.0);
  out.kappa = (p - 1.0) * p * (p * w - 1.0) / (2.0 * p - 1.0);
  return out;
}

double PhiBar::at(int a, int b, int c) const {
  if (a <= b + 1) {
    if (!immediate.grid.contains(a, b, c))
      throw std::out_of_range("phi_bar: state " + to_string(ForkState{a, b, c}) +
                              " is outside the solved truncation");
    return immediate.phi_at(a, b, c);
  }
  return a * consts.lambda + b * consts.mu + consts.kappa + c * w;
}

PhiBar make_phi_bar(double p, double w, int d) {
  MiningParams params;
  params.p = p;
  params.w = w;
  params.d = d;
  params.variant = ReleaseVariant::Immediate;
  params.scheme = PayforwardScheme::Uniform;
  PhiBar bar;
  bar.consts = phi_bar_params(p, w);
  bar.immediate = solve_lp(build_lp(params));
  bar.w = w;
  return bar;
}

double phi_bar(int a, int b, int c, double p, double w, int d) {
  return make_phi_bar(p, w, d).at(a, b, c);
}

StrategicClaimsReport check_strategic_claims(double p, double w, const PhiBar& bar) {
  StrategicClaimsReport report;
  const int d = bar.immediate.params.d;
  const int hi = 2 * d;
  const double gain = p + p * (1.0 - p) * w;
  const double cap_ceiling = w * p / (1.0 - p);

  auto release_value = [&](int a, int b, int c) {
    return bar.at(a - b - 1, 0, 0) + (b + 1) + c * w - gain;
  };

  for (int b = 0; b <= hi; ++b)
    for (int c = 0; c <= 1; ++c) {
      // capitulation value; targets are capped at the solved truncation
      if (b >= 1) {
        double cap = kNegInf;
        for (int s = 0; s < std::min(b, d + 1); ++s) cap = std::max(cap, bar.at(0, s, 1));
        if (cap > cap_ceiling + 1e-7)
          report.violations.push_back({2, ForkState{0, b, c}, cap});
      }
      for (int a = b + 2; a <= hi; ++a) {
        const double printed =
            (b * (2.0 - 4.0 * p) + (1.0 - p) * (2.0 - 3.0 * p) * (1.0 - p * w)) /
            (1.0 - 2.0 * p);
        if (printed <= 0.0) report.violations.push_back({1, ForkState{a, b, c}, printed});
        const double direct = bar.at(a, b, c) - release_value(a, b, c);
        if (direct <= 0.0) report.violations.push_back({1, ForkState{a, b, c}, direct});
        const double rel = release_value(a, b, c);
        if (rel < 1.0 - p * (1.0 - p) * w - 1e-7)
          report.violations.push_back({3, ForkState{a, b, c}, rel});
      }
    }

  report.release_claim_c0 = release_claim_value(p, w, 0);
  report.release_claim_c1 = release_claim_value(p, w, 1);
  if (report.release_claim_c0 < 0.0)
    report.violations.push_back({4, ForkState{1, 0, 0}, report.release_claim_c0});
  if (report.release_claim_c1 < 0.0)
    report.violations.push_back({4, ForkState{1, 0, 1}, report.release_claim_c1});
  return report;
}

bool check_potential_upper_bound(const PotentialSolution& sol, double p, double w, double tol) {
  const int d = sol.params.d;
  const double ratio = p / (1.0 - p);
  for (int a = 0; a <= d; ++a)
    for (int b = a; b <= d; ++b)
      for (int l = 0; l <= 1; ++l) {
        if (b + l > d || a + l > (b + l) + 1) continue;
        const double lhs = sol.phi_at(a + l, b + l, 1);
        const double rhs = sol.phi_at(a, b, 0) + (l + w) * std::pow(ratio, b - a + 1);
        if (lhs > rhs + tol) return false;
      }
  return true;
}

}  // namespace payforward
