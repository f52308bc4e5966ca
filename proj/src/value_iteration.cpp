#include "payforward/value_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace payforward {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-9;

// Best capitulation continuation from a state with branch length b and
// fork-base tag c, evaluated against the current layer (capitulation does
// not consume a level).
double capitulation_value(const Eigen::VectorXd& cur, const StateGrid& grid,
                          const MiningParams& params, int b, int c) {
  double best = kNegInf;
  const ForkState at{0, b, c};
  for (int s = 0; s < b; ++s) {
    const int tag = capitulation_tag(at, s, params);
    best = std::max(best, cur[grid.index(0, s, tag)]);
  }
  return best;
}

void immediate_layer(const MiningParams& params, const StateGrid& grid,
                     const Eigen::VectorXd& prev, Eigen::VectorXd& cur) {
  const double p = params.p;
  const double q = 1.0 - p;
  const double restart = prev[grid.index(0, 0, 0)];
  for (int b = 0; b <= params.d; ++b) {
    for (int c = 0; c < grid.c_count; ++c) {
      if (b < params.d)  // Miner 2 capitulates at a == b + 1
        cur[grid.index(b + 1, b, c)] = restart + (b + 1) + payforward_amount(c, params);
    }
    double cap[3] = {kNegInf, kNegInf, kNegInf};
    for (int c = 0; c < grid.c_count; ++c)
      if (b >= 1) cap[c] = capitulation_value(cur, grid, params, b, c);
    for (int a = b; a >= 0; --a) {
      for (int c = 0; c < grid.c_count; ++c) {
        if (b == params.d) {
          cur[grid.index(a, b, c)] = cap[c];
          continue;
        }
        const double mine = p * cur[grid.index(a + 1, b, c)] + q * prev[grid.index(a, b + 1, c)];
        cur[grid.index(a, b, c)] = std::max(mine, cap[c]);
      }
    }
  }
}

void strategic_layer(const MiningParams& params, const StateGrid& grid, int k,
                     const Eigen::VectorXd& prev, Eigen::VectorXd& cur) {
  const double p = params.p;
  const double q = 1.0 - p;
  const int a_cap = params.own_branch_cap();
  for (int b = 0; b <= params.d; ++b) {
    double cap[3] = {kNegInf, kNegInf, kNegInf};
    for (int c = 0; c < grid.c_count; ++c)
      if (b >= 1) cap[c] = capitulation_value(cur, grid, params, b, c);
    for (int a = a_cap; a >= 0; --a) {
      for (int c = 0; c < grid.c_count; ++c) {
        const double pf = payforward_amount(c, params);
        if (a >= k + b) {  // enough hidden blocks to release until the horizon
          cur[grid.index(a, b, c)] = k + b + pf;
          continue;
        }
        double best = b >= 1 ? cap[c] : kNegInf;
        if (a >= b + 1)
          best = std::max(best, prev[grid.index(a - b - 1, 0, 0)] + (b + 1) + pf);
        if (b < params.d && a < a_cap)
          best = std::max(best, p * cur[grid.index(a + 1, b, c)] + q * prev[grid.index(a, b + 1, c)]);
        cur[grid.index(a, b, c)] = best;
      }
    }
  }
}

ValueTable iterate(const MiningParams& params, int max_horizon, bool keep_layers,
                   bool stop_on_residual, double residual_tol) {
  params.validate();
  if (max_horizon < 1) throw std::invalid_argument("value iteration horizon must be >= 1");

  ValueTable table;
  table.params = params;
  table.grid = StateGrid::for_params(params);
  table.keeps_layers = keep_layers;

  const int n = table.grid.size();
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);  // g_0 = 0
  Eigen::VectorXd cur = Eigen::VectorXd::Zero(n);
  if (keep_layers) table.layers.push_back(prev);

  const int root = table.grid.index(0, 0, 0);
  // The per-level estimate can stall early (deep deviations only pay off
  // after whole races complete), so a single small residual is not enough.
  const int streak_needed = std::max(20, 4 * params.d);
  const int min_horizon = std::min(max_horizon, std::max(500, 20 * params.d));
  int streak = 0;
  double prev_estimate = 0.0;
  for (int k = 1; k <= max_horizon; ++k) {
    if (params.strategic())
      strategic_layer(params, table.grid, k, prev, cur);
    else
      immediate_layer(params, table.grid, prev, cur);
    if (keep_layers) table.layers.push_back(cur);
    table.horizon = k;
    const double estimate = cur[root] / k;
    if (stop_on_residual && k >= 2) {
      streak = std::abs(estimate - prev_estimate) < residual_tol ? streak + 1 : 0;
      if (streak >= streak_needed && k >= min_horizon) {
        table.top = cur;
        table.below = prev;
        return table;
      }
    }
    prev_estimate = estimate;
    std::swap(prev, cur);
  }
  table.top = prev;  // swapped: prev now holds the last layer
  table.below = cur;
  return table;
}

}  // namespace

double ValueTable::layer_value(int k, const ForkState& s) const {
  if (!keeps_layers) throw std::invalid_argument("value table does not keep layers");
  if (k < 0 || k > horizon) throw std::invalid_argument("layer out of range");
  return layers[static_cast<size_t>(k)][grid.index(s)];
}

ValueTable value_iterate(const MiningParams& params, int horizon, bool keep_layers) {
  return iterate(params, horizon, keep_layers, false, 0.0);
}

ValueTable value_iterate_converged(const MiningParams& params, double residual_tol,
                                   int max_horizon) {
  return iterate(params, max_horizon, false, true, residual_tol);
}

GainEstimate gain_per_level(const ValueTable& table) {
  if (table.horizon < 2) throw std::invalid_argument("gain_per_level needs a horizon >= 2");
  const int root = table.grid.index(0, 0, 0);
  const int k = table.horizon;
  GainEstimate est;
  est.g_star = table.top[root] / k;
  est.residual = std::abs(est.g_star - table.below[root] / (k - 1));
  est.converged = est.residual < 1e-7;
  return est;
}

namespace {

double action_value(const ValueTable& t, const ForkState& s, const Action& act) {
  const auto& grid = t.grid;
  const MiningParams& params = t.params;
  switch (act.kind) {
    case Action::Kind::Mine:
      return params.p * t.top[grid.index(s.a + 1, s.b, s.c)] +
             (1.0 - params.p) * t.below[grid.index(s.a, s.b + 1, s.c)];
    case Action::Kind::Capitulate:
      return t.top[grid.index(0, act.target, capitulation_tag(s, act.target, params))];
    case Action::Kind::Release:
      return t.below[grid.index(s.a - s.b - 1, 0, 0)] + (s.b + 1) +
             payforward_amount(s.c, params);
  }
  return kNegInf;
}

// Mine > Release > Capitulate(smallest s)
int preference_rank(const Action& a) {
  switch (a.kind) {
    case Action::Kind::Mine: return 0;
    case Action::Kind::Release: return 1;
    case Action::Kind::Capitulate: return 2 + a.target;
  }
  return 1 << 20;
}

}  // namespace

PolicyTable extract_policy(const ValueTable& table) {
  const MiningParams& params = table.params;
  if (params.strategic() && table.horizon < params.own_branch_cap() + params.d + 2)
    throw std::invalid_argument("extract_policy needs a converged table");

  PolicyTable policy;
  policy.params = params;
  policy.grid = table.grid;
  policy.actions.assign(table.grid.size(), std::nullopt);
  policy.classes.assign(table.grid.size(), StateClass::Mining);

  for (int idx = 0; idx < table.grid.size(); ++idx) {
    const ForkState s = table.grid.state(idx);
    if (!state_valid(s, params)) continue;
    if (is_winning(s, params)) {
      policy.classes[idx] = StateClass::Winning;
      continue;
    }
    auto acts = legal_actions(s, params);
    std::sort(acts.begin(), acts.end(), [](const Action& x, const Action& y) {
      return preference_rank(x) < preference_rank(y);
    });
    double best = kNegInf;
    for (const Action& act : acts) best = std::max(best, action_value(table, s, act));
    for (const Action& act : acts) {
      if (action_value(table, s, act) >= best - kTieTol) {
        policy.actions[idx] = act;
        switch (act.kind) {
          case Action::Kind::Mine: policy.classes[idx] = StateClass::Mining; break;
          case Action::Kind::Release: policy.classes[idx] = StateClass::Release; break;
          case Action::Kind::Capitulate: policy.classes[idx] = StateClass::Capitulation; break;
        }
        break;
      }
    }
  }
  return policy;
}

PolicyTable frontier_policy(const MiningParams& params) {
  params.validate();
  PolicyTable policy;
  policy.params = params;
  policy.grid = StateGrid::for_params(params);
  policy.actions.assign(policy.grid.size(), std::nullopt);
  policy.classes.assign(policy.grid.size(), StateClass::Mining);
  for (int idx = 0; idx < policy.grid.size(); ++idx) {
    const ForkState s = policy.grid.state(idx);
    if (!state_valid(s, params)) continue;
    if (is_winning(s, params)) {
      policy.classes[idx] = StateClass::Winning;
    } else if (params.strategic() && s.a >= s.b + 1) {
      policy.actions[idx] = Action::release();
      policy.classes[idx] = StateClass::Release;
    } else if (s.b == 0) {
      policy.actions[idx] = Action::mine();
      policy.classes[idx] = StateClass::Mining;
    } else {
      policy.actions[idx] = Action::capitulate_to(0);
      policy.classes[idx] = StateClass::Capitulation;
    }
  }
  return policy;
}

namespace {

struct SettlementFlow {
  double levels = 0.0;
  double m1_blocks = 0.0;
  double pf_claims = 0.0;
  double pf_value = 0.0;
};

// Follows forced settlements and the policy's capitulation/release chain
// until Miner 1's next move is to mine. Returns the resting state.
ForkState resolve_to_mining(ForkState s, const PolicyTable& policy, const MiningParams& params,
                            SettlementFlow& flow) {
  for (int guard = 0; guard < 1 << 12; ++guard) {
    if (is_winning(s, params)) {
      flow.levels += 1;
      flow.m1_blocks += s.a;
      if (s.c > 0) {
        flow.pf_claims += 1;
        flow.pf_value += payforward_amount(s.c, params);
      }
      s = {0, 0, 0};
      continue;
    }
    const auto& act = policy.at(s);
    if (!act) throw std::domain_error("policy has no action for reachable state " + to_string(s));
    if (act->kind == Action::Kind::Capitulate) {
      s = {0, act->target, capitulation_tag(s, act->target, params)};
      continue;
    }
    if (act->kind == Action::Kind::Release) {
      flow.levels += 1;
      flow.m1_blocks += s.b + 1;
      if (s.c > 0) {
        flow.pf_claims += 1;
        flow.pf_value += payforward_amount(s.c, params);
      }
      s = {s.a - s.b - 1, 0, 0};
      continue;
    }
    return s;  // Mine
  }
  throw std::domain_error("settlement resolution did not terminate");
}

}  // namespace

GainDecomposition policy_gain_decomposition(const PolicyTable& policy,
                                            const MiningParams& params) {
  params.validate();
  const StateGrid& grid = policy.grid;
  if (!(grid == StateGrid::for_params(params)))
    throw std::invalid_argument("policy grid does not match the parameters");

  // Enumerate mining states reachable from the restart state and record,
  // per mining event, the expected settlement flow until the next decision.
  std::vector<int> states;
  std::vector<int> row_of(grid.size(), -1);
  struct Edge {
    int from, to;
    double prob;
    SettlementFlow flow;
  };
  std::vector<Edge> edges;

  SettlementFlow seed_flow;
  const ForkState start = resolve_to_mining({0, 0, 0}, policy, params, seed_flow);
  row_of[grid.index(start)] = 0;
  states.push_back(grid.index(start));
  for (size_t head = 0; head < states.size(); ++head) {
    const ForkState x = grid.state(states[head]);
    const auto hit = [&](ForkState moved, double prob, SettlementFlow flow) {
      const ForkState rest = resolve_to_mining(moved, policy, params, flow);
      const int idx = grid.index(rest);
      if (row_of[idx] < 0) {
        row_of[idx] = static_cast<int>(states.size());
        states.push_back(idx);
      }
      edges.push_back({static_cast<int>(head), row_of[idx], prob, flow});
    };
    hit({x.a + 1, x.b, x.c}, params.p, SettlementFlow{});
    SettlementFlow honest_flow;
    honest_flow.levels = 1;  // Miner 2's block extends the longest chain
    hit({x.a, x.b + 1, x.c}, 1.0 - params.p, honest_flow);
  }

  const int n = static_cast<int>(states.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : edges) P(e.from, e.to) += e.prob;

  // Stationary distribution: pi' P = pi', sum pi = 1.
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw std::domain_error("policy induces a non-ergodic settlement chain");
  Eigen::VectorXd pi = lu.solve(rhs);
  if (pi.minCoeff() < -1e-9)
    throw std::domain_error("policy induces a non-ergodic settlement chain");

  double levels = 0.0, blocks = 0.0, claims = 0.0, value = 0.0;
  for (const Edge& e : edges) {
    const double weight = pi[e.from] * e.prob;
    levels += weight * e.flow.levels;
    blocks += weight * e.flow.m1_blocks;
    claims += weight * e.flow.pf_claims;
    value += weight * e.flow.pf_value;
  }
  GainDecomposition out;
  out.q_m = blocks / levels;
  out.q_pf = claims / levels;
  out.gain_per_level = (blocks + value) / levels;
  return out;
}

}  // namespace payforward
