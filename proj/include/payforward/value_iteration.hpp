#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "payforward/game.hpp"
#include "payforward/state_grid.hpp"

namespace payforward {

// Finite-horizon optimal gains g_k(a,b,c) of the truncated game. Only the
// top two layers are retained unless the caller asks for the full history
// (needed by the induction-bound check).
struct ValueTable {
  MiningParams params;
  StateGrid grid;
  int horizon = 0;                      // K
  Eigen::VectorXd top;                  // g_K
  Eigen::VectorXd below;                // g_{K-1}
  std::vector<Eigen::VectorXd> layers;  // g_0 .. g_K when kept
  bool keeps_layers = false;

  double top_value(const ForkState& s) const { return top[grid.index(s)]; }
  double layer_value(int k, const ForkState& s) const;
};

// Runs the gain recurrence for exactly `horizon` levels. Throws when the
// horizon is < 1 or the parameters are invalid.
ValueTable value_iterate(const MiningParams& params, int horizon, bool keep_layers = false);

// Iterates until the per-level gain estimate stabilizes (residual below
// `residual_tol` over a window of layers) or `max_horizon` is reached,
// whichever comes first. The g_K/K estimator carries a bias of roughly
// sqrt(residual_tol), so the default is well below the 1e-7 convergence
// flag of gain_per_level.
ValueTable value_iterate_converged(const MiningParams& params, double residual_tol = 1e-9,
                                   int max_horizon = 100000);

struct GainEstimate {
  double g_star = 0.0;   // g_K(0,0,0) / K
  bool converged = false;
  double residual = 0.0;  // |g_K/K - g_{K-1}/(K-1)|
};

GainEstimate gain_per_level(const ValueTable& table);

enum class StateClass { Winning, Mining, Capitulation, Release };

// Greedy policy at the deepest layer. Winning states carry no action.
struct PolicyTable {
  MiningParams params;
  StateGrid grid;
  std::vector<std::optional<Action>> actions;
  std::vector<StateClass> classes;

  const std::optional<Action>& at(const ForkState& s) const { return actions[grid.index(s)]; }
  StateClass cls(const ForkState& s) const { return classes[grid.index(s)]; }
};

// Argmax actions of the top layer; ties broken Mine > Release > Capitulate
// to the smallest s, so the threshold policy coincides with Frontier.
PolicyTable extract_policy(const ValueTable& table);

// The protocol-compliant policy: mine at the tip, capitulate to it as soon
// as Miner 2 leads, release (strategic) the moment the branch is ahead.
PolicyTable frontier_policy(const MiningParams& params);

struct GainDecomposition {
  double q_m = 0.0;    // long-run fraction of settled levels mined by Miner 1
  double q_pf = 0.0;   // fraction of levels that are Miner 1 blocks claiming pay-forward
  double gain_per_level = 0.0;
};

// Exact stationary analysis of the settlement chain induced by a policy.
// Throws std::domain_error when the chain is not ergodic.
GainDecomposition policy_gain_decomposition(const PolicyTable& policy, const MiningParams& params);

}  // namespace payforward
