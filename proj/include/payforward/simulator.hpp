#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "payforward/game.hpp"
#include "payforward/value_iteration.hpp"

namespace payforward {

struct SimConfig {
  MiningParams params;
  std::optional<PolicyTable> policy;  // empty: Miner 1 plays Frontier
  long long phases = 1000000;
  uint64_t seed = 0;
  int batches = 32;  // independent streams; also the standard-error resolution
  // optional per-phase sink: batch, phase, who mined ('1' or '2'), resting state
  std::function<void(int, long long, char, const ForkState&)> trace;
};

struct SimStats {
  long long phases = 0;
  long long levels_settled = 0;
  long long miner1_blocks = 0;
  long long miner1_pf_claims = 0;
  double miner1_pf_value = 0.0;
  long long forks_started = 0;
  long long forks_won = 0;
  double q_m_hat = 0.0;
  double q_m_se = 0.0;
  double q_pf_hat = 0.0;
  double q_pf_se = 0.0;
  double realized_gain_per_level = 0.0;
  double gain_se = 0.0;
};

// Phase-based execution of the two-player game: each phase one miner mines
// (Miner 1 with probability p), forced settlements and the policy's
// capitulation/release decisions resolve immediately, and the fork-base
// pay-forward is claimed exactly once per settlement. Bit-reproducible for
// a fixed config.
SimStats simulate(const SimConfig& config);

enum class SmallMinerDeviation { None, SkipPayForwardOnce };

struct SmallMinersConfig {
  int n = 50;                        // miners; index 0 is Miner 1
  std::vector<double> hash_powers;   // size n, sums to 1, index 0 = p
  double w = 0.0;
  int deviant_index = 1;
  SmallMinerDeviation deviation = SmallMinerDeviation::SkipPayForwardOnce;
  long long phases = 1000000;
  uint64_t seed = 0;
};

struct SmallMinersStats {
  std::vector<double> utilities;  // per miner, per settled level
  long long levels_settled = 0;
  long long episodes = 0;         // resolved deviation episodes
  long long blocks_kept = 0;
  double keep_rate = 0.0;
  double keep_se = 0.0;
  double deviant_realized = 0.0;   // mean payoff of the deviating block
  double deviant_compliant = 0.0;  // mean counterfactual payoff had he paid w
  bool chain_pf_valid = true;      // settled pay-forwards all in {0, w}
};

// The small-miner equilibrium experiment: honest miners play
// StrictFrontier(w), the deviant skips his pay-forward once per episode,
// and Miner 1 undercuts any block paying less than w by forking behind it.
// He races from the states (0,1), (1,1), (1,2), (2,2) and capitulates once
// two behind or once the honest branch has three blocks, so he overtakes
// with probability exactly p^2 + (1-p)p^3.
SmallMinersStats simulate_small_miners(const SmallMinersConfig& config);

}  // namespace payforward
