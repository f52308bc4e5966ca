#include "payforward/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "payforward/rng.hpp"

namespace payforward {

namespace {

struct BatchTally {
  long long levels = 0;
  long long m1_blocks = 0;
  long long pf_claims = 0;
  double pf_value = 0.0;
  long long forks_started = 0;
  long long forks_won = 0;

  double q_m() const { return static_cast<double>(m1_blocks) / levels; }
  double q_pf() const { return static_cast<double>(pf_claims) / levels; }
  double gain() const { return (m1_blocks + pf_value) / levels; }
};

BatchTally run_batch(const MiningParams& params, const PolicyTable& policy, long long phases,
                     CounterRng rng, int batch,
                     const std::function<void(int, long long, char, const ForkState&)>& trace) {
  BatchTally tally;
  ForkState s{0, 0, 0};
  bool in_fork = false;

  const auto settle_win = [&](const ForkState& x) {
    tally.levels += 1;
    tally.m1_blocks += x.a;
    if (x.c > 0) {
      tally.pf_claims += 1;
      tally.pf_value += payforward_amount(x.c, params);
    }
    if (in_fork) {
      ++tally.forks_won;
      in_fork = false;
    }
  };

  for (long long phase = 0; phase < phases; ++phase) {
    char who = '2';
    if (rng.bernoulli(params.p)) {
      s.a += 1;
      who = '1';
    } else {
      s.b += 1;
      tally.levels += 1;
    }
    if (!in_fork && s.a >= 1 && s.b >= 1) {
      in_fork = true;
      ++tally.forks_started;
    }
    // resolve forced settlements and instantaneous decisions
    for (;;) {
      if (is_winning(s, params)) {
        settle_win(s);
        s = {0, 0, 0};
        continue;
      }
      const auto& act = policy.at(s);
      if (!act) throw std::domain_error("policy has no action for reachable state " + to_string(s));
      if (act->kind == Action::Kind::Capitulate) {
        s = {0, act->target, capitulation_tag(s, act->target, params)};
        in_fork = false;
        continue;
      }
      if (act->kind == Action::Kind::Release) {
        tally.levels += 1;
        tally.m1_blocks += s.b + 1;
        if (s.c > 0) {
          tally.pf_claims += 1;
          tally.pf_value += payforward_amount(s.c, params);
        }
        if (in_fork) {
          ++tally.forks_won;
          in_fork = false;
        }
        s = {s.a - s.b - 1, 0, 0};
        continue;
      }
      break;  // Mine: wait for the next phase
    }
    if (trace) trace(batch, phase, who, s);
  }
  return tally;
}

}  // namespace

SimStats simulate(const SimConfig& config) {
  config.params.validate();
  if (config.phases < 1) throw std::invalid_argument("simulate: phases must be >= 1");
  if (config.batches < 1) throw std::invalid_argument("simulate: batches must be >= 1");

  const PolicyTable policy =
      config.policy ? *config.policy : frontier_policy(config.params);
  if (!(policy.grid == StateGrid::for_params(config.params)))
    throw std::invalid_argument("simulate: policy grid does not match the parameters");

  const int batches = static_cast<int>(std::min<long long>(config.batches, config.phases));
  std::vector<BatchTally> tallies;
  tallies.reserve(batches);
  const long long base = config.phases / batches;
  const long long extra = config.phases % batches;
  for (int i = 0; i < batches; ++i) {
    const long long n = base + (i < extra ? 1 : 0);
    tallies.push_back(run_batch(config.params, policy, n,
                                CounterRng(config.seed, static_cast<uint64_t>(i)), i,
                                config.trace));
  }

  SimStats stats;
  stats.phases = config.phases;
  for (const BatchTally& t : tallies) {
    stats.levels_settled += t.levels;
    stats.miner1_blocks += t.m1_blocks;
    stats.miner1_pf_claims += t.pf_claims;
    stats.miner1_pf_value += t.pf_value;
    stats.forks_started += t.forks_started;
    stats.forks_won += t.forks_won;
  }
  stats.q_m_hat = static_cast<double>(stats.miner1_blocks) / stats.levels_settled;
  stats.q_pf_hat = static_cast<double>(stats.miner1_pf_claims) / stats.levels_settled;
  stats.realized_gain_per_level =
      (stats.miner1_blocks + stats.miner1_pf_value) / stats.levels_settled;

  // standard errors from the spread of the per-batch ratios
  const auto se_of = [&](auto&& f, double mean) {
    if (tallies.size() < 2) return 0.0;
    double ss = 0.0;
    for (const BatchTally& t : tallies) {
      const double v = f(t) - mean;
      ss += v * v;
    }
    const double n = static_cast<double>(tallies.size());
    return std::sqrt(ss / (n - 1.0) / n);
  };
  stats.q_m_se = se_of([](const BatchTally& t) { return t.q_m(); }, stats.q_m_hat);
  stats.q_pf_se = se_of([](const BatchTally& t) { return t.q_pf(); }, stats.q_pf_hat);
  stats.gain_se =
      se_of([](const BatchTally& t) { return t.gain(); }, stats.realized_gain_per_level);
  return stats;
}

namespace {

struct BranchBlock {
  int owner = 0;
  double pf = 0.0;
};

}  // namespace

SmallMinersStats simulate_small_miners(const SmallMinersConfig& config) {
  const int n = config.n;
  if (n < 2) throw std::invalid_argument("simulate_small_miners: need at least two miners");
  if (static_cast<int>(config.hash_powers.size()) != n)
    throw std::invalid_argument("simulate_small_miners: hash_powers must list every miner");
  double sum = 0.0;
  for (double h : config.hash_powers) {
    if (h < 0.0) throw std::invalid_argument("simulate_small_miners: negative hash power");
    sum += h;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("simulate_small_miners: hash powers must sum to 1");
  if (config.deviant_index < 1 || config.deviant_index >= n)
    throw std::invalid_argument("simulate_small_miners: deviant must be a small miner");
  if (config.w < 0.0) throw std::invalid_argument("simulate_small_miners: w must be nonnegative");

  const double p = config.hash_powers[0];
  const double w = config.w;

  SmallMinersStats stats;
  stats.utilities.assign(n, 0.0);

  CounterRng rng(config.seed);
  const auto draw_small = [&]() {
    // conditional draw among the small miners
    double u = rng.next_unit() * (1.0 - p);
    for (int i = 1; i < n; ++i) {
      u -= config.hash_powers[i];
      if (u <= 0.0) return i;
    }
    return n - 1;
  };

  // settled tip of the chain
  double tip_pf = 0.0;
  bool deviation_armed = config.deviation == SmallMinerDeviation::SkipPayForwardOnce;

  // active undercut race, if any
  bool racing = false;
  double base_pf = 0.0;             // claimable at the fork base
  std::vector<BranchBlock> branch;  // honest branch, index 0 right above the base
  int m1_branch = 0;

  const auto pf_ok = [&](double pf) {
    return std::abs(pf) < 1e-12 || std::abs(pf - w) < 1e-12;
  };

  const auto settle_block = [&](int owner, double claim, double paid) {
    stats.utilities[owner] += 1.0 + claim - paid;
    stats.levels_settled += 1;
    if (!pf_ok(paid)) stats.chain_pf_valid = false;
  };

  double episode_base_pf = 0.0;
  long long kept = 0;
  double realized_sum = 0.0, compliant_sum = 0.0;

  for (long long phase = 0; phase < config.phases; ++phase) {
    const bool m1_mines = rng.bernoulli(p);
    if (!racing) {
      if (m1_mines) {
        settle_block(0, tip_pf, 0.0);
        tip_pf = 0.0;
        continue;
      }
      const int j = draw_small();
      const bool deviates = deviation_armed && j == config.deviant_index && w > 0.0;
      if (!deviates) {
        const double claim = tip_pf;
        settle_block(j, claim, w);
        tip_pf = w;
        if (deviation_armed && j == config.deviant_index) {
          // w == 0: the deviation is indistinguishable from compliance
          ++stats.episodes;
          ++kept;
          realized_sum += 1.0 + claim;
          compliant_sum += 1.0 + claim - w;
        }
        continue;
      }
      // the deviating block opens an undercut race one block behind it
      racing = true;
      deviation_armed = false;
      base_pf = tip_pf;
      episode_base_pf = base_pf;
      branch.assign(1, BranchBlock{j, 0.0});
      m1_branch = 0;
      continue;
    }

    // racing
    if (m1_mines) {
      ++m1_branch;
      if (m1_branch == static_cast<int>(branch.size()) + 1) {
        // overtaken: the honest branch (and the deviating block) is orphaned
        stats.utilities[0] += m1_branch + base_pf;
        stats.levels_settled += m1_branch;
        ++stats.episodes;
        realized_sum += 0.0;
        compliant_sum += 1.0 + episode_base_pf - w;
        racing = false;
        tip_pf = 0.0;
        deviation_armed = config.deviation == SmallMinerDeviation::SkipPayForwardOnce;
      }
      continue;
    }
    const int j = draw_small();
    branch.push_back(BranchBlock{j, w});
    // undercut response: mine from {(0,1),(1,1),(1,2),(2,2)}, give up once
    // two behind or once the honest branch reaches three blocks
    if (static_cast<int>(branch.size()) - m1_branch >= 2 ||
        static_cast<int>(branch.size()) >= 3) {
      // Miner 1 capitulates to the tip: the whole honest branch settles
      double claim = base_pf;
      for (const BranchBlock& blk : branch) {
        settle_block(blk.owner, claim, blk.pf);
        claim = blk.pf;
      }
      ++stats.episodes;
      ++kept;
      realized_sum += 1.0 + episode_base_pf;  // the deviating block paid nothing
      compliant_sum += 1.0 + episode_base_pf - w;
      racing = false;
      tip_pf = branch.back().pf;
      deviation_armed = config.deviation == SmallMinerDeviation::SkipPayForwardOnce;
    }
  }

  stats.blocks_kept = kept;
  if (stats.episodes > 0) {
    stats.keep_rate = static_cast<double>(kept) / stats.episodes;
    stats.keep_se =
        std::sqrt(stats.keep_rate * (1.0 - stats.keep_rate) / stats.episodes);
    stats.deviant_realized = realized_sum / stats.episodes;
    stats.deviant_compliant = compliant_sum / stats.episodes;
  }
  if (stats.levels_settled > 0)
    for (double& u : stats.utilities) u /= stats.levels_settled;
  return stats;
}

}  // namespace payforward
