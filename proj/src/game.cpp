#include "payforward/game.hpp"

#include <stdexcept>

namespace payforward {

void MiningParams::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("MiningParams: p must lie in (0, 1)");
  if (w < 0.0) throw std::invalid_argument("MiningParams: w must be nonnegative");
  if (d < 1) throw std::invalid_argument("MiningParams: d must be at least 1");
  if (shared() && w_half < 0.0)
    throw std::invalid_argument("MiningParams: w_half must be nonnegative");
}

std::string to_string(const ForkState& s) {
  return "(" + std::to_string(s.a) + "," + std::to_string(s.b) + "," + std::to_string(s.c) + ")";
}

std::string to_string(const Action& a) {
  switch (a.kind) {
    case Action::Kind::Mine: return "mine";
    case Action::Kind::Capitulate: return "capitulate(" + std::to_string(a.target) + ")";
    case Action::Kind::Release: return "release";
  }
  return "?";
}

bool state_valid(const ForkState& s, const MiningParams& params) {
  if (s.a < 0 || s.b < 0 || s.c < 0) return false;
  if (s.b > params.d) return false;
  if (s.c >= params.tag_count()) return false;
  if (s.a > params.own_branch_cap()) return false;
  if (!params.strategic() && s.a > s.b + 1) return false;
  return true;
}

bool is_winning(const ForkState& s, const MiningParams& params) {
  return !params.strategic() && s.a == s.b + 1;
}

double payforward_amount(int tag, const MiningParams& params) {
  if (tag < 0 || tag >= params.tag_count())
    throw std::invalid_argument("payforward_amount: tag " + std::to_string(tag) +
                                " invalid for this scheme");
  return tag * params.payforward_unit();
}

int capitulation_tag(const ForkState& at, int s, const MiningParams& params) {
  if (!params.shared()) return 1;
  return (at.b - s == 1 && at.c == 0) ? 1 : 2;
}

namespace {

void require_state(const ForkState& s, const MiningParams& params) {
  if (!state_valid(s, params))
    throw std::invalid_argument("invalid state " + to_string(s));
}

}  // namespace

std::vector<Action> legal_actions(const ForkState& s, const MiningParams& params) {
  require_state(s, params);
  std::vector<Action> acts;
  if (is_winning(s, params)) return acts;  // settlement is forced
  bool mine_ok = s.b < params.d;
  if (params.strategic() && s.a == params.own_branch_cap()) mine_ok = false;
  if (mine_ok) acts.push_back(Action::mine());
  for (int t = 0; t < s.b; ++t) acts.push_back(Action::capitulate_to(t));
  if (params.strategic() && s.a >= s.b + 1) acts.push_back(Action::release());
  return acts;
}

TransitionOutcome transition(const ForkState& s, const Action& action, Event event,
                             const MiningParams& params) {
  require_state(s, params);
  if (is_winning(s, params)) {
    if (event != Event::Settle)
      throw std::invalid_argument("winning state " + to_string(s) + " only admits Settle");
    return {ForkState{0, 0, 0}, s.a + payforward_amount(s.c, params), 1};
  }
  switch (action.kind) {
    case Action::Kind::Mine: {
      if (s.b >= params.d)
        throw std::invalid_argument("mining is illegal at b == d (forced capitulation)");
      if (params.strategic() && s.a >= params.own_branch_cap())
        throw std::invalid_argument("mining is illegal at the own-branch cap (forced release)");
      if (event == Event::Miner1Mines) return {ForkState{s.a + 1, s.b, s.c}, 0.0, 0};
      if (event == Event::Miner2Mines) return {ForkState{s.a, s.b + 1, s.c}, 0.0, 1};
      throw std::invalid_argument("Mine requires a Miner1Mines or Miner2Mines event");
    }
    case Action::Kind::Capitulate: {
      if (action.target < 0 || action.target >= s.b)
        throw std::invalid_argument("capitulation target must satisfy 0 <= s < b");
      if (event != Event::Settle)
        throw std::invalid_argument("Capitulate resolves with a Settle event");
      return {ForkState{0, action.target, capitulation_tag(s, action.target, params)}, 0.0, 0};
    }
    case Action::Kind::Release: {
      if (!params.strategic())
        throw std::invalid_argument("Release is only legal in the strategic variant");
      if (s.a < s.b + 1)
        throw std::invalid_argument("Release requires a >= b + 1");
      if (event != Event::Settle)
        throw std::invalid_argument("Release resolves with a Settle event");
      return {ForkState{s.a - s.b - 1, 0, 0}, s.b + 1 + payforward_amount(s.c, params), 1};
    }
  }
  throw std::invalid_argument("unknown action");
}

double honest_gain(const MiningParams& params) {
  params.validate();
  const double p = params.p;
  if (!params.shared()) return p + p * (1.0 - p) * params.w;
  // A claimable honest block carries w' when it directly follows a Miner 1
  // block (probability p for its predecessor), 2w' otherwise.
  return p + p * (1.0 - p) * (p * params.w_half + (1.0 - p) * 2.0 * params.w_half);
}

}  // namespace payforward
