#pragma once

#include <string>
#include <vector>

namespace payforward {

// Whether Miner 1 must publish blocks as he mines them or may withhold
// and release them later to waste the honest miners' work.
enum class ReleaseVariant { Immediate, Strategic };

// How the honest miners fund the pay-forward reward.
//   Uniform: every honest block attaches w.
//   Shared:  the first honest block after a Miner 1 block attaches w',
//            every later honest block attaches 2w', until Miner 1 claims.
enum class PayforwardScheme { Uniform, Shared };

struct MiningParams {
  double p = 0.3;   // hash power of Miner 1, 0 < p < 1
  double w = 0.0;   // pay-forward per honest block (uniform scheme)
  int d = 8;        // truncation depth: Miner 1 must capitulate at b == d
  ReleaseVariant variant = ReleaseVariant::Immediate;
  PayforwardScheme scheme = PayforwardScheme::Uniform;
  double w_half = 0.0;  // per-miner amount w' (shared scheme)

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;

  bool strategic() const { return variant == ReleaseVariant::Strategic; }
  bool shared() const { return scheme == PayforwardScheme::Shared; }

  // Fork-base tags are 0..tag_count()-1; the attached amount is tag * unit.
  int tag_count() const { return shared() ? 3 : 2; }
  double payforward_unit() const { return shared() ? w_half : w; }

  // Largest own-branch length kept in the truncated game. The immediate
  // variant never exceeds d; the strategic variant is capped at 2d, where
  // mining is replaced by a forced release.
  int own_branch_cap() const { return strategic() ? 2 * d : d; }

  friend bool operator==(const MiningParams&, const MiningParams&) = default;
};

// Fork state (a, b, c): a blocks on Miner 1's branch past the fork, b on
// Miner 2's, and c counts the pay-forward units carried by the last block
// before the fork (claimable by the winner of the next level). In the
// strategic variant the released count is implied: a_r = min(a, b).
struct ForkState {
  int a = 0;
  int b = 0;
  int c = 0;

  friend bool operator==(const ForkState&, const ForkState&) = default;
};

std::string to_string(const ForkState& s);

struct Action {
  enum class Kind { Mine, Capitulate, Release };

  Kind kind = Kind::Mine;
  int target = 0;  // capitulation target s, 0 <= s < b

  static Action mine() { return {Kind::Mine, 0}; }
  static Action capitulate_to(int s) { return {Kind::Capitulate, s}; }
  static Action release() { return {Kind::Release, 0}; }

  friend bool operator==(const Action&, const Action&) = default;
};

std::string to_string(const Action& a);

enum class Event { Miner1Mines, Miner2Mines, Settle };

struct TransitionOutcome {
  ForkState next;
  double reward_to_miner1 = 0.0;
  int levels_added = 0;
};

bool state_valid(const ForkState& s, const MiningParams& params);

// Immediate variant only: at a == b + 1 Miner 2 capitulates and the branch
// settles without any decision by Miner 1.
bool is_winning(const ForkState& s, const MiningParams& params);

// Amount attached to a fork base carrying tag c. Throws on a tag/scheme
// mismatch.
double payforward_amount(int tag, const MiningParams& params);

// Tag of the new fork base after capitulating from `at` to (0, s, .).
// Every Miner 2 block carries a claimable pay-forward, so the tag is
// always positive. Under the shared scheme the target block carries w'
// exactly when it directly follows a Miner 1 block, i.e. it is the first
// block above a settled fork base (b - s == 1 and c == 0); otherwise 2w'.
int capitulation_tag(const ForkState& at, int s, const MiningParams& params);

// Winning states have no legal action (settlement is forced). Mine is
// excluded at b == d, and in the strategic variant at a == 2d where it is
// replaced by a forced release.
std::vector<Action> legal_actions(const ForkState& s, const MiningParams& params);

// Applies one action/event pair:
//   winning state + Settle      -> (0,0,0), reward a + pf(c), one level
//   Mine + Miner1Mines          -> (a+1, b, c), no reward, no level
//   Mine + Miner2Mines          -> (a, b+1, c), no reward, one level
//   Capitulate(s) + Settle      -> (0, s, capitulation tag), no reward
//   Release + Settle            -> (a-b-1, 0, 0), reward b + 1 + pf(c), one level
// Illegal pairings throw std::invalid_argument naming the precondition.
TransitionOutcome transition(const ForkState& s, const Action& action, Event event,
                             const MiningParams& params);

// Long-run gain per level of Miner 1 playing Frontier against Frontier(w):
// the coinbase share p plus the pay-forward stream claimable by his blocks.
double honest_gain(const MiningParams& params);

}  // namespace payforward
