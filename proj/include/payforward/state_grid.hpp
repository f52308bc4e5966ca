#pragma once

#include "payforward/game.hpp"

namespace payforward {

// Dense index over the truncated (a, b, c) grid shared by the solvers.
struct StateGrid {
  int a_count = 0;
  int b_count = 0;
  int c_count = 0;

  static StateGrid for_params(const MiningParams& params) {
    return {params.own_branch_cap() + 1, params.d + 1, params.tag_count()};
  }

  int size() const { return a_count * b_count * c_count; }

  bool contains(int a, int b, int c) const {
    return a >= 0 && a < a_count && b >= 0 && b < b_count && c >= 0 && c < c_count;
  }

  int index(int a, int b, int c) const { return (a * b_count + b) * c_count + c; }
  int index(const ForkState& s) const { return index(s.a, s.b, s.c); }

  ForkState state(int idx) const {
    const int c = idx % c_count;
    idx /= c_count;
    const int b = idx % b_count;
    const int a = idx / b_count;
    return {a, b, c};
  }

  friend bool operator==(const StateGrid&, const StateGrid&) = default;
};

}  // namespace payforward
