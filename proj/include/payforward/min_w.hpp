#pragma once

#include <string>
#include <vector>

#include "payforward/game.hpp"

namespace payforward {

enum class Certification { Lp, ValueIteration, Both };

struct MinWResult {
  double p = 0.0;
  int d = 8;
  ReleaseVariant variant = ReleaseVariant::Immediate;
  PayforwardScheme scheme = PayforwardScheme::Uniform;
  double w_min = 0.0;  // the shared scheme reports the per-miner amount w'
  Certification certified_by = Certification::Both;
  double residual = 0.0;  // |g_LP - honest| at the certified amount
};

// Frontier is a best response iff the LP gain matches the honest gain, the
// potential is tight, and value iteration agrees with the LP.
bool is_frontier_best_response(const MiningParams& params);
bool is_frontier_best_response(double p, double w, int d, ReleaseVariant variant,
                               PayforwardScheme scheme);

// Binary search for the least pay-forward amount that makes Frontier a best
// response. Throws std::domain_error when even the search ceiling (2.0)
// does not suffice.
MinWResult min_w(double p, int d, ReleaseVariant variant, PayforwardScheme scheme,
                 double tol = 1e-4);

struct CurvePoint {
  double p = 0.0;
  bool ok = false;
  MinWResult result;
  std::string error;
};

// One minimum-w computation per grid point; failures are recorded and the
// sweep continues.
std::vector<CurvePoint> curve(double p_from, double p_to, double p_step, int d,
                              ReleaseVariant variant, PayforwardScheme scheme);

std::string to_string(ReleaseVariant variant);
std::string to_string(PayforwardScheme scheme);

// Rows "p,w_min,variant,scheme,d,residual" with a header, six decimals.
std::string curve_csv(const std::vector<CurvePoint>& points);

}  // namespace payforward
