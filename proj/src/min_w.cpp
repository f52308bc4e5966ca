#include "payforward/min_w.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "payforward/potential.hpp"
#include "payforward/value_iteration.hpp"

namespace payforward {

namespace {

constexpr double kGainTol = 1e-6;
constexpr double kEngineTol = 1e-4;
constexpr double kSearchCeiling = 2.0;

MiningParams with_amount(double p, double amount, int d, ReleaseVariant variant,
                         PayforwardScheme scheme) {
  MiningParams params;
  params.p = p;
  params.d = d;
  params.variant = variant;
  params.scheme = scheme;
  if (scheme == PayforwardScheme::Shared)
    params.w_half = amount;
  else
    params.w = amount;
  return params;
}

struct PredicateOutcome {
  bool holds = false;
  double residual = 0.0;
};

PredicateOutcome frontier_predicate(const MiningParams& params) {
  const double honest = honest_gain(params);
  const PotentialSolution sol = solve_lp(build_lp(params));
  PredicateOutcome out;
  out.residual = std::abs(sol.g - honest);
  if (out.residual > kGainTol) return out;
  if (!verify_potential(sol).all_tight) return out;
  const GainEstimate vi = gain_per_level(value_iterate_converged(params));
  if (std::abs(vi.g_star - honest) > kEngineTol) return out;
  out.holds = true;
  return out;
}

}  // namespace

bool is_frontier_best_response(const MiningParams& params) {
  params.validate();
  return frontier_predicate(params).holds;
}

bool is_frontier_best_response(double p, double w, int d, ReleaseVariant variant,
                               PayforwardScheme scheme) {
  return is_frontier_best_response(with_amount(p, w, d, variant, scheme));
}

MinWResult min_w(double p, int d, ReleaseVariant variant, PayforwardScheme scheme, double tol) {
  MinWResult result;
  result.p = p;
  result.d = d;
  result.variant = variant;
  result.scheme = scheme;
  result.certified_by = Certification::Both;

  // The nonnegative pinned potential certifies compliance only while the
  // honest gain stays within the block reward, so the search stops there.
  const double gain_ceiling = scheme == PayforwardScheme::Shared
                                  ? 1.0 / (p * (2.0 - p))
                                  : 1.0 / p;
  const double ceiling = std::min(kSearchCeiling, gain_ceiling);

  const PredicateOutcome at_zero = frontier_predicate(with_amount(p, 0.0, d, variant, scheme));
  if (at_zero.holds) {
    result.w_min = 0.0;
    result.residual = at_zero.residual;
    return result;
  }
  PredicateOutcome at_hi = frontier_predicate(with_amount(p, ceiling, d, variant, scheme));
  if (!at_hi.holds)
    throw std::domain_error("min_w: no compliance within the pay-forward bound " +
                            std::to_string(ceiling));

  double lo = 0.0, hi = ceiling;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const PredicateOutcome at_mid = frontier_predicate(with_amount(p, mid, d, variant, scheme));
    if (at_mid.holds) {
      hi = mid;
      at_hi = at_mid;
    } else {
      lo = mid;
    }
  }
  result.w_min = hi;
  result.residual = at_hi.residual;
  return result;
}

std::vector<CurvePoint> curve(double p_from, double p_to, double p_step, int d,
                              ReleaseVariant variant, PayforwardScheme scheme) {
  if (p_step <= 0.0) throw std::invalid_argument("curve: p_step must be positive");
  std::vector<CurvePoint> points;
  const int count = static_cast<int>(std::floor((p_to - p_from) / p_step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) {
    const double p = p_from + i * p_step;
    CurvePoint point;
    point.p = p;
    try {
      point.result = min_w(p, d, variant, scheme);
      point.ok = true;
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    points.push_back(std::move(point));
  }
  return points;
}

std::string to_string(ReleaseVariant variant) {
  return variant == ReleaseVariant::Immediate ? "immediate" : "strategic";
}

std::string to_string(PayforwardScheme scheme) {
  return scheme == PayforwardScheme::Uniform ? "uniform" : "shared";
}

std::string curve_csv(const std::vector<CurvePoint>& points) {
  std::string out = "p,w_min,variant,scheme,d,residual\n";
  char line[160];
  for (const CurvePoint& point : points) {
    if (!point.ok) continue;
    const MinWResult& r = point.result;
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%s,%s,%d,%.6g\n", r.p, r.w_min,
                  to_string(r.variant).c_str(), to_string(r.scheme).c_str(), r.d, r.residual);
    out += line;
  }
  return out;
}

}  // namespace payforward
