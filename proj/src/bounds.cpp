#include "payforward/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace payforward {

double gamblers_ruin_bound(double p, int gap) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("gamblers_ruin_bound: p must be in (0,1)");
  if (gap < 0) throw std::invalid_argument("gamblers_ruin_bound: gap must be nonnegative");
  return std::pow(p / (1.0 - p), gap);
}

double stationary_pi(double alpha, double beta, double p) {
  const double inflow = alpha - alpha * p;
  if (inflow + beta == 0.0)
    throw std::invalid_argument("stationary_pi: degenerate chain (alpha(1-p) and beta both zero)");
  return inflow / (inflow + beta);
}

double case1_qpf_bound(double p) {
  return (1.0 - p) * p * p / (1.0 - (1.0 - p) * p * (3.0 - 2.0 * p));
}

double case1_advantage(double p) {
  const double q = 1.0 - p;
  return p * q * q * q * (1.0 - 2.0 * p) / (1.0 - q * p * (3.0 - 2.0 * p));
}

double case2_advantage(double p) {
  const double num = -((p - 1.0) * (p - 1.0) * (p - 1.0) * p * (2.0 * p - 1.0) *
                       (p * p + p - 1.0));
  const double den = 1.0 + (p - 1.0) * p * (4.0 + p * (-4.0 + p * (2.0 * p - 1.0)));
  return num / den;
}

namespace {

double threshold_poly(double p) {
  return -std::pow(p, 4) + 3.0 * std::pow(p, 3) - 7.0 * p * p + 5.0 * p - 1.0;
}

}  // namespace

double strategic_threshold() {
  double lo = 0.0, hi = 0.5;  // poly(0) = -1 < 0 < poly(0.5)
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (threshold_poly(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double release_claim_value(double p, double w, int c) {
  if (c != 0 && c != 1) throw std::invalid_argument("release_claim_value: c must be 0 or 1");
  const double inner =
      p * p * p * w - p * p * (w + 1.0) + p * (2.0 * c * w + 5.0) - c * w;
  return (p - 1.0) * inner + 1.0;
}

PneCheck pne_deviation_check(double p, double w) {
  PneCheck out;
  out.deviation_payoff = (1.0 + w) * (1.0 - p * p - (1.0 - p) * p * p * p);
  out.compliant_payoff = 1.0 - w;
  out.supports_equilibrium = out.deviation_payoff <= out.compliant_payoff;
  return out;
}

}  // namespace payforward
