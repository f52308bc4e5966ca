#pragma once

namespace payforward {

// Upper bound (p/(1-p))^gap on the probability that Miner 1 overtakes a
// branch lead of `gap` blocks.
double gamblers_ruin_bound(double p, int gap);

// Stationary probability of the capitulated state in the two-state renewal
// chain: pi = alpha(1-p) / (alpha(1-p) + beta). Throws when both the
// inflow and outflow are zero.
double stationary_pi(double alpha, double beta, double p);

// Best-case pay-forward rate of a deviating strategy that mines one step
// behind: q_PF <= (1-p) p^2 / (1 - (1-p) p (3-2p)).
double case1_qpf_bound(double p);

// p(1-p) minus the bound above, in the simplified form
// p (1-p)^3 (1-2p) / (1 - (1-p) p (3-2p)); zero exactly at p = 0 and 0.5.
double case1_advantage(double p);

// Frontier's pay-forward advantage when the deviant mines at (0,1,1) but
// capitulates at (0,1,0); the closed form behind the second plotted series.
double case2_advantage(double p);

// Unique root in (0, 0.5) of -p^4 + 3p^3 - 7p^2 + 5p - 1, located by
// bisection to 1e-10. Below it the strategic-release potential argument
// goes through with some w < 1.
double strategic_threshold();

// Value of (p-1)(p^3 w - p^2 (w+1) + p(2cw+5) - cw) + 1; nonnegative iff
// releasing beats continued mining at a = b + 1 for every b >= 0.
double release_claim_value(double p, double w, int c);

struct PneCheck {
  double deviation_payoff = 0.0;   // (1+w)(1 - p^2 - (1-p) p^3)
  double compliant_payoff = 0.0;   // 1 - w
  bool supports_equilibrium = false;
};

// Small-miner deviation test: skipping the pay-forward risks the block
// being undercut by Miner 1, keeping it only with probability
// 1 - p^2 - (1-p)p^3.
PneCheck pne_deviation_check(double p, double w);

}  // namespace payforward
