#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "payforward/bounds.hpp"
#include "payforward/game.hpp"
#include "payforward/min_w.hpp"
#include "payforward/potential.hpp"
#include "payforward/simulator.hpp"
#include "payforward/value_iteration.hpp"

namespace payforward::cli {

namespace {

using nlohmann::json;

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::filesystem::path resolve_out(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv("PFLAB_OUT_DIR")) return std::filesystem::path(dir) / p;
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file " + path.string());
  os << body;
}

struct CommonOpts {
  double p = 0.3;
  double w = 0.0;
  double w_half = 0.0;
  int d = 8;
  std::string variant = "immediate";
  std::string scheme = "uniform";

  MiningParams params() const {
    MiningParams out;
    out.p = p;
    out.w = w;
    out.w_half = w_half;
    out.d = d;
    out.variant = variant == "strategic" ? ReleaseVariant::Strategic : ReleaseVariant::Immediate;
    out.scheme = scheme == "shared" ? PayforwardScheme::Shared : PayforwardScheme::Uniform;
    return out;
  }

  json to_json() const {
    return json{{"p", p},      {"w", w},           {"w_half", w_half},
                {"d", d},      {"variant", variant}, {"scheme", scheme}};
  }
};

void add_common(CLI::App* cmd, CommonOpts* opts, bool with_w) {
  cmd->add_option("--p", opts->p, "hash power of Miner 1")
      ->required()
      ->check(CLI::Range(1e-6, 1.0 - 1e-6));
  if (with_w) {
    cmd->add_option("--w", opts->w, "pay-forward per honest block (uniform)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--w-half", opts->w_half, "per-miner pay-forward w' (shared)")
        ->check(CLI::NonNegativeNumber);
  }
  cmd->add_option("--d", opts->d, "truncation depth")->check(CLI::Range(1, 64));
  cmd->add_option("--variant", opts->variant, "release variant")
      ->check(CLI::IsMember({"immediate", "strategic"}));
  cmd->add_option("--scheme", opts->scheme, "pay-forward scheme")
      ->check(CLI::IsMember({"uniform", "shared"}));
}

void write_manifest(const std::string& subcommand, const json& params, uint64_t seed,
                    double wall_seconds, const std::vector<std::string>& outputs) {
  json manifest{{"schema_version", 1},
                {"tool", "pflab"},
                {"version", kVersion},
                {"subcommand", subcommand},
                {"params", params},
                {"seed", seed},
                {"wall_clock_seconds", wall_seconds},
                {"outputs", outputs}};
  for (const std::string& path : outputs)
    write_file(resolve_out(path + ".manifest.json"), manifest.dump(2) + "\n");
}

std::string class_name(StateClass cls) {
  switch (cls) {
    case StateClass::Winning: return "winning";
    case StateClass::Mining: return "mining";
    case StateClass::Capitulation: return "capitulation";
    case StateClass::Release: return "release";
  }
  return "?";
}

std::string policy_csv(const PolicyTable& policy) {
  std::string csv = "a,b,c,class,action\n";
  for (int idx = 0; idx < policy.grid.size(); ++idx) {
    const ForkState s = policy.grid.state(idx);
    if (!state_valid(s, policy.params)) continue;
    const auto& act = policy.actions[idx];
    csv += std::to_string(s.a) + "," + std::to_string(s.b) + "," + std::to_string(s.c) + "," +
           class_name(policy.classes[idx]) + "," + (act ? to_string(*act) : "-") + "\n";
  }
  return csv;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"solver and simulator laboratory for the mining game with pay-forward"};
  app.require_subcommand(1);

  CommonOpts solve_opts;
  std::string solve_out;
  auto* solve_cmd = app.add_subcommand("solve", "gain per level and optimal policy");
  add_common(solve_cmd, &solve_opts, true);
  solve_cmd->add_option("--out", solve_out, "write the policy table as CSV");

  CommonOpts minw_opts;
  double minw_tol = 1e-4;
  auto* minw_cmd = app.add_subcommand("min-w", "least pay-forward making Frontier a best response");
  add_common(minw_cmd, &minw_opts, false);
  minw_cmd->add_option("--tol", minw_tol, "binary search tolerance")->check(CLI::PositiveNumber);

  CommonOpts curve_opts;
  double p_from = 0.42, p_to = 0.5, p_step = 0.01;
  std::string curve_out;
  auto* curve_cmd = app.add_subcommand("curve", "sweep min-w over a range of p");
  curve_cmd->add_option("--p-from", p_from, "first p")->required()->check(CLI::Range(1e-6, 1.0));
  curve_cmd->add_option("--p-to", p_to, "last p")->required()->check(CLI::Range(1e-6, 1.0));
  curve_cmd->add_option("--p-step", p_step, "grid step")->check(CLI::PositiveNumber);
  curve_cmd->add_option("--d", curve_opts.d, "truncation depth")->check(CLI::Range(1, 64));
  curve_cmd->add_option("--variant", curve_opts.variant, "release variant")
      ->check(CLI::IsMember({"immediate", "strategic"}));
  curve_cmd->add_option("--scheme", curve_opts.scheme, "pay-forward scheme")
      ->check(CLI::IsMember({"uniform", "shared"}));
  curve_cmd->add_option("--out", curve_out, "write the sweep as CSV");

  double bounds_p = 0.3;
  auto* bounds_cmd = app.add_subcommand("bounds", "closed-form bounds at a given p");
  bounds_cmd->add_option("--p", bounds_p, "hash power")->required()->check(CLI::Range(0.0, 0.5));

  CommonOpts verify_opts;
  int verify_k = 200;
  std::string dump_path;
  auto* verify_cmd = app.add_subcommand("verify", "potential, induction and claim checks");
  add_common(verify_cmd, &verify_opts, true);
  verify_cmd->add_option("--k", verify_k, "layers for the induction bound")
      ->check(CLI::Range(2, 5000));
  verify_cmd->add_option("--dump-lp", dump_path, "write the LP as a plain-text listing");

  CommonOpts sim_opts;
  long long sim_phases = 1000000;
  uint64_t sim_seed = 0;
  std::string sim_policy = "frontier", sim_json, sim_trace;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo chain simulation");
  add_common(sim_cmd, &sim_opts, true);
  sim_cmd->add_option("--phases", sim_phases, "number of phases")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_seed, "RNG seed");
  sim_cmd->add_option("--policy", sim_policy, "Miner 1 policy")
      ->check(CLI::IsMember({"frontier", "optimal"}));
  sim_cmd->add_option("--json", sim_json, "write stats as JSON");
  sim_cmd->add_option("--trace", sim_trace, "write a per-phase CSV trace");

  double pne_p = 0.44, pne_w = 0.0;
  auto* pne_cmd = app.add_subcommand("pne-check", "small-miner deviation payoffs");
  pne_cmd->add_option("--p", pne_p, "hash power")->required()->check(CLI::Range(1e-6, 0.5));
  pne_cmd->add_option("--w", pne_w, "pay-forward amount")->required()->check(CLI::NonNegativeNumber);

  std::vector<const char*> argv;
  argv.push_back("pflab");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  Timer timer;
  try {
    if (*solve_cmd) {
      const MiningParams params = solve_opts.params();
      params.validate();
      const ValueTable table = value_iterate_converged(params);
      const GainEstimate est = gain_per_level(table);
      const PotentialSolution sol = solve_lp(build_lp(params));
      const PolicyTable policy = extract_policy(table);
      out << "g_lp " << fmt6(sol.g) << "\n";
      out << "g_vi " << fmt6(est.g_star) << "\n";
      out << "honest " << fmt6(honest_gain(params)) << "\n";
      out << "vi_converged " << (est.converged ? 1 : 0) << "\n";
      out << "vi_horizon " << table.horizon << "\n";
      const std::string csv = policy_csv(policy);
      if (solve_out.empty()) {
        out << csv;
      } else {
        write_file(resolve_out(solve_out), csv);
        write_manifest("solve", solve_opts.to_json(), 0, timer.seconds(), {solve_out});
      }
      return 0;
    }
    if (*minw_cmd) {
      const MiningParams probe = minw_opts.params();
      const MinWResult result =
          min_w(minw_opts.p, minw_opts.d, probe.variant, probe.scheme, minw_tol);
      out << fmt6(result.w_min) << "\n";
      return 0;
    }
    if (*curve_cmd) {
      const MiningParams probe = curve_opts.params();
      const auto points = curve(p_from, p_to, p_step, curve_opts.d, probe.variant, probe.scheme);
      for (const CurvePoint& point : points)
        if (!point.ok) err << "p=" << fmt6(point.p) << ": " << point.error << "\n";
      const std::string csv = curve_csv(points);
      out << csv;
      if (!curve_out.empty()) {
        write_file(resolve_out(curve_out), csv);
        json params = curve_opts.to_json();
        params["p_from"] = p_from;
        params["p_to"] = p_to;
        params["p_step"] = p_step;
        write_manifest("curve", params, 0, timer.seconds(), {curve_out});
      }
      return 0;
    }
    if (*bounds_cmd) {
      out << "case1_qpf_bound " << fmt6(case1_qpf_bound(bounds_p)) << "\n";
      out << "case1_advantage " << fmt6(case1_advantage(bounds_p)) << "\n";
      out << "case2_advantage " << fmt6(case2_advantage(bounds_p)) << "\n";
      out << "strategic_threshold " << fmt6(strategic_threshold()) << "\n";
      out << "release_claim_w1_c0 " << fmt6(release_claim_value(bounds_p, 1.0, 0)) << "\n";
      out << "release_claim_w1_c1 " << fmt6(release_claim_value(bounds_p, 1.0, 1)) << "\n";
      if (bounds_p > 0.0)
        for (int gap = 1; gap <= 3; ++gap)
          out << "gamblers_ruin_gap" << gap << " " << fmt6(gamblers_ruin_bound(bounds_p, gap))
              << "\n";
      return 0;
    }
    if (*verify_cmd) {
      const MiningParams params = verify_opts.params();
      params.validate();
      const LinearProgramSpec spec = build_lp(params);
      if (!dump_path.empty()) {
        std::ostringstream dump;
        dump_lp(spec, dump);
        write_file(resolve_out(dump_path), dump.str());
        write_manifest("verify", verify_opts.to_json(), 0, timer.seconds(), {dump_path});
      }
      const PotentialSolution sol = solve_lp(spec);
      const PotentialReport report = verify_potential(sol);
      const ValueTable table = value_iterate(params, verify_k, /*keep_layers=*/true);
      const bool bound_ok = check_induction_bound(sol, table);
      out << "g_lp " << fmt6(sol.g) << "\n";
      out << "honest " << fmt6(honest_gain(params)) << "\n";
      out << "phi_root " << fmt6(sol.phi_at(0, 0, 0)) << "\n";
      out << "max_slack " << report.max_slack << "\n";
      out << "all_tight " << (report.all_tight ? 1 : 0) << "\n";
      out << "frontier_readback " << (report.frontier_readback ? 1 : 0) << "\n";
      out << "induction_bound_k " << table.horizon << "\n";
      out << "induction_bound " << (bound_ok ? 1 : 0) << "\n";
      bool upper_ok = true;
      if (!params.strategic() && !params.shared()) {
        upper_ok = check_potential_upper_bound(sol, params.p, params.w);
        out << "potential_upper_bound " << (upper_ok ? 1 : 0) << "\n";
      }
      if (!params.shared() && std::abs(params.p - 0.5) > 1e-9) {
        const PhiBar bar = make_phi_bar(params.p, params.w, params.d);
        const StrategicClaimsReport claims = check_strategic_claims(params.p, params.w, bar);
        out << "strategic_claims_hold " << (claims.all_hold() ? 1 : 0) << " violations "
            << claims.violations.size() << "\n";
      }
      return (report.all_tight && bound_ok && upper_ok) ? 0 : 1;
    }
    if (*sim_cmd) {
      const MiningParams params = sim_opts.params();
      params.validate();
      SimConfig config;
      config.params = params;
      config.phases = sim_phases;
      config.seed = sim_seed;
      if (sim_policy == "optimal")
        config.policy = extract_policy(value_iterate_converged(params));
      std::ofstream trace_stream;
      if (!sim_trace.empty()) {
        trace_stream.open(resolve_out(sim_trace), std::ios::binary);
        if (!trace_stream) throw std::runtime_error("cannot open trace file " + sim_trace);
        trace_stream << "batch,phase,miner,a,b,c\n";
        config.trace = [&trace_stream](int batch, long long phase, char who,
                                       const ForkState& s) {
          trace_stream << batch << ',' << phase << ',' << who << ',' << s.a << ',' << s.b << ','
                       << s.c << '\n';
        };
      }
      const SimStats stats = simulate(config);
      out << "phases " << stats.phases << "\n";
      out << "levels_settled " << stats.levels_settled << "\n";
      out << "miner1_blocks " << stats.miner1_blocks << "\n";
      out << "miner1_pf_claims " << stats.miner1_pf_claims << "\n";
      out << "miner1_pf_value " << fmt6(stats.miner1_pf_value) << "\n";
      out << "forks_started " << stats.forks_started << "\n";
      out << "forks_won " << stats.forks_won << "\n";
      out << "q_m_hat " << fmt6(stats.q_m_hat) << " se " << fmt6(stats.q_m_se) << "\n";
      out << "q_pf_hat " << fmt6(stats.q_pf_hat) << " se " << fmt6(stats.q_pf_se) << "\n";
      out << "gain_per_level " << fmt6(stats.realized_gain_per_level) << " se "
          << fmt6(stats.gain_se) << "\n";
      std::vector<std::string> outputs;
      if (!sim_trace.empty()) outputs.push_back(sim_trace);
      if (!sim_json.empty()) {
        json payload{{"schema_version", 1},
                     {"params", sim_opts.to_json()},
                     {"seed", sim_seed},
                     {"phases", stats.phases},
                     {"policy", sim_policy},
                     {"levels_settled", stats.levels_settled},
                     {"miner1_blocks", stats.miner1_blocks},
                     {"miner1_pf_claims", stats.miner1_pf_claims},
                     {"miner1_pf_value", stats.miner1_pf_value},
                     {"forks_started", stats.forks_started},
                     {"forks_won", stats.forks_won},
                     {"q_m_hat", stats.q_m_hat},
                     {"q_m_se", stats.q_m_se},
                     {"q_pf_hat", stats.q_pf_hat},
                     {"q_pf_se", stats.q_pf_se},
                     {"gain_per_level", stats.realized_gain_per_level},
                     {"gain_se", stats.gain_se}};
        write_file(resolve_out(sim_json), payload.dump(2) + "\n");
        outputs.push_back(sim_json);
      }
      if (!outputs.empty())
        write_manifest("simulate", sim_opts.to_json(), sim_seed, timer.seconds(), outputs);
      return 0;
    }
    if (*pne_cmd) {
      const PneCheck check = pne_deviation_check(pne_p, pne_w);
      out << "deviation_payoff " << fmt6(check.deviation_payoff) << "\n";
      out << "compliant_payoff " << fmt6(check.compliant_payoff) << "\n";
      out << "equilibrium_supporting " << (check.supports_equilibrium ? 1 : 0) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace payforward::cli
