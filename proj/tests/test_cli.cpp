#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

struct RunResult {
  int status = 0;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  RunResult result;
  result.status = payforward::cli::run(args, out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("bounds at one half") {
  const RunResult r = run({"bounds", "--p", "0.5"});
  CHECK(r.status == 0);
  CHECK(r.out.find("case1_advantage 0.000000") != std::string::npos);
  CHECK(r.out.find("strategic_threshold 0.344") != std::string::npos);
}

TEST_CASE("min-w inside the compliant region") {
  const RunResult r = run({"min-w", "--p", "0.3"});
  CHECK(r.status == 0);
  CHECK(r.out == "0.000000\n");
}

TEST_CASE("pne-check echoes both payoffs") {
  const RunResult r = run({"pne-check", "--p", "0.44", "--w", "0.132"});
  CHECK(r.status == 0);
  CHECK(r.out.find("deviation_payoff 0.858845") != std::string::npos);
  CHECK(r.out.find("compliant_payoff 0.868000") != std::string::npos);
  CHECK(r.out.find("equilibrium_supporting 1") != std::string::npos);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run({"min-w"}).status == 2);                       // missing --p
  CHECK(run({"min-w", "--p", "0.3", "--frobnicate"}).status == 2);
  CHECK(run({"min-w", "--p", "1.5"}).status == 2);         // out of range
  CHECK(run({"unknown-subcommand"}).status == 2);
  const RunResult r = run({"min-w", "--p", "1.5"});
  CHECK(r.err.find("--p") != std::string::npos);
}

TEST_CASE("solve prints both engines and the policy") {
  const RunResult r = run({"solve", "--p", "0.3", "--w", "0"});
  CHECK(r.status == 0);
  CHECK(r.out.find("g_lp 0.300000") != std::string::npos);
  CHECK(r.out.find("g_vi 0.300000") != std::string::npos);
  CHECK(r.out.find("honest 0.300000") != std::string::npos);
  CHECK(r.out.find("a,b,c,class,action") != std::string::npos);
  CHECK(r.out.find("0,1,0,capitulation,capitulate(0)") != std::string::npos);
}

TEST_CASE("verify passes in the honest regime") {
  const RunResult r = run({"verify", "--p", "0.3", "--w", "0", "--k", "60"});
  CHECK(r.status == 0);
  CHECK(r.out.find("all_tight 1") != std::string::npos);
  CHECK(r.out.find("induction_bound 1") != std::string::npos);
  CHECK(r.out.find("frontier_readback 1") != std::string::npos);
  CHECK(r.out.find("potential_upper_bound 1") != std::string::npos);
}

TEST_CASE("curve output is byte-stable and carries a manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "pflab_cli_test";
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / "sweep.csv";

  const std::vector<std::string> args{"curve",  "--p-from", "0.2",
                                      "--p-to", "0.21",     "--p-step",
                                      "0.01",   "--out",    csv_path.string()};
  const RunResult first = run(args);
  REQUIRE(first.status == 0);
  const std::string body_one = slurp(csv_path);
  const RunResult second = run(args);
  REQUIRE(second.status == 0);
  CHECK(body_one == slurp(csv_path));
  CHECK(body_one == first.out);
  CHECK(body_one.rfind("p,w_min,variant,scheme,d,residual\n", 0) == 0);

  const std::string manifest = slurp(csv_path.string() + ".manifest.json");
  CHECK(manifest.find("\"subcommand\": \"curve\"") != std::string::npos);
  CHECK(manifest.find("\"schema_version\": 1") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("simulate writes deterministic JSON stats") {
  const auto dir = std::filesystem::temp_directory_path() / "pflab_cli_sim";
  std::filesystem::create_directories(dir);
  const auto json_path = dir / "stats.json";
  const std::vector<std::string> args{
      "simulate", "--p",   "0.3",    "--w",    "1",      "--phases", "50000",
      "--seed",   "123",   "--json", json_path.string()};
  const RunResult first = run(args);
  REQUIRE(first.status == 0);
  CHECK(first.out.find("q_m_hat") != std::string::npos);
  const std::string body_one = slurp(json_path);
  run(args);
  CHECK(body_one == slurp(json_path));
  CHECK(body_one.find("\"q_m_hat\"") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify can dump the program") {
  const auto dir = std::filesystem::temp_directory_path() / "pflab_cli_dump";
  std::filesystem::create_directories(dir);
  const auto lp_path = dir / "game.lp";
  const RunResult r = run({"verify", "--p", "0.3", "--w", "0.5", "--d", "2", "--k", "10",
                           "--dump-lp", lp_path.string()});
  CHECK(r.status == 0);
  const std::string dump = slurp(lp_path);
  CHECK(dump.find("win(1,0,1):") != std::string::npos);
  CHECK(dump.find(">=") != std::string::npos);
  std::filesystem::remove_all(dir);
}
