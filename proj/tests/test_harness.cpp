#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "berglab/harness/checks.hpp"
#include "berglab/harness/config.hpp"
#include "berglab/harness/report.hpp"
#include "berglab/harness/runner.hpp"

using namespace berglab::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("berglab_test_" + name + ".json");
  std::ofstream(p) << text;
  return p;
}

int run_sub(const std::string& sub, const fs::path& config, const fs::path& out) {
  std::ostringstream o, e;
  RunOptions opts;
  opts.subcommand = sub;
  opts.config_path = config.string();
  opts.out_dir = out.string();
  return run(opts, o, e);
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_config(json::object()), ConfigError);
  CHECK_THROWS_AS(parse_config({{"seed", 1}, {"colour", "red"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"seed", 1}, {"p", 1.0}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"seed", 1}, {"domain", "annulus"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"seed", 1}, {"weight", {{"kind", "gaussian"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"seed", 1}, {"quadrature", {{"strategy", "simpson"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"seed", "one"}}), ConfigError);
  const auto cfg = parse_config({{"seed", 9}, {"domain", "ball2"}, {"weight", {{"kind", "power"}, {"t", 0.5}}}, {"knobs", {{"pairs", 3}}}});
  CHECK(cfg.seed == 9);
  CHECK(cfg.quadrature.seed == 9);
  CHECK(cfg.make_domain().dim() == 2);
  CHECK(cfg.knob<int>("pairs", 10) == 3);
  CHECK(cfg.knob<int>("other", 10) == 10);
  CHECK_THROWS_AS(cfg.knob<std::string>("pairs", ""), ConfigError);
}

TEST_CASE("csv writer") {
  Table t{"t", {"a", "b", "c"}, {}};
  t.add_row({1, nullptr, "x,y"});
  t.add_row({0.5, "plain", "say \"hi\""});
  std::ostringstream s;
  write_table_csv(s, t);
  CHECK(s.str() == "a,b,c\n1,,\"x,y\"\n0.5,plain,\"say \"\"hi\"\"\"\n");
  CHECK_THROWS(t.add_row({1}));
}

TEST_CASE("verdicts and exit codes") {
  CHECK(exit_code(Verdict::Pass) == 0);
  CHECK(exit_code(Verdict::Fail) == 1);
  CHECK(exit_code(Verdict::Flagged) == 3);
  ExperimentReport r;
  r.checks.resize(2);
  r.checks[0].verdict = Verdict::Pass;
  r.checks[1].verdict = Verdict::Flagged;
  CHECK(r.overall() == Verdict::Flagged);
  r.checks[0].verdict = Verdict::Fail;
  CHECK(r.overall() == Verdict::Fail);
}

TEST_CASE("criteria table is complete") {
  const auto& c = acceptance_criteria();
  REQUIRE(c.size() == 12);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c[i].number == static_cast<int>(i) + 1);
    CHECK(c[i].budget_seconds > 0.0);
  }
  CHECK(known_unattainable(11));
  CHECK_FALSE(known_unattainable(1));
}

TEST_CASE("runner: malformed config exits 2 and writes nothing") {
  const fs::path out = fs::temp_directory_path() / "berglab_test_bad_out";
  fs::remove_all(out);
  CHECK(run_sub("bp", write_config("bad", "{ \"seed\": 1, "), out) == 2);
  CHECK(run_sub("bp", write_config("unknown", R"({"seed": 1, "bogus": 2})"), out) == 2);
  CHECK(run_sub("bp", "/nonexistent/config.json", out) == 2);
  CHECK(run_sub("frobnicate", write_config("ok", R"({"seed": 1})"), out) == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("runner: unsupported domain for operator subcommands exits 2") {
  const fs::path out = fs::temp_directory_path() / "berglab_test_egg_out";
  CHECK(run_sub("operator-norm", write_config("egg", R"({"seed": 1, "domain": "egg2"})"), out) == 2);
}

TEST_CASE("runner: constant weight passes bp and reruns are identical apart from timing") {
  const auto cfg = write_config("bp", R"({"seed": 3, "weight": {"kind": "constant", "value": 2.0},
    "quadrature": {"strategy": "stratified", "n_samples": 4000, "rel_tolerance": 0.05}})");
  const fs::path a = fs::temp_directory_path() / "berglab_test_bp_a", b = fs::temp_directory_path() / "berglab_test_bp_b";
  CHECK(run_sub("bp", cfg, a) == 0);
  CHECK(run_sub("bp", cfg, b) == 0);
  auto load = [](const fs::path& p) {
    json j;
    std::ifstream(p / "report.json") >> j;
    j.erase("wall_clock");
    return j;
  };
  const json ja = load(a);
  CHECK(ja == load(b));
  CHECK(ja.at("verdict") == "pass");
  CHECK(fs::exists(a / "bp_per_ball.csv"));
}
