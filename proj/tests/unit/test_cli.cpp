#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "elm/io.hpp"

namespace fs = std::filesystem;
using elm::io::Json;

namespace {

struct Result {
  int code;
  std::string err;
};

fs::path workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("elm_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run(const std::string& args) {
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = std::string(ELM_CLI_PATH) + " " + args + " 2> " + err.string() + " > /dev/null";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, elm::io::read_text(err)};
}

std::string slurp(const fs::path& p) { return elm::io::read_text(p); }

}  // namespace

TEST_CASE("simulate is deterministic and writes a manifest") {
  const fs::path a = workdir() / "sim_a", b = workdir() / "missing" / "sim_b";
  const fs::path cfg = workdir() / "world.json";
  elm::io::write_json(cfg, Json{{"n_assets", 3}, {"n_days", 12}});
  REQUIRE(run("--seed 42 --config " + cfg.string() + " --out-dir " + a.string() + " simulate").code == 0);
  REQUIRE(run("--seed 42 --config " + cfg.string() + " --out-dir " + b.string() + " simulate").code == 0);
  CHECK(fs::exists(a / "simulate_manifest.json"));
  CHECK(fs::exists(a / "market.json"));
  CHECK(fs::exists(b / "market.csv"));
  CHECK(slurp(a / "market.csv") == slurp(b / "market.csv"));

  const Json manifest = elm::io::read_json(a / "simulate_manifest.json");
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["config"]["world"]["n_days"] == 12);
  CHECK(manifest["config"]["world"].contains("flow_persistence"));
  CHECK(manifest.contains("tool_version"));
  CHECK(manifest.contains("timestamp"));

  // replaying the manifest reproduces the outputs byte for byte
  const fs::path c = workdir() / "sim_c";
  REQUIRE(run("--manifest " + (a / "simulate_manifest.json").string() + " --out-dir " + c.string()).code == 0);
  CHECK(slurp(a / "market.csv") == slurp(c / "market.csv"));

  REQUIRE(run("--seed 7 --config " + cfg.string() + " --out-dir " + c.string() + " simulate").code == 0);
  CHECK(slurp(a / "market.csv") != slurp(c / "market.csv"));
}

TEST_CASE("simulate then calibrate") {
  const fs::path d = workdir() / "roundtrip";
  REQUIRE(run("--out-dir " + d.string() + " simulate --assets 4 --days 120").code == 0);
  const Result r = run("--out-dir " + d.string() + " calibrate --market " + (d / "market.csv").string());
  REQUIRE(r.code == 0);
  for (const char* f : {"calibration_report.json", "kernel_table.csv", "modes.csv", "liquidity_spectrum.csv",
                        "model.json", "calibrate_manifest.json"})
    CHECK(fs::exists(d / f));
  const Json report = elm::io::read_json(d / "calibration_report.json");
  CHECK(report["complete"] == true);
  CHECK(std::abs(report["kernel"]["alpha"].get<double>() - 0.2) < 0.1);
  CHECK(run("--out-dir " + d.string() + " check-model --model " + (d / "model.json").string()).code == 0);
}

TEST_CASE("calibrate with a too-short series reports the step") {
  const fs::path d = workdir() / "short";
  REQUIRE(run("--out-dir " + d.string() + " simulate --assets 3 --days 2").code == 0);
  const Result r = run("--out-dir " + d.string() + " calibrate --market " + (d / "market.csv").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("covariance") != std::string::npos);
  const Json report = elm::io::read_json(d / "calibration_report.json");
  CHECK(report["complete"] == false);
  CHECK(report["failed_step"] == "covariance");
}

TEST_CASE("malformed CSV exits with code 2 and a line number") {
  const fs::path d = workdir() / "bad";
  fs::create_directories(d);
  elm::io::write_text_atomic(d / "m.csv", "timestamp,instrument,price,signed_flow\n300,A,100,1\n600,A,oops,1\n");
  elm::io::write_json(d / "m.json", Json{{"dt_seconds", 300}, {"units", "shares"}});
  const Result r = run("--out-dir " + d.string() + " calibrate --market " + (d / "m.csv").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("m.csv:3") != std::string::npos);

  elm::io::write_text_atomic(d / "m.csv", "timestamp,instrument,price,signed_flow\n300,A,100\n");
  const Result short_row = run("--out-dir " + d.string() + " calibrate --market " + (d / "m.csv").string());
  CHECK(short_row.code == 2);
  CHECK(short_row.err.find("m.csv:2") != std::string::npos);
}

TEST_CASE("config and usage errors exit with code 3") {
  CHECK(run("compare-profiles --alpha -1").code == 3);
  CHECK(run("no-such-command").code == 3);
  CHECK(run("cost").code == 3);
}

TEST_CASE("compare-profiles reproduces the bucket-shape table") {
  const fs::path d = workdir() / "cmp";
  REQUIRE(run("--out-dir " + d.string() + " compare-profiles --alpha 0.2 --tau0 90").code == 0);
  const elm::io::CsvTable t = elm::io::read_csv(d / "profile_comparison.csv");
  const std::size_t col = t.column("relative_excess");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r][0] == "flat_2h_midday") CHECK(std::abs(t.number(r, col) - 0.30) <= 0.08);
    if (t.rows[r][0] == "linear_increasing") CHECK(std::abs(t.number(r, col) - 0.07) <= 0.03);
    if (t.rows[r][0] == "optimal") CHECK(t.number(r, col) == 0.0);
  }
}

TEST_CASE("optimize and cost") {
  const fs::path d = workdir() / "opt";
  REQUIRE(run("--out-dir " + d.string() + " simulate --assets 3 --days 1").code == 0);
  elm::io::write_text_atomic(d / "targets.csv", "instrument,target\nS0,1000000\nS2,-500000\n");
  REQUIRE(run("--out-dir " + d.string() + " optimize --model " + (d / "truth_model.json").string() + " --targets " +
              (d / "targets.csv").string())
              .code == 0);
  CHECK(fs::exists(d / "schedule.grid.json"));
  REQUIRE(run("--out-dir " + d.string() + " cost --model " + (d / "truth_model.json").string() + " --schedule " +
              (d / "schedule.csv").string())
              .code == 0);
  const double cost = elm::io::read_json(d / "cost.json")["cost"].get<double>();
  const double expected = elm::io::read_json(d / "optimize_summary.json")["expected_cost"].get<double>();
  CHECK(std::abs(cost - expected) <= 1e-9 * expected);

  // a zero schedule costs nothing
  std::string zero = "S0,S1,S2\n";
  for (int k = 0; k < 96; ++k) zero += "0,0,0\n";
  elm::io::write_text_atomic(d / "zero.csv", zero);
  REQUIRE(run("--out-dir " + d.string() + " cost --model " + (d / "truth_model.json").string() + " --schedule " +
              (d / "zero.csv").string())
              .code == 0);
  CHECK(elm::io::read_json(d / "cost.json")["cost"].get<double>() == 0.0);
}

TEST_CASE("bias-sweep analytic and Monte-Carlo columns agree") {
  const fs::path d = workdir() / "bias";
  REQUIRE(run("--out-dir " + d.string() + " bias-sweep --assets 20 --draws 10000").code == 0);
  const elm::io::CsvTable t = elm::io::read_csv(d / "bias_sweep.csv");
  CHECK(t.rows.size() == 15);
  const std::size_t e = t.column("expected_cost"), m = t.column("mc_mean"), s = t.column("mc_stderr");
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    CHECK(std::abs(t.number(r, e) - t.number(r, m)) <= 3.0 * t.number(r, s) + 1e-12 * t.number(r, e));
  const fs::path d2 = workdir() / "bias2";
  REQUIRE(run("--manifest " + (d / "bias-sweep_manifest.json").string() + " --out-dir " + d2.string()).code == 0);
  CHECK(slurp(d / "bias_sweep.csv") == slurp(d2 / "bias_sweep.csv"));
}

TEST_CASE("check-model flags manipulable models") {
  const fs::path d = workdir() / "check";
  REQUIRE(run("--out-dir " + d.string() + " simulate --assets 3 --days 1").code == 0);
  Json model = elm::io::read_json(d / "truth_model.json");
  model["mode_liquidities"][1] = -1e-7;
  elm::io::write_json(d / "bad_model.json", model);
  CHECK(run("--out-dir " + d.string() + " check-model --model " + (d / "bad_model.json").string()).code == 1);
  const Json report = elm::io::read_json(d / "check_model.json");
  CHECK(report["passed"] == false);
  CHECK(report["no_manipulation"]["offending_modes"][0] == 1);
}

TEST_CASE("simulating 10 assets for 250 days stays within budget") {
  const fs::path d = workdir() / "perf";
  const auto start = std::chrono::steady_clock::now();
  REQUIRE(run("--out-dir " + d.string() + " simulate --assets 10 --days 250 --bins-per-day 96").code == 0);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("simulate 10x250x96 took " << seconds << " s");
  CHECK(seconds < 60.0);
}
