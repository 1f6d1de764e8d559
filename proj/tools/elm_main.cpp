#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "elm/calibration.hpp"
#include "elm/cost.hpp"
#include "elm/error.hpp"
#include "elm/io.hpp"
#include "elm/kernel.hpp"
#include "elm/model.hpp"
#include "elm/optimizer.hpp"
#include "elm/synthgen.hpp"

namespace fs = std::filesystem;
using elm::io::Json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kNumerical = 1, kInput = 2, kConfig = 3 };

// Every subcommand runs from a fully resolved JSON config so that a manifest
// can replay it exactly.
struct Run {
  std::string subcommand;
  Json config;
  std::vector<std::string> outputs;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string absolute(const std::string& p) { return p.empty() ? p : fs::absolute(p).lexically_normal().string(); }

fs::path out_path(const Run& run, const std::string& name) { return fs::path(run.config.at("out_dir").get<std::string>()) / name; }

void emit(Run& run, const std::string& name, const std::string& text) {
  elm::io::write_text_atomic(out_path(run, name), text);
  run.outputs.push_back(name);
}

void emit_json(Run& run, const std::string& name, const Json& doc) { emit(run, name, doc.dump(2) + "\n"); }

void write_manifest(const Run& run) {
  Json inputs = Json::object();
  if (run.config.contains("inputs")) inputs = run.config.at("inputs");
  Json doc{{"subcommand", run.subcommand},
           {"tool_version", kVersion},
           {"timestamp", utc_timestamp()},
           {"seed", run.config.value("seed", std::uint64_t{42})},
           {"config", run.config},
           {"inputs", inputs},
           {"outputs", run.outputs}};
  elm::io::write_json(out_path(run, run.subcommand + "_manifest.json"), doc);
}

elm::DecayKernel kernel_of(const Json& cfg) { return elm::io::kernel_from_json(cfg.at("kernel")); }
elm::TimeGrid grid_of(const Json& cfg) { return elm::io::grid_from_json(cfg.at("grid")); }

std::string input(const Json& cfg, const char* key) {
  if (!cfg.contains("inputs") || !cfg.at("inputs").contains(key)) return {};
  return cfg.at("inputs").at(key).get<std::string>();
}

// ---- subcommand bodies ----

void run_simulate(Run& run) {
  const Json& cfg = run.config;
  elm::WorldConfig world = elm::io::world_config_from_json(cfg.at("world"));
  world.seed = cfg.at("seed").get<std::uint64_t>();
  const elm::SyntheticMarket market = elm::simulate_world(world);
  const std::string name = cfg.at("output").get<std::string>();
  emit(run, name, elm::io::market_to_csv(market.series));
  emit_json(run, elm::io::market_manifest_path(name).string(), elm::io::market_manifest(market.series));
  emit_json(run, "truth_model.json", elm::io::to_json(world.model));
  std::cerr << "simulated " << market.series.n_assets() << " assets x " << market.series.n_bins() << " bins\n";
}

int run_calibrate(Run& run) {
  const Json& cfg = run.config;
  const elm::MarketSeries series = elm::io::read_market(input(cfg, "market"), input(cfg, "market_manifest"));
  const elm::CalibrationConfig cc = elm::io::calibration_config_from_json(cfg.at("calibration"));
  const elm::CalibrationReport report = elm::run_box2_pipeline(series, cc);
  emit_json(run, "calibration_report.json", elm::io::to_json(report));
  if (report.kernel) emit(run, "kernel_table.csv", elm::io::kernel_table_csv(*report.kernel));
  if (!report.modes.empty()) emit(run, "modes.csv", elm::io::mode_estimates_csv(report));
  if (report.complete) {
    const elm::PropagatorModel model = report.model();
    emit_json(run, "model.json", elm::io::to_json(model));
    emit(run, "liquidity_spectrum.csv", elm::io::liquidity_spectrum_csv(model));
    std::cerr << "alpha " << report.kernel->alpha << ", tau0 " << report.kernel->tau0 << " s\n";
    return kOk;
  }
  std::cerr << "error: calibration failed at step '" << report.failed_step << "': " << report.failure_message << "\n";
  if (report.failure_category == "input") return kInput;
  if (report.failure_category == "config") return kConfig;
  return kNumerical;
}

void run_optimize(Run& run) {
  const Json& cfg = run.config;
  const elm::TimeGrid grid = grid_of(cfg);
  const std::string model_path = input(cfg, "model");
  std::optional<elm::PropagatorModel> model;
  elm::DecayKernel kernel = kernel_of(cfg);
  if (!model_path.empty()) {
    model = elm::io::read_model(model_path);
    kernel = model->kernel;
  }
  const elm::OptimalProfile profile = elm::solve_optimal_profile(kernel, grid);
  elm::io::CsvWriter pw({"bin", "t_seconds", "psi"});
  for (std::size_t k = 0; k < grid.n_bins(); ++k)
    pw.row(std::vector<std::string>{std::to_string(k), elm::io::format_double(grid.midpoint(k)),
                                    elm::io::format_double(profile.psi(static_cast<Eigen::Index>(k)))});
  emit(run, "profile.csv", pw.str());

  Json summary{{"kernel", elm::io::to_json(kernel)}, {"grid", elm::io::to_json(grid)},
               {"kernel_norm", profile.kernel_norm}, {"multiplier", profile.multiplier}};
  const std::string targets_path = input(cfg, "targets");
  if (!targets_path.empty()) {
    const elm::io::Targets targets = elm::io::read_targets(targets_path);
    std::vector<std::string> ids = model ? model->instrument_ids : targets.instrument_ids;
    const elm::Vector q = elm::io::align_targets(targets, ids);
    elm::ExecutionSchedule schedule = model ? elm::optimal_portfolio_schedule(q, *model, grid)
                                            : elm::ExecutionSchedule::synchronous(grid, q, profile.psi);
    elm::io::write_schedule(out_path(run, "schedule.csv"), schedule, ids);
    run.outputs.push_back("schedule.csv");
    run.outputs.push_back(elm::io::grid_sidecar("schedule.csv").string());
    if (model) summary["expected_cost"] = elm::optimal_portfolio_cost(q, *model, profile);
  }
  emit_json(run, "optimize_summary.json", summary);
}

void run_compare_profiles(Run& run) {
  const elm::TimeGrid grid = grid_of(run.config);
  const auto rows = elm::profile_cost_comparison(elm::standard_profiles(grid), kernel_of(run.config), grid);
  emit(run, "profile_comparison.csv", elm::io::profile_comparison_csv(rows));
  for (const auto& r : rows) std::cerr << r.name << ": " << 100.0 * r.relative_excess << "%\n";
}

void run_cost(Run& run) {
  const Json& cfg = run.config;
  const elm::PropagatorModel model = elm::io::read_model(input(cfg, "model"));
  const elm::io::NamedSchedule named = elm::io::read_schedule(input(cfg, "schedule"), grid_of(cfg));
  if (named.instrument_ids != model.instrument_ids)
    throw elm::InputError("schedule instruments do not match the model's instrument_ids");
  const double cost = elm::schedule_cost(named.schedule, model);
  const elm::Eigencost ec = elm::eigencost(named.schedule, model);
  Json doc{{"cost", cost},
           {"eigencost_total", ec.total},
           {"eigencost_per_mode", elm::io::to_json(ec.per_mode)},
           {"totals", elm::io::to_json(named.schedule.totals())},
           {"risk", elm::portfolio_risk(named.schedule.totals(), model.correlation())}};
  emit_json(run, "cost.json", doc);
  std::cerr << "cost " << cost << "\n";
}

int run_bias_sweep(Run& run) {
  const Json& cfg = run.config;
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  const elm::PropagatorModel model = elm::io::model_from_json(cfg.at("model"));
  const elm::Vector volumes = elm::io::vector_from_json(cfg.at("market_volumes"));
  elm::BiasSweepConfig bc = elm::io::bias_config_from_json(cfg.at("sweep"));
  bc.seed = seed;
  const elm::OptimalProfile profile = elm::solve_optimal_profile(model.kernel, grid_of(cfg));
  const elm::BiasSweep sweep = elm::bias_cost_ratio_report(model, volumes, bc, profile.kernel_norm);
  emit(run, "bias_sweep.csv", elm::io::bias_sweep_csv(sweep));
  double lo = INFINITY, hi = -INFINITY;
  int outside = 0;
  for (const auto& r : sweep.rows) {
    lo = std::min(lo, r.cost_per_risk);
    hi = std::max(hi, r.cost_per_risk);
    if (std::abs(r.mc_mean - r.expected_cost) > 3.0 * r.mc_stderr + 1e-12 * std::abs(r.expected_cost)) ++outside;
  }
  emit_json(run, "bias_summary.json",
            Json{{"directional_ratio", sweep.directional_ratio},
                 {"top_mode_ratio", sweep.top_mode_ratio},
                 {"cost_per_risk_min", lo},
                 {"cost_per_risk_max", hi},
                 {"cost_per_risk_variation", hi / lo - 1.0},
                 {"rows_outside_3se", outside}});
  std::cerr << "directional ratio " << sweep.directional_ratio << "\n";
  return kOk;
}

int run_check_model(Run& run) {
  const elm::PropagatorModel model = elm::io::read_model(input(run.config, "model"));
  const auto report = elm::check_no_manipulation(model);
  const auto n = static_cast<Eigen::Index>(model.size());
  const elm::Matrix& o = model.eigen.vectors;
  const double orth = (o.transpose() * o - elm::Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  const elm::Matrix rho = model.correlation();
  const double diag = (rho.diagonal().array() - 1.0).abs().maxCoeff();
  const double trace_gap = std::abs(model.eigen.values.sum() - static_cast<double>(n));
  const elm::PsdCheck kpsd =
      elm::check_kernel_matrix_psd(elm::build_kernel_matrix(model.kernel, grid_of(run.config)));
  const bool orth_ok = orth <= 1e-8;
  const bool diag_ok = diag <= 1e-8;
  const bool trace_ok = trace_gap <= 1e-8 * static_cast<double>(n);
  const bool vol_ok = (model.volatilities.array() > 0.0).all();
  Json offending = Json::array();
  for (auto m : report.offending_modes) offending.push_back(m);
  Json doc{{"no_manipulation",
            {{"passed", report.passed},
             {"min_liquidity", report.min_liquidity},
             {"min_liquidity_mode", report.min_liquidity_mode},
             {"min_impact_eigenvalue", report.min_impact_eigenvalue},
             {"offending_modes", offending}}},
           {"eigenvectors_orthonormal", {{"passed", orth_ok}, {"max_error", orth}}},
           {"unit_diagonal", {{"passed", diag_ok}, {"max_error", diag}}},
           {"eigenvalues_sum_to_n", {{"passed", trace_ok}, {"gap", trace_gap}}},
           {"volatilities_positive", {{"passed", vol_ok}}},
           {"kernel_matrix_psd", {{"passed", kpsd.passed}, {"min_eigenvalue", kpsd.min_eigenvalue}}}};
  const bool ok = report.passed && orth_ok && diag_ok && trace_ok && vol_ok && kpsd.passed;
  doc["passed"] = ok;
  emit_json(run, "check_model.json", doc);
  emit(run, "liquidity_spectrum.csv", elm::io::liquidity_spectrum_csv(model));
  std::cerr << (ok ? "model passes all checks\n" : "model fails checks, see check_model.json\n");
  return ok ? kOk : kNumerical;
}

int execute(Run& run) {
  int code = kOk;
  if (run.subcommand == "simulate") run_simulate(run);
  else if (run.subcommand == "calibrate") code = run_calibrate(run);
  else if (run.subcommand == "optimize") run_optimize(run);
  else if (run.subcommand == "compare-profiles") run_compare_profiles(run);
  else if (run.subcommand == "cost") run_cost(run);
  else if (run.subcommand == "bias-sweep") code = run_bias_sweep(run);
  else if (run.subcommand == "check-model") code = run_check_model(run);
  else throw elm::ConfigError("unknown subcommand " + run.subcommand);
  write_manifest(run);
  return code;
}

// ---- flag resolution ----

struct KernelFlags {
  std::optional<double> alpha, tau0, horizon;
  std::optional<std::size_t> bins;
  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "kernel decay exponent");
    app->add_option("--tau0", tau0, "kernel time scale, seconds");
    app->add_option("--horizon", horizon, "execution horizon, seconds");
    app->add_option("--bins", bins, "number of time bins");
  }
  void apply(Json& cfg) const {
    if (!cfg.contains("kernel")) cfg["kernel"] = elm::io::to_json(elm::DecayKernel(0.2, 90.0));
    if (!cfg.contains("grid")) cfg["grid"] = elm::io::to_json(elm::default_grid());
    if (alpha) cfg["kernel"]["alpha"] = *alpha;
    if (tau0) cfg["kernel"]["tau0_seconds"] = *tau0;
    if (horizon) cfg["grid"]["horizon_seconds"] = *horizon;
    if (bins) cfg["grid"]["n_bins"] = *bins;
    elm::io::kernel_from_json(cfg["kernel"]);
    elm::io::grid_from_json(cfg["grid"]);
  }
};

void set_input(Json& cfg, const char* key, const std::string& path) {
  if (!path.empty()) cfg["inputs"][key] = absolute(path);
  if (!cfg.contains("inputs")) cfg["inputs"] = Json::object();
}

void require_input(const Json& cfg, const char* key, const char* flag) {
  if (!cfg.contains("inputs") || !cfg.at("inputs").contains(key))
    throw elm::ConfigError(std::string("missing required input ") + flag);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EigenLiquidity cross-impact toolkit"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", kVersion);

  std::optional<std::uint64_t> seed;
  std::string out_dir, config_path, manifest_path;
  app.add_option("--seed", seed, "master seed for all randomness (default 42)");
  app.add_option("--out-dir", out_dir, "output directory (created if missing)");
  app.add_option("--config", config_path, "JSON config for the subcommand");
  app.add_option("--manifest", manifest_path, "replay a previous run manifest");

  auto* sim = app.add_subcommand("simulate", "generate a synthetic market from a ground-truth model");
  std::string world_path, sim_output = "market.csv";
  std::optional<std::size_t> n_assets, n_days, bins_per_day;
  sim->add_option("--world", world_path, "world config JSON (defaults to --config)");
  sim->add_option("--output", sim_output, "market CSV file name");
  sim->add_option("--assets", n_assets, "instruments in the default synthetic model");
  sim->add_option("--days", n_days, "trading days");
  sim->add_option("--bins-per-day", bins_per_day, "bins per trading day");

  auto* cal = app.add_subcommand("calibrate", "fit the model to a market series");
  std::string market_path, market_manifest;
  std::optional<double> bin_seconds, eigen_floor, ridge;
  std::optional<std::size_t> max_lag, horizon_bins;
  bool force_negative = false;
  cal->add_option("--market", market_path, "long-format market CSV");
  cal->add_option("--market-manifest", market_manifest, "market JSON manifest (default: CSV path with .json)");
  cal->add_option("--bin-seconds", bin_seconds, "resample to this bin length");
  cal->add_option("--max-lag", max_lag, "maximum lag in bins");
  cal->add_option("--eigen-floor", eigen_floor, "eigenvalue floor relative to the top mode");
  cal->add_option("--ridge", ridge, "Tikhonov weight for the kernel deconvolution");
  cal->add_option("--horizon-bins", horizon_bins, "bins per covariance window");
  cal->add_flag("--force-negative", force_negative, "keep negative liquidity estimates");

  auto* opt = app.add_subcommand("optimize", "optimal execution profile and portfolio schedule");
  KernelFlags opt_flags;
  opt_flags.add(opt);
  std::string opt_model, targets_path;
  opt->add_option("--model", opt_model, "model JSON (overrides kernel flags)");
  opt->add_option("--targets", targets_path, "CSV with columns instrument,target ($ of risk)");

  auto* cmp = app.add_subcommand("compare-profiles", "excess cost of standard profiles over the optimum");
  KernelFlags cmp_flags;
  cmp_flags.add(cmp);

  auto* cst = app.add_subcommand("cost", "expected impact cost of a schedule");
  KernelFlags cst_flags;
  cst_flags.add(cst);
  std::string cost_model, schedule_path;
  cst->add_option("--model", cost_model, "model JSON");
  cst->add_option("--schedule", schedule_path, "schedule CSV (grid from its .grid.json sidecar)");

  auto* bias = app.add_subcommand("bias-sweep", "expected cost of biased random orders");
  KernelFlags bias_flags;
  bias_flags.add(bias);
  std::string bias_model, volumes_path;
  std::optional<std::size_t> mc_draws, bias_assets;
  bias->add_option("--model", bias_model, "model JSON (default: synthetic paper-like model)");
  bias->add_option("--volumes", volumes_path, "CSV with columns instrument,volume ($ of risk per day)");
  bias->add_option("--draws", mc_draws, "Monte-Carlo draws per row");
  bias->add_option("--assets", bias_assets, "instruments in the default synthetic model");

  auto* chk = app.add_subcommand("check-model", "no-manipulation and consistency checks on a model");
  KernelFlags chk_flags;
  chk_flags.add(chk);
  std::string check_path;
  chk->add_option("--model", check_path, "model JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (app.get_subcommands().empty() && manifest_path.empty()) {
    std::cerr << "error: a subcommand is required (or --manifest to replay a run)\n" << app.help();
    return kConfig;
  }

  try {
    Run run;
    if (!manifest_path.empty()) {
      const Json manifest = elm::io::read_json(manifest_path);
      run.subcommand = manifest.at("subcommand").get<std::string>();
      run.config = manifest.at("config");
      if (!out_dir.empty()) run.config["out_dir"] = out_dir;
      return execute(run);
    }

    CLI::App* chosen = app.get_subcommands().front();
    run.subcommand = chosen->get_name();
    Json cfg = config_path.empty() ? Json::object() : elm::io::read_json(config_path);
    if (!cfg.is_object()) throw elm::ConfigError("--config must hold a JSON object");
    cfg["seed"] = seed ? *seed : cfg.value("seed", std::uint64_t{42});
    cfg["out_dir"] = absolute(out_dir.empty() ? cfg.value("out_dir", std::string(".")) : out_dir);
    const std::uint64_t s = cfg["seed"].get<std::uint64_t>();

    if (chosen == sim) {
      Json world = cfg.contains("world") ? cfg["world"] : Json::object();
      if (!world_path.empty()) {
        world = elm::io::read_json(world_path);
      } else if (!cfg.contains("world")) {
        for (auto it = cfg.begin(); it != cfg.end(); ++it)
          if (it.key() != "seed" && it.key() != "out_dir" && it.key() != "output") world[it.key()] = it.value();
      }
      if (world.contains("model_path")) {
        fs::path p = world["model_path"].get<std::string>();
        if (p.is_relative() && !world_path.empty()) p = fs::path(world_path).parent_path() / p;
        world["model"] = elm::io::to_json(elm::io::read_model(p));
        world.erase("model_path");
      }
      if (!world.contains("model")) {
        const std::size_t n = n_assets.value_or(world.value("n_assets", std::size_t{10}));
        elm::DecayKernel k = world.contains("kernel") ? elm::io::kernel_from_json(world["kernel"])
                                                      : elm::DecayKernel(0.2, 90.0);
        world["model"] = elm::io::to_json(elm::synthetic_model(n, s, k));
      }
      world.erase("n_assets");
      world.erase("kernel");
      if (n_days) world["n_days"] = *n_days;
      if (bins_per_day) world["bins_per_day"] = *bins_per_day;
      elm::WorldConfig wc = elm::io::world_config_from_json(world);
      wc.seed = s;
      Json resolved{{"seed", s}, {"out_dir", cfg["out_dir"]}, {"output", cfg.value("output", sim_output)}};
      resolved["world"] = elm::io::to_json(wc);
      resolved["world"].erase("seed");
      run.config = resolved;
    } else if (chosen == cal) {
      Json resolved{{"seed", s}, {"out_dir", cfg["out_dir"]}};
      resolved["inputs"] = cfg.value("inputs", Json::object());
      set_input(resolved, "market", market_path);
      set_input(resolved, "market_manifest", market_manifest);
      require_input(resolved, "market", "--market");
      elm::CalibrationConfig cc =
          elm::io::calibration_config_from_json(cfg.contains("calibration") ? cfg["calibration"] : cfg);
      if (bin_seconds) cc.bin_seconds = *bin_seconds;
      if (max_lag) cc.max_lag = *max_lag;
      if (eigen_floor) cc.eigen_floor = *eigen_floor;
      if (ridge) cc.ridge = *ridge;
      if (horizon_bins) cc.horizon_bins = *horizon_bins;
      if (force_negative) cc.force_negative = true;
      resolved["calibration"] = elm::io::to_json(cc);
      run.config = resolved;
    } else {
      KernelFlags* flags = chosen == opt ? &opt_flags : chosen == cmp ? &cmp_flags : chosen == cst ? &cst_flags
                                                      : chosen == bias ? &bias_flags : &chk_flags;
      Json resolved{{"seed", s}, {"out_dir", cfg["out_dir"]}};
      if (cfg.contains("kernel")) resolved["kernel"] = cfg["kernel"];
      if (cfg.contains("grid")) resolved["grid"] = cfg["grid"];
      resolved["inputs"] = cfg.value("inputs", Json::object());
      flags->apply(resolved);
      if (chosen == opt) {
        set_input(resolved, "model", opt_model);
        set_input(resolved, "targets", targets_path);
      } else if (chosen == cst) {
        set_input(resolved, "model", cost_model);
        set_input(resolved, "schedule", schedule_path);
        require_input(resolved, "model", "--model");
        require_input(resolved, "schedule", "--schedule");
      } else if (chosen == chk) {
        set_input(resolved, "model", check_path);
      } else if (chosen == bias) {
        set_input(resolved, "model", bias_model);
        set_input(resolved, "volumes", volumes_path);
        const elm::DecayKernel kernel = kernel_of(resolved);
        elm::PropagatorModel model;
        if (!input(resolved, "model").empty()) {
          model = elm::io::read_model(input(resolved, "model"));
        } else {
          const std::size_t n = bias_assets.value_or(cfg.value("n_assets", std::size_t{30}));
          model = elm::synthetic_model(n, s, kernel);
        }
        resolved["kernel"] = elm::io::to_json(model.kernel);
        elm::Vector volumes;
        if (!input(resolved, "volumes").empty()) {
          elm::io::CsvTable t = elm::io::read_csv(input(resolved, "volumes"));
          elm::io::Targets v;
          const std::size_t ci = t.column("instrument"), cv = t.column("volume");
          v.values.resize(static_cast<Eigen::Index>(t.rows.size()));
          for (std::size_t r = 0; r < t.rows.size(); ++r) {
            v.instrument_ids.push_back(t.rows[r][ci]);
            v.values(static_cast<Eigen::Index>(r)) = t.number(r, cv);
          }
          volumes = elm::io::align_targets(v, model.instrument_ids);
        } else {
          elm::Rng rng = elm::make_stream(s, 1u << 21);
          volumes = elm::lognormal_market_volumes(model.size(), 1e6, 1.0, rng);
        }
        elm::BiasSweepConfig bc = elm::io::bias_config_from_json(cfg.contains("sweep") ? cfg["sweep"] : cfg);
        if (mc_draws) bc.mc_draws = *mc_draws;
        bc.seed = s;
        resolved["model"] = elm::io::to_json(model);
        resolved["market_volumes"] = elm::io::to_json(volumes);
        resolved["sweep"] = elm::io::to_json(bc);
        resolved["sweep"].erase("seed");
      }
      run.config = resolved;
    }
    return execute(run);
  } catch (const elm::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const elm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const elm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
