#include <doctest.h>

#include <filesystem>
#include <string>

#include "elm/error.hpp"
#include "elm/io.hpp"
#include "helpers.hpp"

using namespace elm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("elm_io_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("double formatting round-trips") {
  std::mt19937_64 rng(71);
  for (int i = 0; i < 1000; ++i) {
    const double v = testkit::uniform(rng, -1.0, 1.0) * std::pow(10.0, testkit::uniform(rng, -12, 12));
    CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
  }
  CHECK(io::format_double(0.25) == "0.25");
  CHECK(io::format_double(INFINITY) == "inf");
}

TEST_CASE("CSV parsing diagnostics carry line numbers") {
  const std::string text = "a,b\n1,2\n\n3\n";
  try {
    io::parse_csv(text, "x.csv");
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("x.csv:4") != std::string::npos);
  }
  const io::CsvTable t = io::parse_csv("a,b\n1,zz\n", "y.csv");
  try {
    t.number(0, 1);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("y.csv:2") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_csv("\n\n", "empty.csv"), InputError);
  CHECK_THROWS_AS(t.column("c"), InputError);
}

TEST_CASE("kernel and grid JSON") {
  const DecayKernel k(0.2, 90.0);
  const io::Json j = io::to_json(k);
  CHECK(j.dump() == R"({"alpha":0.2,"tau0_seconds":90.0})");
  CHECK(io::kernel_from_json(j) == k);
  const TimeGrid g(28800.0, 96);
  CHECK(io::grid_from_json(io::to_json(g)) == g);
  CHECK_THROWS_AS(io::kernel_from_json(io::Json{{"alpha", 0.2}}), InputError);
}

TEST_CASE("model JSON round trip") {
  std::mt19937_64 rng(72);
  PropagatorModel m = testkit::random_model(rng, 5);
  m.volatilities = Vector::LinSpaced(5, 0.5, 2.5);
  const fs::path p = scratch("model.json");
  io::write_json(p, io::to_json(m));
  const PropagatorModel back = io::read_model(p);
  CHECK(back.eigen.vectors == m.eigen.vectors);
  CHECK(back.eigen.values == m.eigen.values);
  CHECK(back.liquidities == m.liquidities);
  CHECK(back.volatilities == m.volatilities);
  CHECK(back.kernel == m.kernel);
  CHECK(back.instrument_ids == m.instrument_ids);
  io::Json broken = io::to_json(m);
  broken.erase("mode_liquidities");
  CHECK_THROWS_AS(io::model_from_json(broken), InputError);
}

TEST_CASE("correlation CSV and JSON") {
  std::mt19937_64 rng(73);
  const CorrelationMatrix rho = testkit::random_correlation(rng, 4);
  const std::vector<std::string> ids{"AAA", "BBB", "CCC", "DDD"};
  const fs::path csv = scratch("rho.csv");
  io::write_text_atomic(csv, io::correlation_to_csv(rho, ids));
  const io::NamedCorrelation a = io::read_correlation(csv);
  CHECK(a.instrument_ids == ids);
  CHECK(a.rho.matrix() == rho.matrix());
  const fs::path js = scratch("rho.json");
  io::write_json(js, io::correlation_to_json(rho, ids));
  CHECK(io::read_correlation(js).rho.matrix() == rho.matrix());
  CHECK_THROWS_AS(io::correlation_from_csv(io::parse_csv("a,b\n1,0\n", "r.csv")), InputError);
}

TEST_CASE("impact CSV with the market mode removed") {
  const PropagatorModel m = two_asset_model(0.5, 1e-7, 3e-7, DecayKernel(0.2, 90));
  const io::CsvTable t = io::parse_csv(io::impact_to_csv(m, true), "g.csv");
  CHECK(t.number(0, 1) == doctest::Approx(0.0));
  const Matrix g = assemble_impact_matrix(m);
  CHECK(t.number(0, 0) == g(0, 0));
}

TEST_CASE("schedule CSV with grid sidecar") {
  std::mt19937_64 rng(74);
  const TimeGrid g(3600.0, 7);
  const ExecutionSchedule s(g, testkit::gaussian(rng, 3, 7));
  const fs::path p = scratch("sched.csv");
  io::write_schedule(p, s, {"x", "y", "z"});
  CHECK(fs::exists(io::grid_sidecar(p)));
  const io::NamedSchedule back = io::read_schedule(p, TimeGrid(10.0, 2));
  CHECK(back.schedule.grid() == g);
  CHECK(back.schedule.rates() == s.rates());
  CHECK(back.instrument_ids == std::vector<std::string>{"x", "y", "z"});
  CHECK_THROWS_AS(io::schedule_from_csv(io::read_csv(p), TimeGrid(3600.0, 8)), InputError);
}

TEST_CASE("targets alignment") {
  io::Targets t{{"b", "a"}, Vector(2)};
  t.values << 2.0, 1.0;
  const Vector v = io::align_targets(t, {"a", "b", "c"});
  CHECK(v(0) == 1.0);
  CHECK(v(1) == 2.0);
  CHECK(v(2) == 0.0);
  CHECK_THROWS_AS(io::align_targets(t, {"a"}), InputError);
}

TEST_CASE("market series round trip") {
  std::mt19937_64 rng(75);
  MarketSeries s;
  s.instrument_ids = {"P", "Q"};
  s.dt = 60.0;
  s.prices = (testkit::gaussian(rng, 2, 30).array() + 50.0).matrix();
  s.flows = testkit::gaussian(rng, 2, 30) * 1e3;
  const fs::path p = scratch("market.csv");
  io::write_market(p, s);
  const MarketSeries back = io::read_market(p);
  CHECK(back.prices == s.prices);
  CHECK(back.flows == s.flows);
  CHECK(back.dt == 60.0);
  CHECK(back.instrument_ids == s.instrument_ids);

  std::string text = io::read_text(p);
  text += "1860,P,1.0,2.0\n";  // bin 30 exists only for P
  io::write_text_atomic(p, text);
  CHECK_THROWS_AS(io::read_market(p), InputError);
}

TEST_CASE("world config parsing") {
  std::mt19937_64 rng(76);
  const PropagatorModel m = testkit::random_model(rng, 3);
  io::Json doc{{"model", io::to_json(m)}, {"n_days", 3}, {"noise_share", 0.8}};
  const WorldConfig w = io::world_config_from_json(doc);
  CHECK(w.n_days == 3);
  CHECK(w.noise_share == 0.8);
  CHECK(w.bins_per_day == 96);
  const WorldConfig again = io::world_config_from_json(io::to_json(w));
  CHECK(again.noise_share == 0.8);
  CHECK(again.model.liquidities == m.liquidities);
  CHECK_THROWS_AS(io::world_config_from_json(io::Json{{"n_days", 3}}), ConfigError);
  doc["n_days"] = "many";
  CHECK_THROWS_AS(io::world_config_from_json(doc), ConfigError);
}

TEST_CASE("atomic write creates directories and leaves no temp files") {
  const fs::path dir = scratch("nested") / "deeper";
  io::write_text_atomic(dir / "f.txt", "hello");
  CHECK(io::read_text(dir / "f.txt") == "hello");
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
}
