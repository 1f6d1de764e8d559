#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "elm/calibration.hpp"
#include "elm/cost.hpp"
#include "elm/kernel.hpp"
#include "elm/model.hpp"
#include "elm/optimizer.hpp"
#include "elm/spectral.hpp"
#include "elm/synthgen.hpp"

namespace elm::io {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

/// Shortest round-trip decimal form ("%.17g"); "inf"/"nan" for non-finite.
std::string format_double(double value);

/// Writes via a temporary file in the same directory, then renames.
/// Creates missing parent directories.
void write_text_atomic(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

Json read_json(const fs::path& path);
void write_json(const fs::path& path, const Json& doc);

/// Parsed CSV with 1-based source line numbers for diagnostics.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  /// Column index of `name`; throws InputError if absent.
  std::size_t column(const std::string& name) const;
  /// Parses row r, column c as a finite double; InputError names the line.
  double number(std::size_t r, std::size_t c) const;
};

/// Comma separated, first non-empty line is the header, blank lines are
/// skipped. Every row must have as many fields as the header.
CsvTable parse_csv(const std::string& text, const std::string& source);
CsvTable read_csv(const fs::path& path);

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  CsvWriter& row(const std::vector<std::string>& fields);
  CsvWriter& row(const std::vector<double>& values);
  const std::string& str() const { return text_; }
  void save(const fs::path& path) const { write_text_atomic(path, text_); }

 private:
  std::string text_;
  std::size_t width_;
};

Json to_json(const DecayKernel& kernel);
DecayKernel kernel_from_json(const Json& doc);
Json to_json(const TimeGrid& grid);
TimeGrid grid_from_json(const Json& doc);

Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& doc);
Json to_json(const Vector& v);
Vector vector_from_json(const Json& doc);

/// {"instrument_ids": [...], "matrix": [[...]]}
Json correlation_to_json(const CorrelationMatrix& rho, const std::vector<std::string>& ids);
std::string correlation_to_csv(const CorrelationMatrix& rho, const std::vector<std::string>& ids);

struct NamedCorrelation {
  std::vector<std::string> instrument_ids;
  CorrelationMatrix rho;
};
NamedCorrelation correlation_from_csv(const CsvTable& table);
NamedCorrelation correlation_from_json(const Json& doc);
/// Dispatches on the extension (.json, otherwise CSV).
NamedCorrelation read_correlation(const fs::path& path);

Json to_json(const PropagatorModel& model);
PropagatorModel model_from_json(const Json& doc);
PropagatorModel read_model(const fs::path& path);

/// Assembled G with instrument header; optionally with the average
/// off-diagonal subtracted from the off-diagonal entries.
std::string impact_to_csv(const PropagatorModel& model, bool remove_market);

/// Header of instrument ids, one row of rates per bin.
std::string schedule_to_csv(const ExecutionSchedule& schedule, const std::vector<std::string>& ids);
struct NamedSchedule {
  std::vector<std::string> instrument_ids;
  ExecutionSchedule schedule;
};
NamedSchedule schedule_from_csv(const CsvTable& table, const TimeGrid& grid);
/// Schedule CSV plus the "<path>.grid.json" sidecar.
void write_schedule(const fs::path& path, const ExecutionSchedule& schedule, const std::vector<std::string>& ids);
/// Grid from the sidecar if present, else `fallback`.
NamedSchedule read_schedule(const fs::path& path, const TimeGrid& fallback);
fs::path grid_sidecar(const fs::path& schedule_path);

/// "instrument,target" rows, reordered to match `ids` when given.
struct Targets {
  std::vector<std::string> instrument_ids;
  Vector values;
};
Targets read_targets(const fs::path& path);
Vector align_targets(const Targets& targets, const std::vector<std::string>& ids);

/// Long format: timestamp,instrument,price,signed_flow; timestamps in
/// seconds from the series start (bin t ends at (t + 1) dt).
std::string market_to_csv(const MarketSeries& series);
Json market_manifest(const MarketSeries& series);
MarketSeries market_from_csv(const CsvTable& table, const Json& manifest);
/// Reads the CSV and "<stem>.json" (or the explicit manifest path).
MarketSeries read_market(const fs::path& csv_path, const fs::path& manifest_path = {});
void write_market(const fs::path& csv_path, const MarketSeries& series);
fs::path market_manifest_path(const fs::path& csv_path);

Json to_json(const CalibrationConfig& config);
CalibrationConfig calibration_config_from_json(const Json& doc, CalibrationConfig base = {});
Json to_json(const CalibrationReport& report);
std::string kernel_table_csv(const KernelFit& fit);
std::string mode_estimates_csv(const CalibrationReport& report);
std::string liquidity_spectrum_csv(const PropagatorModel& model);

/// World config: {"model": ..., "flow_scale", "flow_persistence",
/// "noise_share", "n_days", "bins_per_day", "bin_seconds", "memory_bins",
/// "price_level", "impulses"}. The model may be given inline or as
/// "model_path" relative to `base_dir`.
WorldConfig world_config_from_json(const Json& doc, const fs::path& base_dir = {});
Json to_json(const WorldConfig& config);

BiasSweepConfig bias_config_from_json(const Json& doc, BiasSweepConfig base = {});
Json to_json(const BiasSweepConfig& config);
std::string bias_sweep_csv(const BiasSweep& sweep);

std::string profile_comparison_csv(const std::vector<ProfileCostRow>& rows);

}  // namespace elm::io
