#include "elm/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "elm/error.hpp"

namespace elm::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

template <class T>
T required(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("field \"") + key + "\" has the wrong type");
  }
}

template <class T>
T optional_field(const Json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("field \"") + key + "\" has the wrong type");
  }
}

std::vector<std::string> default_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("S" + std::to_string(i));
  return ids;
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double json_double(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw InputError("expected a number");
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  // prefer the shortest representation that round-trips
  for (int prec = 6; prec < 17; ++prec) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, value);
    if (std::strtod(shorter, nullptr) == value) return shorter;
  }
  return buf;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory " + dir.string() + ": " + ec.message());
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const Json& doc) { write_text_atomic(path, doc.dump(2) + "\n"); }

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return c;
  throw InputError(source + ": missing column \"" + name + "\"");
}

double CsvTable::number(std::size_t r, std::size_t c) const {
  const std::string& field = rows.at(r).at(c);
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (field.empty() || end != begin + field.size() || errno == ERANGE || !std::isfinite(v)) {
    throw InputError(source + ":" + std::to_string(lines.at(r)) + ": column " + std::to_string(c + 1) +
                     ": not a finite number: \"" + field + "\"");
  }
  return v;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable table;
  table.source = source;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw InputError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(table.header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.lines.push_back(lineno);
  }
  if (!have_header) throw InputError(source + ": empty CSV");
  return table;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_text(path), path.string()); }

CsvWriter::CsvWriter(const std::vector<std::string>& header) : width_(header.size()) { row(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw InputError("CSV row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) text_.push_back(',');
    text_ += fields[i];
  }
  text_.push_back('\n');
  return *this;
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> fields;
  fields.reserve(values.size());
  for (double v : values) fields.push_back(format_double(v));
  return row(fields);
}

Json to_json(const DecayKernel& kernel) { return Json{{"alpha", kernel.alpha()}, {"tau0_seconds", kernel.tau0()}}; }

DecayKernel kernel_from_json(const Json& doc) {
  return {required<double>(doc, "alpha"), required<double>(doc, "tau0_seconds")};
}

Json to_json(const TimeGrid& grid) {
  return Json{{"horizon_seconds", grid.horizon()}, {"n_bins", grid.n_bins()}};
}

TimeGrid grid_from_json(const Json& doc) {
  return {required<double>(doc, "horizon_seconds"), required<std::size_t>(doc, "n_bins")};
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& doc) {
  if (!doc.is_array()) throw InputError("matrix must be an array of rows");
  const auto n = static_cast<Eigen::Index>(doc.size());
  const auto m = n ? static_cast<Eigen::Index>(doc.at(0).size()) : 0;
  Matrix out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = doc.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) throw InputError("ragged matrix rows");
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = json_double(row.at(static_cast<std::size_t>(j)));
  }
  return out;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Vector vector_from_json(const Json& doc) {
  if (!doc.is_array()) throw InputError("expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i) out(static_cast<Eigen::Index>(i)) = json_double(doc[i]);
  return out;
}

Json correlation_to_json(const CorrelationMatrix& rho, const std::vector<std::string>& ids) {
  return Json{{"instrument_ids", ids}, {"matrix", to_json(rho.matrix())}};
}

std::string correlation_to_csv(const CorrelationMatrix& rho, const std::vector<std::string>& ids) {
  CsvWriter w(ids);
  for (Eigen::Index i = 0; i < rho.matrix().rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < rho.matrix().cols(); ++j) row.push_back(rho(i, j));
    w.row(row);
  }
  return w.str();
}

NamedCorrelation correlation_from_csv(const CsvTable& table) {
  const std::size_t n = table.header.size();
  if (table.rows.size() != n)
    throw InputError(table.source + ": correlation CSV needs " + std::to_string(n) + " rows, found " +
                     std::to_string(table.rows.size()));
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = table.number(r, c);
  return {table.header, CorrelationMatrix(m)};
}

NamedCorrelation correlation_from_json(const Json& doc) {
  Matrix m = matrix_from_json(doc.is_array() ? doc : doc.at("matrix"));
  auto ids = doc.is_object() && doc.contains("instrument_ids") ? doc.at("instrument_ids").get<std::vector<std::string>>()
                                                               : default_ids(static_cast<std::size_t>(m.rows()));
  if (ids.size() != static_cast<std::size_t>(m.rows())) throw InputError("instrument_ids do not match matrix size");
  return {ids, CorrelationMatrix(m)};
}

NamedCorrelation read_correlation(const fs::path& path) {
  if (path.extension() == ".json") return correlation_from_json(read_json(path));
  return correlation_from_csv(read_csv(path));
}

Json to_json(const PropagatorModel& model) {
  Json doc;
  doc["instrument_ids"] = model.instrument_ids;
  doc["eigenvalues"] = to_json(model.eigen.values);
  doc["eigenvectors"] = to_json(model.eigen.vectors);
  doc["mode_liquidities"] = to_json(model.liquidities);
  doc["kernel"] = to_json(model.kernel);
  doc["volatilities"] = to_json(model.volatilities);
  return doc;
}

PropagatorModel model_from_json(const Json& doc) {
  if (!doc.is_object()) throw InputError("model must be a JSON object");
  PropagatorModel model;
  try {
    model.eigen.values = vector_from_json(doc.at("eigenvalues"));
    model.eigen.vectors = matrix_from_json(doc.at("eigenvectors"));
    model.liquidities = vector_from_json(doc.at("mode_liquidities"));
    model.kernel = kernel_from_json(doc.at("kernel"));
  } catch (const nlohmann::json::out_of_range& e) {
    throw InputError(std::string("model: missing field: ") + e.what());
  }
  const std::size_t n = model.eigen.size();
  model.volatilities = doc.contains("volatilities") ? vector_from_json(doc.at("volatilities"))
                                                     : Vector::Ones(static_cast<Eigen::Index>(n));
  model.instrument_ids = doc.contains("instrument_ids") ? doc.at("instrument_ids").get<std::vector<std::string>>()
                                                        : default_ids(n);
  model.validate_shapes();
  return model;
}

PropagatorModel read_model(const fs::path& path) {
  try {
    return model_from_json(read_json(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string impact_to_csv(const PropagatorModel& model, bool remove_market) {
  Matrix g = assemble_impact_matrix(model);
  if (remove_market) g = remove_market_mode(g);
  CsvWriter w(model.instrument_ids);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < g.cols(); ++j) row.push_back(g(i, j));
    w.row(row);
  }
  return w.str();
}

std::string schedule_to_csv(const ExecutionSchedule& schedule, const std::vector<std::string>& ids) {
  if (ids.size() != schedule.n_assets()) throw InputError("instrument ids do not match schedule");
  CsvWriter w(ids);
  const Matrix& r = schedule.rates();
  for (Eigen::Index k = 0; k < r.cols(); ++k) {
    std::vector<double> row;
    for (Eigen::Index i = 0; i < r.rows(); ++i) row.push_back(r(i, k));
    w.row(row);
  }
  return w.str();
}

NamedSchedule schedule_from_csv(const CsvTable& table, const TimeGrid& grid) {
  if (table.rows.size() != grid.n_bins())
    throw InputError(table.source + ": schedule has " + std::to_string(table.rows.size()) + " rows but the grid has " +
                     std::to_string(grid.n_bins()) + " bins");
  Matrix rates(static_cast<Eigen::Index>(table.header.size()), static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t k = 0; k < table.rows.size(); ++k)
    for (std::size_t i = 0; i < table.header.size(); ++i)
      rates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = table.number(k, i);
  return {table.header, ExecutionSchedule(grid, rates)};
}

fs::path grid_sidecar(const fs::path& schedule_path) {
  fs::path p = schedule_path;
  p.replace_extension(".grid.json");
  return p;
}

void write_schedule(const fs::path& path, const ExecutionSchedule& schedule, const std::vector<std::string>& ids) {
  write_text_atomic(path, schedule_to_csv(schedule, ids));
  write_json(grid_sidecar(path), to_json(schedule.grid()));
}

NamedSchedule read_schedule(const fs::path& path, const TimeGrid& fallback) {
  const fs::path sidecar = grid_sidecar(path);
  const TimeGrid grid = fs::exists(sidecar) ? grid_from_json(read_json(sidecar)) : fallback;
  return schedule_from_csv(read_csv(path), grid);
}

Targets read_targets(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t ci = t.column("instrument");
  const std::size_t cv = t.column("target");
  Targets out;
  out.values.resize(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out.instrument_ids.push_back(t.rows[r][ci]);
    out.values(static_cast<Eigen::Index>(r)) = t.number(r, cv);
  }
  return out;
}

Vector align_targets(const Targets& targets, const std::vector<std::string>& ids) {
  std::map<std::string, double> by_id;
  for (std::size_t i = 0; i < targets.instrument_ids.size(); ++i) {
    if (!by_id.emplace(targets.instrument_ids[i], targets.values(static_cast<Eigen::Index>(i))).second)
      throw InputError("duplicate target for " + targets.instrument_ids[i]);
  }
  Vector out = Vector::Zero(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto it = by_id.find(ids[i]);
    if (it != by_id.end()) {
      out(static_cast<Eigen::Index>(i)) = it->second;
      by_id.erase(it);
    }
  }
  if (!by_id.empty()) throw InputError("target for unknown instrument " + by_id.begin()->first);
  return out;
}

std::string market_to_csv(const MarketSeries& series) {
  CsvWriter w({"timestamp", "instrument", "price", "signed_flow"});
  for (std::size_t t = 0; t < series.n_bins(); ++t) {
    const std::string ts = format_double(static_cast<double>(t + 1) * series.dt);
    for (std::size_t i = 0; i < series.n_assets(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto tt = static_cast<Eigen::Index>(t);
      w.row(std::vector<std::string>{ts, series.instrument_ids[i], format_double(series.prices(ii, tt)),
                                     format_double(series.flows(ii, tt))});
    }
  }
  return w.str();
}

Json market_manifest(const MarketSeries& series) {
  return Json{{"dt_seconds", series.dt},
              {"units", series.units == FlowUnits::Shares ? "shares" : "risk"},
              {"instrument_ids", series.instrument_ids},
              {"n_bins", series.n_bins()}};
}

MarketSeries market_from_csv(const CsvTable& table, const Json& manifest) {
  MarketSeries s;
  s.dt = required<double>(manifest, "dt_seconds");
  if (!(s.dt > 0.0)) throw InputError("manifest dt_seconds must be positive");
  const auto units = optional_field<std::string>(manifest, "units", "shares");
  if (units == "shares") s.units = FlowUnits::Shares;
  else if (units == "risk") s.units = FlowUnits::Risk;
  else throw InputError("manifest units must be \"shares\" or \"risk\"");

  const std::size_t cts = table.column("timestamp");
  const std::size_t cid = table.column("instrument");
  const std::size_t cp = table.column("price");
  const std::size_t cf = table.column("signed_flow");

  std::map<std::string, std::size_t> asset_index;
  if (manifest.contains("instrument_ids")) {
    s.instrument_ids = manifest.at("instrument_ids").get<std::vector<std::string>>();
  } else {
    for (const auto& row : table.rows)
      if (asset_index.emplace(row[cid], 0).second) s.instrument_ids.push_back(row[cid]);
  }
  asset_index.clear();
  for (std::size_t i = 0; i < s.instrument_ids.size(); ++i) asset_index[s.instrument_ids[i]] = i;

  // Bin index from the timestamp: bin t ends at (t + 1) dt, relative to the
  // first timestamp in the file.
  double t0 = INFINITY;
  for (std::size_t r = 0; r < table.rows.size(); ++r) t0 = std::min(t0, table.number(r, cts));
  std::size_t n_bins = 0;
  std::vector<std::size_t> bin_of(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double rel = (table.number(r, cts) - t0) / s.dt;
    const double rounded = std::round(rel);
    if (std::abs(rel - rounded) > 1e-6)
      throw InputError(table.source + ":" + std::to_string(table.lines[r]) + ": timestamp not on the dt grid");
    bin_of[r] = static_cast<std::size_t>(rounded);
    n_bins = std::max(n_bins, bin_of[r] + 1);
  }
  const auto n = static_cast<Eigen::Index>(s.instrument_ids.size());
  s.prices = Matrix::Constant(n, static_cast<Eigen::Index>(n_bins), NAN);
  s.flows = Matrix::Constant(n, static_cast<Eigen::Index>(n_bins), NAN);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    auto it = asset_index.find(table.rows[r][cid]);
    if (it == asset_index.end())
      throw InputError(table.source + ":" + std::to_string(table.lines[r]) + ": unknown instrument \"" +
                       table.rows[r][cid] + "\"");
    const auto i = static_cast<Eigen::Index>(it->second);
    const auto t = static_cast<Eigen::Index>(bin_of[r]);
    if (!std::isnan(s.prices(i, t)))
      throw InputError(table.source + ":" + std::to_string(table.lines[r]) + ": duplicate observation");
    s.prices(i, t) = table.number(r, cp);
    s.flows(i, t) = table.number(r, cf);
  }
  if (!s.prices.allFinite()) throw InputError(table.source + ": missing observations (every instrument needs every bin)");
  s.validate();
  return s;
}

fs::path market_manifest_path(const fs::path& csv_path) {
  fs::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

MarketSeries read_market(const fs::path& csv_path, const fs::path& manifest_path) {
  const fs::path mp = manifest_path.empty() ? market_manifest_path(csv_path) : manifest_path;
  const Json manifest = read_json(mp);
  return market_from_csv(read_csv(csv_path), manifest);
}

void write_market(const fs::path& csv_path, const MarketSeries& series) {
  write_text_atomic(csv_path, market_to_csv(series));
  write_json(market_manifest_path(csv_path), market_manifest(series));
}

Json to_json(const CalibrationConfig& c) {
  return Json{{"horizon_bins", c.horizon_bins}, {"max_lag", c.max_lag},       {"eigen_floor", c.eigen_floor},
              {"ridge", c.ridge},               {"bin_seconds", c.bin_seconds}, {"force_negative", c.force_negative}};
}

CalibrationConfig calibration_config_from_json(const Json& doc, CalibrationConfig c) {
  c.horizon_bins = optional_field(doc, "horizon_bins", c.horizon_bins);
  c.max_lag = optional_field(doc, "max_lag", c.max_lag);
  c.eigen_floor = optional_field(doc, "eigen_floor", c.eigen_floor);
  c.ridge = optional_field(doc, "ridge", c.ridge);
  c.bin_seconds = optional_field(doc, "bin_seconds", c.bin_seconds);
  c.force_negative = optional_field(doc, "force_negative", c.force_negative);
  return c;
}

Json to_json(const CalibrationReport& report) {
  Json doc;
  doc["complete"] = report.complete;
  doc["config"] = to_json(report.config);
  if (!report.complete) {
    doc["failed_step"] = report.failed_step;
    doc["failure_category"] = report.failure_category;
    doc["failure_message"] = report.failure_message;
  }
  doc["instrument_ids"] = report.instrument_ids;
  doc["dt_seconds"] = report.dt;
  if (report.covariance) {
    doc["covariance"] = {{"n_windows", report.covariance->n_windows},
                         {"volatilities", to_json(report.covariance->sigma)},
                         {"correlation", to_json(report.covariance->rho.matrix())}};
  }
  if (report.kernel) {
    const auto& k = *report.kernel;
    doc["kernel"] = {{"alpha", k.alpha},
                     {"tau0_seconds", k.tau0},
                     {"fit_rms", k.fit_rms},
                     {"fit_iterations", k.fit_iterations},
                     {"amplitude", k.amplitude},
                     {"condition_number", number(k.condition_number)}};
  }
  if (report.raw_eigen) doc["raw_eigenvalues"] = to_json(report.raw_eigen->values);
  if (report.eigen) {
    doc["eigenvalues"] = to_json(report.eigen->values);
    doc["eigen_floor"] = report.eigen_floor;
  }
  if (!report.modes.empty()) {
    Json modes = Json::array();
    for (const auto& m : report.modes) {
      modes.push_back({{"mode", m.mode},
                       {"eigenvalue", m.eigenvalue},
                       {"g", number(m.g)},
                       {"numerator", m.numerator},
                       {"denominator", m.denominator},
                       {"status", to_string(m.status)}});
    }
    doc["modes"] = std::move(modes);
    doc["mode_liquidities"] = to_json(report.liquidities);
  }
  if (report.complete) doc["model"] = to_json(report.model());
  return doc;
}

std::string kernel_table_csv(const KernelFit& fit) {
  CsvWriter w({"lag", "tau_seconds", "phi_hat", "phi_fit", "increment"});
  const DecayKernel fitted = fit.kernel();
  for (Eigen::Index l = 0; l < fit.table.size(); ++l) {
    const double tau = static_cast<double>(l) * fit.dt;
    w.row(std::vector<std::string>{std::to_string(l), format_double(tau), format_double(fit.table(l)),
                                   format_double(fitted(tau)), format_double(fit.increments(l))});
  }
  return w.str();
}

std::string mode_estimates_csv(const CalibrationReport& report) {
  CsvWriter w({"mode", "eigenvalue", "g", "liquidity", "status"});
  for (const auto& m : report.modes) {
    const double liq = m.g > 0.0 ? 1.0 / m.g : INFINITY;
    w.row(std::vector<std::string>{std::to_string(m.mode), format_double(m.eigenvalue), format_double(m.g),
                                   format_double(liq), to_string(m.status)});
  }
  return w.str();
}

std::string liquidity_spectrum_csv(const PropagatorModel& model) {
  CsvWriter w({"mode", "eigenvalue", "g", "liquidity"});
  for (const auto& r : liquidity_spectrum(model))
    w.row(std::vector<std::string>{std::to_string(r.mode), format_double(r.eigenvalue), format_double(r.g),
                                   format_double(r.liquidity)});
  return w.str();
}

WorldConfig world_config_from_json(const Json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("world config must be a JSON object");
  WorldConfig c;
  try {
    if (doc.contains("model")) {
      c.model = model_from_json(doc.at("model"));
    } else if (doc.contains("model_path")) {
      fs::path p = doc.at("model_path").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      c.model = read_model(p);
    } else {
      throw ConfigError("world config needs \"model\" or \"model_path\"");
    }
  } catch (const InputError& e) {
    throw ConfigError(std::string("world model: ") + e.what());
  }
  if (doc.contains("flow_scale")) c.flow_scale = vector_from_json(doc.at("flow_scale"));
  c.flow_persistence = optional_field(doc, "flow_persistence", c.flow_persistence);
  c.noise_share = optional_field(doc, "noise_share", c.noise_share);
  c.n_days = optional_field(doc, "n_days", c.n_days);
  c.bins_per_day = optional_field(doc, "bins_per_day", c.bins_per_day);
  c.bin_seconds = optional_field(doc, "bin_seconds", c.bin_seconds);
  c.memory_bins = optional_field(doc, "memory_bins", c.memory_bins);
  c.price_level = optional_field(doc, "price_level", c.price_level);
  c.seed = optional_field(doc, "seed", c.seed);
  if (doc.contains("impulses")) {
    for (const auto& imp : doc.at("impulses"))
      c.impulses.push_back({required<std::size_t>(imp, "asset"), required<std::size_t>(imp, "bin"),
                            required<double>(imp, "risk")});
  }
  c.validate();
  return c;
}

Json to_json(const WorldConfig& c) {
  Json doc;
  doc["model"] = to_json(c.model);
  doc["flow_scale"] = c.flow_scale.size() ? to_json(c.flow_scale) : to_json(Vector(Vector::Ones(static_cast<Eigen::Index>(c.model.size()))));
  doc["flow_persistence"] = c.flow_persistence;
  doc["noise_share"] = c.noise_share;
  doc["n_days"] = c.n_days;
  doc["bins_per_day"] = c.bins_per_day;
  doc["bin_seconds"] = c.bin_seconds;
  doc["memory_bins"] = c.memory_bins;
  doc["price_level"] = c.price_level;
  doc["seed"] = c.seed;
  Json imps = Json::array();
  for (const auto& i : c.impulses) imps.push_back({{"asset", i.asset}, {"bin", i.bin}, {"risk", i.risk}});
  doc["impulses"] = std::move(imps);
  return doc;
}

BiasSweepConfig bias_config_from_json(const Json& doc, BiasSweepConfig c) {
  c.betas = optional_field(doc, "betas", c.betas);
  c.participations = optional_field(doc, "participations", c.participations);
  c.mc_draws = optional_field(doc, "mc_draws", c.mc_draws);
  c.seed = optional_field(doc, "seed", c.seed);
  c.daily_vol_fraction = optional_field(doc, "daily_vol_fraction", c.daily_vol_fraction);
  return c;
}

Json to_json(const BiasSweepConfig& c) {
  return Json{{"betas", c.betas},
              {"participations", c.participations},
              {"mc_draws", c.mc_draws},
              {"seed", c.seed},
              {"daily_vol_fraction", c.daily_vol_fraction}};
}

std::string bias_sweep_csv(const BiasSweep& sweep) {
  CsvWriter w({"beta", "participation", "expected_cost", "expected_cost_bps", "mc_mean", "mc_stderr", "expected_risk",
               "cost_per_risk"});
  for (const auto& r : sweep.rows)
    w.row(std::vector<double>{r.beta, r.participation, r.expected_cost, r.expected_cost_bps, r.mc_mean, r.mc_stderr,
                              r.expected_risk, r.cost_per_risk});
  return w.str();
}

std::string profile_comparison_csv(const std::vector<ProfileCostRow>& rows) {
  CsvWriter w({"profile", "kernel_norm", "relative_excess"});
  for (const auto& r : rows)
    w.row(std::vector<std::string>{r.name, format_double(r.kernel_norm), format_double(r.relative_excess)});
  return w.str();
}

}  // namespace elm::io
