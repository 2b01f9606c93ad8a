#include "splitprec/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace splitprec {

namespace {

using nlohmann::json;

#ifndef SPLITPREC_VERSION
#define SPLITPREC_VERSION "unknown"
#endif

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

json spec_json(const QuantizerSpec& s) {
  return {{"bits", s.bits}, {"delta", s.delta}, {"eta", s.eta}};
}

QuantizerSpec spec_from_json(const json& j) {
  return make_quantizer(j.at("delta").get<double>(), j.at("bits").get<int>(),
                        j.at("eta").get<double>());
}

json table_json(const CalibrationTable& table) {
  json j = json::object();
  for (const auto& [name, spec] : table) j[name] = spec_json(spec);
  return j;
}

CalibrationTable table_from_json(const json& j) {
  CalibrationTable t;
  for (const auto& [name, v] : j.items()) t.emplace(name, spec_from_json(v));
  return t;
}

json load_json(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string(what) + ": cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

const char* version_string() { return SPLITPREC_VERSION; }

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.scheme << ',' << r.channel << ',' << fmt17(r.snr_db) << ',' << r.trials << ','
        << fmt17(r.avg_sum_rate) << ',' << fmt17(r.std_err) << ',' << r.seed << ','
        << r.config_hash << '\n';
  }
}

void write_solver_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSolverCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.scheme << ',' << r.channel << ',' << fmt17(r.snr_db) << ',' << r.trials << ','
        << fmt17(r.mean_lambda_star) << ',' << fmt17(r.mean_power) << ','
        << fmt17(r.mean_nodes) << ',' << (r.all_exact ? 1 : 0) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: " + path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader) {
    throw ConfigError("csv: " + path.string() + ": unexpected header '" + line + "'");
  }
  std::vector<SweepRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (f.size() != 8) throw ConfigError("csv: " + where + ": expected 8 fields");
    SweepRow r;
    try {
      r.scheme = f[0];
      r.channel = f[1];
      r.snr_db = std::stod(f[2]);
      r.trials = std::stoi(f[3]);
      r.avg_sum_rate = std::stod(f[4]);
      r.std_err = std::stod(f[5]);
      r.seed = std::stoull(f[6]);
      r.config_hash = f[7];
    } catch (const std::exception&) {
      throw ConfigError("csv: " + where + ": malformed numeric field");
    }
    if (r.scheme.empty() || r.channel.empty()) {
      throw ConfigError("csv: " + where + ": empty scheme or channel");
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ConfigError("csv: " + path.string() + " has no data rows");
  return rows;
}

void write_calibration(const std::filesystem::path& path, const CalibrationFile& file) {
  save_json(path, {{"version", version_string()},
                   {"config_hash", file.config_hash},
                   {"seed", file.seed},
                   {"schemes", table_json(file.table)}});
}

CalibrationFile read_calibration(const std::filesystem::path& path) {
  const json j = load_json(path, "calibration");
  CalibrationFile f;
  try {
    f.table = table_from_json(j.at("schemes"));
    f.config_hash = j.value("config_hash", "");
    f.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw ConfigError("calibration: " + path.string() + ": " + e.what());
  }
  return f;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  json config = json::object();
  const KeyValueConfig snapshot = m.config.snapshot();
  for (const auto& [k, v] : snapshot.entries()) config[k] = v;
  json schemes = json::array();
  for (const auto& s : m.config.schemes) schemes.push_back(s.name());
  save_json(path, {{"version", m.version},
                   {"preset", m.preset},
                   {"seed", m.config.seed},
                   {"config_hash", m.config.config_hash()},
                   {"config", config},
                   {"schemes", schemes},
                   {"calibration", table_json(m.calibration)},
                   {"started_utc", m.started_utc},
                   {"finished_utc", m.finished_utc},
                   {"notes", m.notes},
                   {"outputs", m.outputs}});
}

RunManifest read_manifest(const std::filesystem::path& path) {
  const json j = load_json(path, "manifest");
  RunManifest m;
  try {
    KeyValueConfig kv;
    for (const auto& [k, v] : j.at("config").items()) kv.set(k, v.get<std::string>());
    m.config = sweep_config_from(kv);
    m.calibration = table_from_json(j.at("calibration"));
    m.version = j.value("version", "");
    m.preset = j.value("preset", "");
    m.started_utc = j.value("started_utc", "");
    m.finished_utc = j.value("finished_utc", "");
    m.notes = j.value("notes", std::vector<std::string>{});
    m.outputs = j.value("outputs", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ConfigError("manifest: " + path.string() + ": " + e.what());
  }
  const std::string recorded = j.value("config_hash", "");
  if (!recorded.empty() && recorded != m.config.config_hash()) {
    throw ConfigError("manifest: " + path.string() + ": config hash mismatch");
  }
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace splitprec
