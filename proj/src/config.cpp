#include "splitprec/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace splitprec {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (trim(text.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: key '" + key + "' expects a number, got '" + text + "'");
}

int parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (trim(text.substr(pos)).empty()) return static_cast<int>(v);
  } catch (const std::exception&) {
  }
  throw ConfigError("config: key '" + key + "' expects an integer, got '" + text + "'");
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& origin) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in, "<string>");
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  return parse(in, path.string());
}

const std::string& KeyValueConfig::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config: missing required key '" + key + "'");
  return it->second;
}

std::optional<std::string> KeyValueConfig::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return find(key).value_or(fallback);
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto v = find(key);
  return v ? parse_int(key, *v) : fallback;
}

int KeyValueConfig::require_int(const std::string& key) const {
  return parse_int(key, require(key));
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = find(key);
  return v ? parse_double(key, *v) : fallback;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    const std::vector<double>& fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("config: key '" + key + "' has an empty list item");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError("config: key '" + key + "' is an empty list");
  return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + *v + "'");
}

std::string KeyValueConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

void SystemConfig::validate() const {
  if (M < 1 || K < 1 || N < 1) throw ConfigError("config: dimensions M, K, N must be >= 1");
  if (!(K <= N && N <= M)) throw ConfigError("config: require K <= N <= M");
  if (!(q > 0) || !(gamma > 0) || !(sigma0_sq > 0)) {
    throw ConfigError("config: q, gamma and sigma0_sq must be positive");
  }
  if (b_split < 1 || b_one_stage < 1) throw ConfigError("config: bit budgets must be >= 1");
  for (double s : snr_db_list) {
    if (!std::isfinite(s)) throw ConfigError("config: non-finite SNR point");
  }
}

SystemConfig SystemConfig::at_snr(double snr_db) const {
  SystemConfig c = *this;
  c.sigma0_sq = noise_variance_for_snr(snr_db, q, gamma);
  return c;
}

double noise_variance_for_snr(double snr_db, double q, double gamma) {
  return q * gamma * std::pow(10.0, -snr_db / 10.0);
}

void MmWaveParams::validate() const {
  if (num_taps < 1) throw ConfigError("mmwave: num_taps must be >= 1");
  if (num_subcarriers < num_taps) throw ConfigError("mmwave: num_subcarriers must be >= num_taps");
  if (std::isnan(rician_factor_db)) throw ConfigError("mmwave: rician_factor_db is NaN");
  if (!(kappa() > 0)) throw ConfigError("mmwave: Rician factor must be positive");
  if (!(antenna_spacing > 0) || !std::isfinite(antenna_spacing)) {
    throw ConfigError("mmwave: antenna_spacing must be positive");
  }
  if (!(aoa_min <= aoa_max)) throw ConfigError("mmwave: aoa_min must not exceed aoa_max");
}

double MmWaveParams::kappa() const { return std::pow(10.0, rician_factor_db / 10.0); }

SystemConfig system_config_from(const KeyValueConfig& kv) {
  SystemConfig c;
  c.M = kv.require_int("M");
  c.K = kv.require_int("K");
  c.N = kv.require_int("N");
  c.q = kv.get_double("q", c.q);
  c.gamma = kv.get_double("gamma", c.gamma);
  c.snr_db_list = kv.get_double_list("snr_db_list", c.snr_db_list);
  c.b_split = kv.get_int("b_split", c.b_split);
  c.b_one_stage = kv.get_int("b_one_stage", c.b_one_stage);
  c.sigma0_sq = kv.has("sigma0_sq") ? kv.get_double("sigma0_sq", 1.0)
                                    : noise_variance_for_snr(c.snr_db_list.front(), c.q, c.gamma);
  c.validate();
  return c;
}

MmWaveParams mmwave_params_from(const KeyValueConfig& kv) {
  MmWaveParams p;
  p.num_taps = kv.get_int("num_taps", p.num_taps);
  p.rician_factor_db = kv.get_double("rician_factor_db", p.rician_factor_db);
  p.num_subcarriers = kv.get_int("num_subcarriers", p.num_subcarriers);
  p.antenna_spacing = kv.get_double("antenna_spacing", p.antenna_spacing);
  p.aoa_min = kv.get_double("aoa_min", p.aoa_min);
  p.aoa_max = kv.get_double("aoa_max", p.aoa_max);
  p.validate();
  return p;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace splitprec
