#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "splitprec/common.hpp"

namespace splitprec {

/// Flat `key = value` configuration. Lines starting with `#` are comments.
/// Lookups of absent required keys raise a ConfigError naming the key.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in, const std::string& origin = "<stream>");
  static KeyValueConfig parse_string(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  const std::string& require(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  int require_int(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

  // Canonical text (sorted keys), used for hashing and manifests.
  std::string canonical_text() const;

 private:
  std::map<std::string, std::string> values_;
};

struct SystemConfig {
  int M = 32;
  int K = 8;
  int N = 8;
  double q = 1.0;
  double gamma = 1.0;
  double sigma0_sq = 1.0;
  std::vector<double> snr_db_list{-10.0, 0.0, 10.0, 20.0, 30.0, 40.0};
  int b_split = 4;
  int b_one_stage = 1;

  void validate() const;

  // Copy with sigma0_sq set so that q*gamma/sigma0_sq equals the given SNR.
  SystemConfig at_snr(double snr_db) const;
};

double noise_variance_for_snr(double snr_db, double q = 1.0, double gamma = 1.0);

struct MmWaveParams {
  int num_taps = 4;
  double rician_factor_db = 10.0;
  int num_subcarriers = 64;
  double antenna_spacing = 0.5;  // wavelengths
  double aoa_min = -std::numbers::pi / 2;
  double aoa_max = std::numbers::pi / 2;

  void validate() const;
  // Linear Rician factor; +inf for a pure line-of-sight first tap.
  double kappa() const;
};

// M, K and N are required; every other field falls back to its default.
SystemConfig system_config_from(const KeyValueConfig& kv);
MmWaveParams mmwave_params_from(const KeyValueConfig& kv);

// 64-bit FNV-1a digest rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace splitprec
