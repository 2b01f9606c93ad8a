#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "splitprec/aas.hpp"
#include "splitprec/bbu.hpp"
#include "splitprec/config.hpp"
#include "splitprec/quantizer.hpp"

namespace splitprec {

enum class SchemeKind {
  inf_rzf,               // unquantized one-stage RZF
  split,                 // AAS subspace + SESD-quantized BBU precoder
  split_quantized_qrzf,  // AAS subspace + entrywise-rounded QRZF (internal baseline)
  one_stage,             // SESD-quantized full M x K precoder
};

/// One precoding scheme of a sweep. Zero-valued overrides fall back to the
/// sweep configuration (N, b_split / b_one_stage, M).
struct Scheme {
  SchemeKind kind = SchemeKind::split;
  AasMethod aas = AasMethod::gs_mrt;
  int N = 0;
  int bits = 0;
  int M = 0;  // antenna count override (one-stage at reduced scale)
  std::uint64_t max_nodes = 0;  // SESD node cap per column; 0 = sweep default

  std::string name() const;
};

/// Parses `base[:N=..][:B=..][:M=..][:nodes=..]` where base is one of
/// inf_rzf, gs_mrt, mrt, dft, one_stage_sesd, gs_mrt_qqrzf, mrt_qqrzf,
/// dft_qqrzf.
Scheme parse_scheme(std::string_view token);
std::vector<Scheme> parse_scheme_list(std::string_view csv);

enum class ChannelModel { rayleigh, mmwave };
std::string to_string(ChannelModel model);
ChannelModel parse_channel_model(std::string_view name);

// Which dimension enters the QRZF regularizer for split schemes.
enum class MuDimension { N, M };

struct SweepConfig {
  SystemConfig system;
  MmWaveParams mmwave;
  ChannelModel channel = ChannelModel::rayleigh;
  std::vector<Scheme> schemes;
  int trials = 500;
  std::uint64_t seed = 1;
  MuDimension mu_dim = MuDimension::N;
  int calibration_draws = 1000;
  double calibration_snr_db = 20.0;
  int one_stage_budget_bits = 48;
  bool allow_large = false;
  int subcarrier_stride = 1;  // mmWave: evaluate every stride-th subcarrier
  std::uint64_t max_nodes = 0;  // default SESD node cap per column solve; 0 = exact

  void validate() const;
  // Resolved per-scheme dimensions.
  int scheme_N(const Scheme& s) const;
  int scheme_M(const Scheme& s) const;
  int scheme_bits(const Scheme& s) const;
  std::uint64_t scheme_max_nodes(const Scheme& s) const;
  // Flat key-value snapshot; hashing it gives the config hash.
  KeyValueConfig snapshot() const;
  std::string config_hash() const;
};

SweepConfig sweep_config_from(const KeyValueConfig& kv);

// Calibration keyed by scheme name.
using CalibrationTable = std::map<std::string, QuantizerSpec>;

/// Offline step-size calibration for one quantized scheme: real and
/// imaginary entries of the power-normalized QRZF on the scheme's
/// (effective) channel over calibration_draws independent draws at
/// calibration_snr_db.
QuantizerSpec calibrate_scheme(const SweepConfig& config, const Scheme& scheme,
                               Execution exec = Execution::parallel);
CalibrationTable calibrate_schemes(const SweepConfig& config, Execution exec = Execution::parallel);
bool scheme_needs_quantizer(const Scheme& scheme);

struct SweepRow {
  std::string scheme;
  std::string channel;
  double snr_db = 0.0;
  int trials = 0;
  double avg_sum_rate = 0.0;
  double std_err = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  // Solver diagnostics (sidecar).
  double mean_lambda_star = 0.0;
  double mean_power = 0.0;
  double mean_nodes = 0.0;
  bool all_exact = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  CalibrationTable calibration;
  // rates[row][trial], kept for significance tests.
  std::vector<std::vector<double>> trial_rates;

  const SweepRow& row(const std::string& scheme, double snr_db) const;
  const std::vector<double>& rates(const std::string& scheme, double snr_db) const;
};

/// Rate of one scheme on one channel realization (final precoder scaled to
/// power q). Diagnostics are written to `stats` when non-null.
struct TrialStats {
  double lambda_star = 0.0;
  double power = 0.0;
  std::uint64_t nodes = 0;
  bool exact = true;
};
double scheme_rate(const SweepConfig& config, const Scheme& scheme, const QuantizerSpec* spec,
                   const ChannelMatrix& channel, double sigma0_sq, TrialStats* stats = nullptr,
                   Execution inner = Execution::serial);

/// Monte-Carlo sweep: every SNR point and scheme, averaged over trials.
/// Trials run on OpenMP threads in the parallel path; per-trial rates are
/// reduced in trial order so both paths report identical averages. Channel
/// draws are shared across schemes and SNR points (trial t always uses the
/// same realization).
SweepResult run_sweep(const SweepConfig& config, const CalibrationTable& calibration,
                      Execution exec = Execution::parallel);

}  // namespace splitprec
