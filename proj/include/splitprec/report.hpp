#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "splitprec/sweep.hpp"

namespace splitprec {

inline constexpr const char* kSweepCsvHeader =
    "scheme,channel,snr_db,trials,avg_sum_rate,std_err,seed,config_hash";
inline constexpr const char* kSolverCsvHeader =
    "scheme,channel,snr_db,trials,mean_lambda_star,mean_power,mean_nodes,all_exact";

const char* version_string();

// Doubles are written with 17 significant digits so rows round-trip exactly.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_solver_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Reads the primary columns back. Throws ConfigError for a missing file,
// a wrong header, malformed fields, or a file without data rows.
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

struct CalibrationFile {
  CalibrationTable table;
  std::string config_hash;
  std::uint64_t seed = 0;
};

void write_calibration(const std::filesystem::path& path, const CalibrationFile& file);
CalibrationFile read_calibration(const std::filesystem::path& path);

/// Everything needed to rerun a sweep bit-exactly: the flat config snapshot
/// (which parses back through sweep_config_from) and the calibrated
/// quantizers.
struct RunManifest {
  std::string version;
  std::string preset;
  SweepConfig config;
  CalibrationTable calibration;
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::string> notes;
  std::vector<std::string> outputs;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace splitprec
