#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "splitprec/common.hpp"
#include "splitprec/config.hpp"

namespace splitprec {

/// K x M downlink channel; row k is the transposed channel of UE k.
struct ChannelMatrix {
  CMatrix H;
  std::optional<int> subcarrier_index;

  int num_ues() const { return static_cast<int>(H.rows()); }
  int num_antennas() const { return static_cast<int>(H.cols()); }
};

// i.i.d. CN(0, gamma) entries, deterministic given the seed.
ChannelMatrix gen_rayleigh(const SystemConfig& config, std::uint64_t seed);

/// Multi-tap Rician channel on a half-wavelength ULA, returned as one matrix
/// per OFDM subcarrier. Tap 0 carries the line-of-sight component; taps are
/// equal-power on average and each UE's total tap energy is normalized to
/// exactly gamma * M before the frequency transform.
std::vector<ChannelMatrix> gen_mmwave(const SystemConfig& config, const MmWaveParams& params,
                                      std::uint64_t seed);

// Time-domain taps behind gen_mmwave (index t holds the K x M tap matrix).
std::vector<CMatrix> gen_mmwave_taps(const SystemConfig& config, const MmWaveParams& params,
                                     std::uint64_t seed);

// Unit-modulus ULA steering vector exp(j 2 pi d m sin(theta)).
CVector ula_steering(int M, double spacing, double theta);

// Row-major CSV of interleaved re,im values (2*M columns per row).
void write_channel_csv(std::ostream& out, const ChannelMatrix& channel);

// Derives an independent stream seed; used to key trials and draws.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

}  // namespace splitprec
