#include "splitprec/channel.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace splitprec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_dims(const SystemConfig& config) {
  if (config.M < 1 || config.K < 1) throw ConfigError("channel: M and K must be >= 1");
  if (!(config.gamma >= 0) || !std::isfinite(config.gamma)) {
    throw ConfigError("channel: gamma must be finite and non-negative");
  }
}

// Fills with CN(0, variance) draws.
void fill_cn(CMatrix& m, double variance, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = cplx(re, im);
    }
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(base) ^ stream) ^ index);
}

ChannelMatrix gen_rayleigh(const SystemConfig& config, std::uint64_t seed) {
  check_dims(config);
  std::mt19937_64 rng(seed);
  ChannelMatrix ch;
  ch.H.resize(config.K, config.M);
  fill_cn(ch.H, 1.0, rng);
  ch.H *= std::sqrt(config.gamma);
  return ch;
}

CVector ula_steering(int M, double spacing, double theta) {
  CVector a(M);
  const double phase = 2.0 * std::numbers::pi * spacing * std::sin(theta);
  for (int m = 0; m < M; ++m) a(m) = std::polar(1.0, phase * m);
  return a;
}

std::vector<CMatrix> gen_mmwave_taps(const SystemConfig& config, const MmWaveParams& params,
                                     std::uint64_t seed) {
  check_dims(config);
  params.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(params.aoa_min, params.aoa_max);

  const double kappa = params.kappa();
  const bool pure_los = std::isinf(kappa);
  const double los_amp = pure_los ? 1.0 : std::sqrt(kappa / (kappa + 1.0));
  const double diffuse_amp = pure_los ? 0.0 : std::sqrt(1.0 / (kappa + 1.0));

  std::vector<CMatrix> taps(params.num_taps, CMatrix::Zero(config.K, config.M));
  CMatrix draw(1, config.M);
  for (int k = 0; k < config.K; ++k) {
    const double theta = angle(rng);
    const CVector los = ula_steering(config.M, params.antenna_spacing, theta);
    for (int t = 0; t < params.num_taps; ++t) {
      fill_cn(draw, 1.0, rng);
      if (t == 0) {
        taps[t].row(k) = los_amp * los.transpose() + diffuse_amp * draw;
      } else {
        taps[t].row(k) = draw;
      }
    }
    double energy = 0.0;
    for (const auto& tap : taps) energy += tap.row(k).squaredNorm();
    const double scale = energy > 0 ? std::sqrt(config.gamma * config.M / energy) : 0.0;
    for (auto& tap : taps) tap.row(k) *= scale;
  }
  return taps;
}

std::vector<ChannelMatrix> gen_mmwave(const SystemConfig& config, const MmWaveParams& params,
                                      std::uint64_t seed) {
  const auto taps = gen_mmwave_taps(config, params, seed);
  const int F = params.num_subcarriers;
  std::vector<ChannelMatrix> out(F);
  for (int f = 0; f < F; ++f) {
    CMatrix H = CMatrix::Zero(config.K, config.M);
    for (int t = 0; t < static_cast<int>(taps.size()); ++t) {
      const double phase = -2.0 * std::numbers::pi * f * t / F;
      H += std::polar(1.0, phase) * taps[t];
    }
    out[f].H = std::move(H);
    out[f].subcarrier_index = f;
  }
  return out;
}

void write_channel_csv(std::ostream& out, const ChannelMatrix& channel) {
  const auto old_precision = out.precision(17);
  for (Eigen::Index i = 0; i < channel.H.rows(); ++i) {
    for (Eigen::Index j = 0; j < channel.H.cols(); ++j) {
      if (j) out << ',';
      out << channel.H(i, j).real() << ',' << channel.H(i, j).imag();
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace splitprec
