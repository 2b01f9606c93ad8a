#include "splitprec/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace splitprec {

namespace {

constexpr int kMaxBits = 16;
constexpr int kGridPoints = 1024;

void check_spec(double delta, int bits) {
  if (!(delta > 0) || !std::isfinite(delta)) {
    throw ConfigError("quantizer: step size must be positive and finite");
  }
  if (bits < 1 || bits > kMaxBits) {
    throw ConfigError("quantizer: bits must be in [1, " + std::to_string(kMaxBits) + "]");
  }
}

}  // namespace

std::vector<double> QuantizerSpec::level_set() const {
  std::vector<double> out(levels());
  for (int l = 0; l < levels(); ++l) out[l] = level(l);
  return out;
}

std::vector<cplx> QuantizerSpec::alphabet() const {
  const auto ls = level_set();
  std::vector<cplx> out;
  out.reserve(ls.size() * ls.size());
  for (double re : ls) {
    for (double im : ls) out.emplace_back(re, im);
  }
  return out;
}

bool QuantizerSpec::contains(double x) const {
  if (!std::isfinite(x)) return false;
  return level(midrise_index(x, delta, levels())) == x;
}

QuantizerSpec make_quantizer(double delta, int bits, std::optional<double> eta) {
  check_spec(delta, bits);
  QuantizerSpec spec;
  spec.delta = delta;
  spec.bits = bits;
  spec.eta = eta ? *eta : distortion_factor(bits);
  if (!(spec.eta >= 0 && spec.eta < 1)) throw ConfigError("quantizer: eta must lie in [0, 1)");
  return spec;
}

int midrise_index(double x, double delta, int levels) {
  if (!std::isfinite(x)) throw std::invalid_argument("quantizer: non-finite input");
  const double raw = std::floor(x / delta + levels / 2.0);
  return static_cast<int>(std::clamp(raw, 0.0, static_cast<double>(levels - 1)));
}

double midrise_quantize(double x, const QuantizerSpec& spec) {
  return spec.level(midrise_index(x, spec.delta, spec.levels()));
}

cplx quantize_complex(cplx z, const QuantizerSpec& spec) {
  return {midrise_quantize(z.real(), spec), midrise_quantize(z.imag(), spec)};
}

CMatrix quantize_matrix(const CMatrix& m, const QuantizerSpec& spec) {
  return m.unaryExpr([&spec](const cplx& z) { return quantize_complex(z, spec); });
}

double sample_distortion(std::span<const double> samples, double delta, int levels) {
  double acc = 0.0;
  for (double x : samples) {
    const double l = delta * (midrise_index(x, delta, levels) - (levels - 1) / 2.0);
    acc += (x - l) * (x - l);
  }
  return acc / static_cast<double>(samples.size());
}

std::vector<double> calibration_grid(std::span<const double> samples, int bits) {
  if (samples.empty()) throw DegenerateError("calibrate: no samples");
  check_spec(1.0, bits);
  double sq = 0.0;
  for (double x : samples) {
    if (!std::isfinite(x)) throw std::invalid_argument("calibrate: non-finite sample");
    sq += x * x;
  }
  const double rms = std::sqrt(sq / static_cast<double>(samples.size()));
  if (!(rms > 0)) throw DegenerateError("calibrate: all samples are zero");
  const double upper = 8.0 * rms / static_cast<double>(1 << bits);
  std::vector<double> grid(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) grid[i] = upper * (i + 1) / kGridPoints;
  return grid;
}

DistortionScan scan_step_sizes(std::span<const double> samples, int bits, Execution exec) {
  DistortionScan scan;
  scan.candidates = calibration_grid(samples, bits);
  const int L = 1 << bits;
  const int n_cand = static_cast<int>(scan.candidates.size());
  scan.distortion.assign(n_cand, 0.0);

  if (exec == Execution::serial) {
    for (int c = 0; c < n_cand; ++c) {
      scan.distortion[c] = sample_distortion(samples, scan.candidates[c], L);
    }
  } else {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      s1[i + 1] = s1[i] + sorted[i];
      s2[i + 1] = s2[i] + sorted[i] * sorted[i];
    }
#pragma omp parallel for schedule(static)
    for (int c = 0; c < n_cand; ++c) {
      const double delta = scan.candidates[c];
      double acc = 0.0;
      std::size_t lo = 0;
      for (int b = 0; b < L; ++b) {
        // Bin b holds x with floor(x/delta + L/2) == b (clamped at the ends).
        std::size_t hi = n;
        if (b < L - 1) {
          const double edge = delta * (b + 1 - L / 2.0);
          hi = static_cast<std::size_t>(
              std::lower_bound(sorted.begin() + lo, sorted.end(), edge) - sorted.begin());
        }
        if (hi > lo) {
          const double l = delta * (b - (L - 1) / 2.0);
          const double cnt = static_cast<double>(hi - lo);
          acc += (s2[hi] - s2[lo]) - 2.0 * l * (s1[hi] - s1[lo]) + cnt * l * l;
        }
        lo = hi;
      }
      scan.distortion[c] = std::max(acc, 0.0) / static_cast<double>(n);
    }
  }
  scan.best = static_cast<std::size_t>(
      std::min_element(scan.distortion.begin(), scan.distortion.end()) - scan.distortion.begin());
  return scan;
}

QuantizerSpec calibrate_step(std::span<const double> samples, int bits, Execution exec) {
  const auto scan = scan_step_sizes(samples, bits, exec);
  return make_quantizer(scan.candidates[scan.best], bits,
                        bits <= 8 ? std::optional<double>{} : std::optional<double>{0.0});
}

double distortion_factor(int bits) {
  static constexpr double table[] = {0.3634, 0.1175, 0.03454, 0.009497, 0.002499};
  if (bits >= 1 && bits <= 5) return table[bits - 1];
  if (bits >= 6 && bits <= 8) {
    return std::numbers::pi * std::sqrt(3.0) / 2.0 * std::pow(2.0, -2.0 * bits);
  }
  throw ConfigError("distortion_factor: unsupported bit count " + std::to_string(bits) +
                    " (supported: 1..8)");
}

}  // namespace splitprec
