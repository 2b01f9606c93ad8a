#pragma once

#include <optional>
#include <span>
#include <vector>

#include "splitprec/common.hpp"

namespace splitprec {

/// Symmetric mid-rise uniform quantizer with L = 2^bits levels
/// Delta * (l - (L-1)/2), l = 0..L-1, applied separately to the real and
/// imaginary parts. Immutable once calibrated.
struct QuantizerSpec {
  double delta = 1.0;
  int bits = 1;
  double eta = 0.0;  // additive-noise distortion factor for this resolution

  int levels() const { return 1 << bits; }
  double level(int index) const { return delta * (index - (levels() - 1) / 2.0); }
  std::vector<double> level_set() const;
  // L^2 points, real part major.
  std::vector<cplx> alphabet() const;
  // Exact membership in the level set.
  bool contains(double x) const;
  bool contains(cplx z) const { return contains(z.real()) && contains(z.imag()); }
  // Smallest level magnitude, Delta / 2.
  double min_abs_level() const { return delta / 2.0; }
};

// Validates delta and bits; eta defaults to distortion_factor(bits).
QuantizerSpec make_quantizer(double delta, int bits, std::optional<double> eta = std::nullopt);

// o(x): the clamped level index.
int midrise_index(double x, double delta, int levels);
double midrise_quantize(double x, const QuantizerSpec& spec);
cplx quantize_complex(cplx z, const QuantizerSpec& spec);
CMatrix quantize_matrix(const CMatrix& m, const QuantizerSpec& spec);

// Mean squared quantization error of the samples at a given step size.
double sample_distortion(std::span<const double> samples, double delta, int levels);

/// Step-size grid used by the offline calibration: 1024 points evenly spaced
/// on (0, 8*sigma/L], sigma being the root-mean-square sample value.
std::vector<double> calibration_grid(std::span<const double> samples, int bits);

struct DistortionScan {
  std::vector<double> candidates;
  std::vector<double> distortion;
  std::size_t best = 0;
};

// Serial evaluates every candidate with a direct pass over the samples (the
// reference); parallel sorts once and evaluates each candidate from prefix
// sums in O(L log n), with OpenMP across candidates.
DistortionScan scan_step_sizes(std::span<const double> samples, int bits,
                               Execution exec = Execution::parallel);

// Offline data-driven step calibration. Throws DegenerateError when all
// samples are zero.
QuantizerSpec calibrate_step(std::span<const double> samples, int bits,
                             Execution exec = Execution::parallel);

/// Additive quantization noise distortion factor for a Gaussian input:
/// tabulated for B <= 5 and (pi*sqrt(3)/2) * 2^(-2B) for B = 6..8.
double distortion_factor(int bits);

}  // namespace splitprec
