#include "splitprec/evaluation.hpp"

#include <cmath>
#include <string>

namespace splitprec {

CMatrix power_scale(const CMatrix& P, double q) {
  const double power = P.squaredNorm();
  if (!(power > 0)) throw DegenerateError("power_scale: zero precoder");
  return P * std::sqrt(q / power);
}

double sum_rate(const CMatrix& H, const CMatrix& P, double sigma0_sq) {
  if (H.cols() != P.rows() || H.rows() != P.cols()) {
    throw DimensionError("sum_rate: H is K x M, P must be M x K");
  }
  if (sigma0_sq < 0) throw std::invalid_argument("sum_rate: negative noise variance");
  const CMatrix HP = H * P;
  double rate = 0.0;
  for (Eigen::Index k = 0; k < HP.rows(); ++k) {
    const double signal = std::norm(HP(k, k));
    const double interference = HP.row(k).squaredNorm() - signal;
    const double denom = std::max(interference, 0.0) + sigma0_sq;
    if (!(denom > 0)) {
      if (signal == 0) continue;
      throw std::domain_error("sum_rate: infinite SINR (no noise and no interference) for UE " +
                              std::to_string(k));
    }
    rate += std::log2(1.0 + signal / denom);
  }
  return rate;
}

double sum_mse(const CMatrix& H, const CMatrix& P, const ReceiverGains& gains, double sigma0_sq) {
  if (H.cols() != P.rows() || H.rows() != P.cols() || gains.beta.size() != H.rows()) {
    throw DimensionError("sum_mse: dimension mismatch");
  }
  const CMatrix BHP = gains.diag() * (H * P);
  const Eigen::Index K = H.rows();
  const CMatrix inner = CMatrix::Identity(K, K) - BHP - BHP.adjoint() + BHP * BHP.adjoint();
  return inner.trace().real() + sigma0_sq * gains.beta.squaredNorm();
}

FronthaulReport fronthaul_bits(const FronthaulBudget& b) {
  if (b.M < 1 || b.N < 1 || b.K < 1 || b.b_split < 1 || b.b_one_stage < 1) {
    throw ConfigError("fronthaul_bits: all dimensions and bit counts must be positive");
  }
  FronthaulReport r;
  r.split_bits = b.split_bits();
  r.one_stage_bits = b.one_stage_bits();
  r.ratio_identity =
      static_cast<std::int64_t>(b.M) * b.b_one_stage == static_cast<std::int64_t>(b.N) * b.b_split;
  if (b.equal_budget && !r.ratio_identity) {
    throw ConfigError("fronthaul_bits: equal budget declared but M/N = " + std::to_string(b.M) +
                      "/" + std::to_string(b.N) + " != B_split/B_one = " +
                      std::to_string(b.b_split) + "/" + std::to_string(b.b_one_stage));
  }
  return r;
}

int equal_budget_split_bits(int M, int N, int b_one_stage) {
  if (M < 1 || N < 1 || b_one_stage < 1) throw ConfigError("equal_budget_split_bits: bad input");
  if ((static_cast<long long>(M) * b_one_stage) % N != 0) {
    throw ConfigError("equal_budget_split_bits: M * B_one is not a multiple of N");
  }
  return static_cast<int>(static_cast<long long>(M) * b_one_stage / N);
}

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

}  // namespace splitprec
