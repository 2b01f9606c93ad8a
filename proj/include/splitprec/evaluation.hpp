#pragma once

#include <cstdint>
#include <optional>

#include "splitprec/bbu.hpp"
#include "splitprec/common.hpp"

namespace splitprec {

// Returns P * sqrt(q / ||P||_F^2); throws DegenerateError for P = 0.
CMatrix power_scale(const CMatrix& P, double q);

/// sum_k log2(1 + |[HP]_kk|^2 / (sum_{i != k} |[HP]_ki|^2 + sigma0^2)) for a
/// single channel realization, H K x M and P M x K.
double sum_rate(const CMatrix& H, const CMatrix& P, double sigma0_sq);

// tr(I - BHP - P^H H^H B^H + BHPP^H H^H B^H) + sigma0^2 sum_k |beta_k|^2
double sum_mse(const CMatrix& H, const CMatrix& P, const ReceiverGains& gains, double sigma0_sq);

struct FronthaulBudget {
  int M = 0;
  int N = 0;
  int K = 0;
  int b_split = 0;
  int b_one_stage = 0;
  // When true the two architectures are declared to share one fronthaul
  // budget, which requires M / N = b_split / b_one_stage.
  bool equal_budget = false;

  std::int64_t split_bits() const { return 2LL * b_split * N * K; }
  std::int64_t one_stage_bits() const { return 2LL * b_one_stage * M * K; }
};

struct FronthaulReport {
  std::int64_t split_bits = 0;
  std::int64_t one_stage_bits = 0;
  bool ratio_identity = false;  // M * b_one_stage == N * b_split
};

// Throws ConfigError for non-positive entries or a violated equal-budget
// declaration.
FronthaulReport fronthaul_bits(const FronthaulBudget& budget);

// Split resolution that matches the one-stage load: M * b_one / N.
int equal_budget_split_bits(int M, int N, int b_one_stage);

// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace splitprec
