#pragma once

#include <cstdint>
#include <vector>

#include "splitprec/aas.hpp"
#include "splitprec/channel.hpp"
#include "splitprec/common.hpp"
#include "splitprec/ils.hpp"
#include "splitprec/quantizer.hpp"

namespace splitprec {

struct ReceiverGains {
  CVector beta;

  CMatrix diag() const { return beta.asDiagonal(); }
};

struct ContinuousPrecoder {
  CMatrix matrix;
  double mu = 0.0;
};

// mu = K/(1-eta)^2 * (sigma0^2/q + eta(1-eta) * dim_for_mu)
double qrzf_regularizer(int K, double q, double sigma0_sq, double eta, int dim_for_mu);

// H^H (H H^H + mu I)^{-1} without power normalization.
CMatrix qrzf_unnormalized(const CMatrix& H, double mu);

/// Quantization-aware RZF on any K x D channel, scaled to ||P||_F^2 = q.
ContinuousPrecoder qrzf(const CMatrix& H, double q, double sigma0_sq, double eta, int dim_for_mu);

// Classical RZF (eta = 0), the infinite-resolution one-stage reference.
ContinuousPrecoder rzf(const CMatrix& H, double q, double sigma0_sq);

/// Per-UE MMSE receiver gains for the precoded link H P:
///   beta_k = conj([HP]_kk) / (sum_i |[HP]_ki|^2 + sigma0^2).
ReceiverGains receiver_gains(const CMatrix& H_eff, const CMatrix& P, double sigma0_sq);

// Sum over columns of a_i^H V a_i - 2 Re(g_i^T a_i), V = G^H G + lambda I,
// G = B H_eff (the per-column program minimized by the BBU stage).
double bbu_objective(const CMatrix& weighted_channel, const CMatrix& P, double lambda);

struct ColumnSolve {
  CMatrix P;
  double power = 0.0;
  double lambda = 0.0;
  std::vector<double> column_objectives;  // ||e_i - R x_i||^2
  std::vector<std::uint64_t> node_counts;
  bool exact = true;
};

/// Solves all K column problems of one IlsProblem. Columns are independent;
/// the parallel path distributes them with OpenMP and produces results
/// identical to the serial path.
ColumnSolve solve_columns(const IlsProblem& prob, const QuantizerSpec& spec,
                          const SesdOptions& sesd = {}, Execution exec = Execution::parallel,
                          const CMatrix* warm_start = nullptr);

enum class LambdaSearch {
  // Downward halving ladder from the mean Gram eigenvalue; lambda = 0 is
  // solved only when no rung exceeds the budget.
  ladder,
  // Solve at lambda = 0 first, then double from 1 until feasible.
  zero_first,
};

struct BbuOptions {
  // Dimension used in the QRZF regularizer; <= 0 means the precoder's own
  // row dimension (N for the split design, M for one-stage).
  int dim_for_mu = 0;
  double power_tolerance = 1e-2;
  int max_bisection_steps = 50;
  LambdaSearch search = LambdaSearch::ladder;
  // Halvings of the starting multiplier tried before the lambda = 0 solve.
  int ladder_rungs = 6;
  double lambda_floor = 1e-12;
  // 1-bit solves run at this multiple of the mean Gram eigenvalue.
  double one_bit_lambda_scale = 0.3;
  SesdOptions sesd;
  SearchOrder order = SearchOrder::sorted;
  Execution exec = Execution::parallel;
};

struct BbuPrecoder {
  CMatrix matrix;  // entries in the quantizer alphabet
  double achieved_power = 0.0;
  double lambda_star = 0.0;
  double objective = 0.0;  // bbu_objective at lambda_star
  ReceiverGains gains;
  std::vector<double> column_objectives;
  std::vector<std::uint64_t> node_counts;  // per column, summed over all solves
  int ils_solves = 0;
  bool exact = true;  // every SESD call finished without hitting max_nodes

  std::uint64_t total_nodes() const;
};

/// Quantized BBU precoder: gains fixed from the power-normalized QRZF on
/// H_eff, per-column SESD for a given multiplier, bisection on the multiplier
/// until the power budget is met with near equality. The unconstrained
/// (lambda = 0) minimizer is returned whenever it satisfies the budget.
BbuPrecoder bbu_precode(const EffectiveChannel& H_eff, const QuantizerSpec& spec, double q,
                        double sigma0_sq, const BbuOptions& options = {});

// Same search with externally fixed receiver gains.
BbuPrecoder bbu_precode_with_gains(const CMatrix& H_eff, const ReceiverGains& gains,
                                   const QuantizerSpec& spec, double q,
                                   const BbuOptions& options = {});

// Column solve at one fixed multiplier (lambda = 0 falls back to the floor
// ladder when the Gram matrix is singular).
ColumnSolve solve_at_lambda(const CMatrix& weighted_channel, double lambda,
                            const QuantizerSpec& spec, const BbuOptions& options = {},
                            const CMatrix* warm_start = nullptr);

struct OneStageOptions {
  BbuOptions bbu;
  // Exact search is refused when 2 * M * bits exceeds this many tree bits.
  int budget_bits = 48;
  bool allow_large = false;
};

/// Conventional one-stage quantization-aware precoder: the BBU machinery
/// applied directly to the full K x M channel.
BbuPrecoder one_stage_precode(const ChannelMatrix& channel, const QuantizerSpec& spec, double q,
                              double sigma0_sq, const OneStageOptions& options = {});

// Entrywise-quantized power-normalized QRZF (rounding baseline).
CMatrix quantized_qrzf(const CMatrix& H_eff, const QuantizerSpec& spec, double q,
                       double sigma0_sq, int dim_for_mu = 0);

}  // namespace splitprec
