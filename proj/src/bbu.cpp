#include "splitprec/bbu.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

namespace splitprec {

double qrzf_regularizer(int K, double q, double sigma0_sq, double eta, int dim_for_mu) {
  const double one_minus = 1.0 - eta;
  return K / (one_minus * one_minus) * (sigma0_sq / q + eta * one_minus * dim_for_mu);
}

CMatrix qrzf_unnormalized(const CMatrix& H, double mu) {
  CMatrix gram = H * H.adjoint();
  gram.diagonal().array() += mu;
  Eigen::LDLT<CMatrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().real().minCoeff() <= 1e-14 * std::max(1.0, gram.diagonal().real().maxCoeff())) {
    throw DegenerateError("qrzf: H H^H + mu I is singular");
  }
  // P = H^H G^{-1}; G is Hermitian so P^H = G^{-1} H.
  const CMatrix sol = ldlt.solve(H);
  return sol.adjoint();
}

ContinuousPrecoder qrzf(const CMatrix& H, double q, double sigma0_sq, double eta, int dim_for_mu) {
  if (H.rows() > H.cols()) throw DimensionError("qrzf: requires D >= K");
  ContinuousPrecoder out;
  out.mu = qrzf_regularizer(static_cast<int>(H.rows()), q, sigma0_sq, eta, dim_for_mu);
  out.matrix = qrzf_unnormalized(H, out.mu);
  const double power = out.matrix.squaredNorm();
  if (!(power > 0)) throw DegenerateError("qrzf: zero precoder");
  out.matrix *= std::sqrt(q / power);
  return out;
}

ContinuousPrecoder rzf(const CMatrix& H, double q, double sigma0_sq) {
  return qrzf(H, q, sigma0_sq, 0.0, static_cast<int>(H.cols()));
}

ReceiverGains receiver_gains(const CMatrix& H_eff, const CMatrix& P, double sigma0_sq) {
  if (H_eff.cols() != P.rows() || H_eff.rows() != P.cols()) {
    throw DimensionError("receiver_gains: H_eff is K x N, P must be N x K");
  }
  const CMatrix HP = H_eff * P;
  ReceiverGains g;
  g.beta.resize(HP.rows());
  for (Eigen::Index k = 0; k < HP.rows(); ++k) {
    const double denom = HP.row(k).squaredNorm() + sigma0_sq;
    if (!(denom > 0)) {
      throw DegenerateError("receiver_gains: zero received power for UE " + std::to_string(k));
    }
    g.beta(k) = std::conj(HP(k, k)) / denom;
  }
  return g;
}

double bbu_objective(const CMatrix& weighted_channel, const CMatrix& P, double lambda) {
  const CMatrix& G = weighted_channel;
  if (G.cols() != P.rows() || G.rows() != P.cols()) {
    throw DimensionError("bbu_objective: dimension mismatch");
  }
  const CMatrix GP = G * P;
  // sum_i a_i^H (G^H G + lambda I) a_i - 2 Re(g_i^T a_i)
  return GP.squaredNorm() + lambda * P.squaredNorm() - 2.0 * GP.diagonal().real().sum();
}

std::uint64_t BbuPrecoder::total_nodes() const {
  return std::accumulate(node_counts.begin(), node_counts.end(), std::uint64_t{0});
}

ColumnSolve solve_columns(const IlsProblem& prob, const QuantizerSpec& spec,
                          const SesdOptions& sesd, Execution exec, const CMatrix* warm_start) {
  const int K = prob.num_columns();
  const int N = prob.dim / 2;
  const std::vector<double> levels = spec.level_set();

  ColumnSolve out;
  out.lambda = prob.lambda;
  out.P.resize(N, K);
  out.column_objectives.assign(K, 0.0);
  out.node_counts.assign(K, 0);
  std::vector<char> complete(K, 1);
  std::vector<std::exception_ptr> errors(K);

#pragma omp parallel for schedule(dynamic, 1) if (exec == Execution::parallel)
  for (int i = 0; i < K; ++i) {
    try {
      RVector hint;
      if (warm_start) hint = real_embed(CVector(warm_start->col(i)));
      const SesdResult r =
          solve_ils_column(prob, i, levels, sesd, warm_start ? &hint : nullptr);
      out.P.col(i) = complex_from_real(r.x);
      out.column_objectives[i] = r.objective;
      out.node_counts[i] = r.nodes;
      complete[i] = r.complete ? 1 : 0;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  out.exact = std::all_of(complete.begin(), complete.end(), [](char c) { return c != 0; });
  out.power = out.P.squaredNorm();
  return out;
}

ColumnSolve solve_at_lambda(const CMatrix& weighted_channel, double lambda,
                            const QuantizerSpec& spec, const BbuOptions& options,
                            const CMatrix* warm_start) {
  double lam = lambda;
  // Singular Gram matrices at lambda = 0 get the smallest floor that factorizes.
  for (int attempt = 0;; ++attempt) {
    try {
      const IlsProblem prob = build_ils(weighted_channel, lam, options.order);
      return solve_columns(prob, spec, options.sesd, options.exec, warm_start);
    } catch (const NotPositiveDefiniteError&) {
      if (attempt >= 40) throw;
      lam = (lam < options.lambda_floor) ? options.lambda_floor : lam * 10.0;
    }
  }
}

namespace {

void accumulate_solve(BbuPrecoder& out, const ColumnSolve& s) {
  ++out.ils_solves;
  if (out.node_counts.empty()) out.node_counts.assign(s.node_counts.size(), 0);
  for (std::size_t i = 0; i < s.node_counts.size(); ++i) out.node_counts[i] += s.node_counts[i];
  if (!s.exact) out.exact = false;
}

BbuPrecoder finish(BbuPrecoder out, const ColumnSolve& s, const CMatrix& G) {
  out.matrix = s.P;
  out.achieved_power = s.power;
  out.lambda_star = s.lambda;
  out.column_objectives = s.column_objectives;
  out.objective = bbu_objective(G, s.P, s.lambda);
  return out;
}

}  // namespace

BbuPrecoder bbu_precode_with_gains(const CMatrix& H_eff, const ReceiverGains& gains,
                                   const QuantizerSpec& spec, double q,
                                   const BbuOptions& options) {
  if (gains.beta.size() != H_eff.rows()) throw DimensionError("bbu: gains size must equal K");
  if (!(q > 0)) throw ConfigError("bbu: q must be positive");
  const CMatrix G = gains.diag() * H_eff;
  const Eigen::Index N = H_eff.cols();
  const Eigen::Index K = H_eff.rows();

  const double min_power = 2.0 * static_cast<double>(N * K) * spec.min_abs_level() *
                           spec.min_abs_level();
  if (min_power > q) {
    throw ConfigError("bbu: smallest-magnitude alphabet matrix has power " +
                      std::to_string(min_power) + " > q = " + std::to_string(q) +
                      "; reduce the quantizer step");
  }

  BbuPrecoder out;
  out.gains = gains;

  const double tau = std::max(G.squaredNorm() / static_cast<double>(N), options.lambda_floor);

  // Every 1-bit alphabet matrix has the same power, so the minimizer set does
  // not depend on lambda and the precheck above already guarantees the
  // budget. The solve runs at the multiplier that conditions the search best.
  if (spec.bits == 1) {
    ColumnSolve only = solve_at_lambda(G, options.one_bit_lambda_scale * tau, spec, options);
    accumulate_solve(out, only);
    return finish(std::move(out), only, G);
  }

  // Exact minimizers have power non-increasing in lambda, so one exact solve
  // above the budget at any lambda > 0 proves that lambda = 0 is infeasible
  // as well. The ladder walks down from the mean Gram eigenvalue and only
  // falls through to lambda = 0 when every rung is feasible.
  const bool zero_first = options.search == LambdaSearch::zero_first;
  double lo = 0.0;
  if (zero_first) {
    ColumnSolve zero = solve_at_lambda(G, 0.0, spec, options);
    accumulate_solve(out, zero);
    if (zero.power <= q) return finish(std::move(out), zero, G);
    lo = zero.lambda;
  }
  double hi = zero_first ? 1.0 : tau;
  ColumnSolve best = solve_at_lambda(G, hi, spec, options);
  accumulate_solve(out, best);
  bool bracketed = zero_first;
  if (best.power > q) {
    // Walk up until feasible.
    for (int doubling = 0; best.power > q; ++doubling) {
      if (doubling > 200) throw Error("bbu: power budget unreachable by increasing lambda");
      lo = hi;
      hi *= 2.0;
      best = solve_at_lambda(G, hi, spec, options, &best.P);
      accumulate_solve(out, best);
    }
    bracketed = true;
  } else if (!bracketed) {
    for (int rung = 0; rung < options.ladder_rungs; ++rung) {
      const double next = 0.5 * hi;
      ColumnSolve s = solve_at_lambda(G, next, spec, options, &best.P);
      accumulate_solve(out, s);
      if (s.power > q) {
        lo = next;
        bracketed = true;
        break;
      }
      hi = next;
      best = std::move(s);
    }
    if (!bracketed) {
      ColumnSolve zero = solve_at_lambda(G, 0.0, spec, options, &best.P);
      accumulate_solve(out, zero);
      if (zero.power <= q) return finish(std::move(out), zero, G);
      lo = zero.lambda;
    }
  }

  for (int step = 0; step < options.max_bisection_steps; ++step) {
    if (best.power >= (1.0 - options.power_tolerance) * q) break;
    const double mid = 0.5 * (lo + hi);
    ColumnSolve s = solve_at_lambda(G, mid, spec, options, &best.P);
    accumulate_solve(out, s);
    if (s.power <= q) {
      hi = mid;
      if (s.power > best.power) best = std::move(s);
    } else {
      lo = mid;
    }
  }
  return finish(std::move(out), best, G);
}

BbuPrecoder bbu_precode(const EffectiveChannel& H_eff, const QuantizerSpec& spec, double q,
                        double sigma0_sq, const BbuOptions& options) {
  const CMatrix& H = H_eff.matrix;
  const int dim = options.dim_for_mu > 0 ? options.dim_for_mu : static_cast<int>(H.cols());
  const ContinuousPrecoder init = qrzf(H, q, sigma0_sq, spec.eta, dim);
  const ReceiverGains gains = receiver_gains(H, init.matrix, sigma0_sq);
  return bbu_precode_with_gains(H, gains, spec, q, options);
}

BbuPrecoder one_stage_precode(const ChannelMatrix& channel, const QuantizerSpec& spec, double q,
                              double sigma0_sq, const OneStageOptions& options) {
  const int tree_bits = 2 * channel.num_antennas() * spec.bits;
  if (!options.allow_large && tree_bits > options.budget_bits) {
    throw BudgetError("instance too large for exact one-stage: 2*M*B = " +
                      std::to_string(tree_bits) + " search-tree bits exceeds the budget of " +
                      std::to_string(options.budget_bits) +
                      " (reduce M or B, or pass --allow-large)");
  }
  return bbu_precode(EffectiveChannel{channel.H}, spec, q, sigma0_sq, options.bbu);
}

CMatrix quantized_qrzf(const CMatrix& H_eff, const QuantizerSpec& spec, double q,
                       double sigma0_sq, int dim_for_mu) {
  const int dim = dim_for_mu > 0 ? dim_for_mu : static_cast<int>(H_eff.cols());
  return quantize_matrix(qrzf(H_eff, q, sigma0_sq, spec.eta, dim).matrix, spec);
}

}  // namespace splitprec
