#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "splitprec/common.hpp"

namespace splitprec {

// Real embedding of complex quantities: a -> [Re a; Im a] and
// V -> [Re V, -Im V; Im V, Re V], so that a^H V a = x^T V_r x.
RVector real_embed(const CVector& v);
RMatrix real_embed(const CMatrix& V);
CVector complex_from_real(const RVector& x);

/// Per-column integer least-squares problems
///   min_x ||e_i - R x||^2,  x in levels^(2N),
/// obtained from  a^H V a - 2 Re(g_i^T a)  with V = G^H G + lambda I,
/// G = B H_eff, g_i the i-th row of G, and V_r = R^T R.
struct IlsProblem {
  int dim = 0;                  // 2N
  double lambda = 0.0;
  RMatrix gram;                 // V_r
  RMatrix R;                    // upper triangular, positive diagonal
  std::vector<RVector> linear;  // c_i = embed(conj(g_i)); R^T e_i = c_i
  std::vector<RVector> targets; // e_i

  // Search layout: coordinates permuted so that the strongest layers are
  // enumerated first. search_R is the Cholesky factor of the permuted V_r
  // and search_targets the matching e_i. Column k of the permuted problem
  // is original coordinate search_order[k].
  std::vector<int> search_order;
  RMatrix search_R;
  std::vector<RVector> search_targets;

  int num_columns() const { return static_cast<int>(targets.size()); }
};

enum class SearchOrder {
  natural,  // enumerate coordinates 2N-1, ..., 0 as given
  sorted,   // greedy ordering by largest last-layer pivot (V-BLAST style)
};

// Throws NotPositiveDefiniteError when the Cholesky factorization fails.
IlsProblem build_ils(const CMatrix& weighted_channel, double lambda,
                     SearchOrder order = SearchOrder::sorted);

// Greedy order over a symmetric positive-definite matrix: the last position
// gets the coordinate with the smallest diagonal entry of the inverse,
// repeated on the remaining coordinates.
std::vector<int> sorted_search_order(const RMatrix& gram);

// Embedded objective x^T V_r x - 2 c_i^T x of column i; equals
// ||e_i - R x||^2 - ||e_i||^2.
double ils_quadratic_objective(const IlsProblem& prob, int column, const RVector& x);

struct SesdOptions {
  // Visited-node cap; 0 means unlimited (exact search).
  std::uint64_t max_nodes = 0;
};

struct SesdResult {
  RVector x;
  std::vector<int> indices;  // level index per coordinate
  double objective = 0.0;    // ||e - R x||^2
  std::uint64_t nodes = 0;
  bool complete = true;      // false if max_nodes stopped the search early
};

/// Schnorr-Euchner sphere decoder over a finite, ascending level set.
/// Depth-first from the last coordinate, children visited in order of
/// increasing distance to the per-layer center, branches pruned against the
/// incumbent. The Babai point seeds the incumbent; a warm start replaces it
/// only if strictly better. Equal-cost leaves never displace the incumbent.
SesdResult sesd_solve(const RMatrix& R, const RVector& e, std::span<const double> levels,
                      const SesdOptions& options = {},
                      std::span<const RVector> warm_starts = {});

// Solves column i of the problem in its search layout and returns the
// result in original coordinates; the objective is ||e_i - R x||^2.
SesdResult solve_ils_column(const IlsProblem& prob, int column, std::span<const double> levels,
                            const SesdOptions& options = {}, const RVector* warm_start = nullptr);

// Successive-rounding point (first Schnorr-Euchner descent).
RVector babai_point(const RMatrix& R, const RVector& e, std::span<const double> levels);

}  // namespace splitprec
