#include "splitprec/ils.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace splitprec {

RVector real_embed(const CVector& v) {
  const Eigen::Index n = v.size();
  RVector x(2 * n);
  x.head(n) = v.real();
  x.tail(n) = v.imag();
  return x;
}

RMatrix real_embed(const CMatrix& V) {
  const Eigen::Index n = V.rows();
  const Eigen::Index m = V.cols();
  RMatrix out(2 * n, 2 * m);
  out.topLeftCorner(n, m) = V.real();
  out.topRightCorner(n, m) = -V.imag();
  out.bottomLeftCorner(n, m) = V.imag();
  out.bottomRightCorner(n, m) = V.real();
  return out;
}

CVector complex_from_real(const RVector& x) {
  const Eigen::Index n = x.size() / 2;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(x(i), x(n + i));
  return v;
}

IlsProblem build_ils(const CMatrix& weighted_channel, double lambda, SearchOrder order) {
  if (!(lambda >= 0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("build_ils: lambda must be finite and non-negative");
  }
  const CMatrix& G = weighted_channel;
  const Eigen::Index N = G.cols();
  CMatrix V = G.adjoint() * G;
  V.diagonal().array() += lambda;

  IlsProblem prob;
  prob.dim = static_cast<int>(2 * N);
  prob.lambda = lambda;
  prob.gram = real_embed(V);
  // Symmetrize away rounding in the imaginary blocks before factorizing.
  prob.gram = 0.5 * (prob.gram + prob.gram.transpose()).eval();

  Eigen::LLT<RMatrix> llt(prob.gram);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("build_ils: Gram matrix not positive definite at lambda = " +
                                   std::to_string(lambda));
  }
  prob.R = llt.matrixU();
  const RVector diag = prob.R.diagonal();
  if ((diag.array() <= 0).any() || !diag.allFinite()) {
    throw NotPositiveDefiniteError("build_ils: degenerate Cholesky factor");
  }

  prob.linear.reserve(G.rows());
  prob.targets.reserve(G.rows());
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    const CVector g_conj = G.row(i).adjoint();
    RVector c = real_embed(g_conj);
    // R^T e = c, i.e. e = R^{-T} c.
    RVector e = prob.R.transpose().triangularView<Eigen::Lower>().solve(c);
    prob.linear.push_back(std::move(c));
    prob.targets.push_back(std::move(e));
  }

  const int n = prob.dim;
  if (order == SearchOrder::natural) {
    prob.search_order.resize(n);
    std::iota(prob.search_order.begin(), prob.search_order.end(), 0);
    prob.search_R = prob.R;
    prob.search_targets = prob.targets;
    return prob;
  }
  prob.search_order = sorted_search_order(prob.gram);
  RMatrix permuted(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) permuted(a, b) = prob.gram(prob.search_order[a], prob.search_order[b]);
  }
  Eigen::LLT<RMatrix> sorted_llt(permuted);
  if (sorted_llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("build_ils: permuted Gram matrix not positive definite");
  }
  prob.search_R = sorted_llt.matrixU();
  if (!(prob.search_R.diagonal().array() > 0).all()) {
    throw NotPositiveDefiniteError("build_ils: degenerate permuted Cholesky factor");
  }
  prob.search_targets.reserve(prob.linear.size());
  for (const auto& c : prob.linear) {
    RVector cp(n);
    for (int a = 0; a < n; ++a) cp(a) = c(prob.search_order[a]);
    prob.search_targets.push_back(prob.search_R.transpose().triangularView<Eigen::Lower>().solve(cp));
  }
  return prob;
}

std::vector<int> sorted_search_order(const RMatrix& gram) {
  const int n = static_cast<int>(gram.rows());
  Eigen::LLT<RMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("sorted_search_order: matrix not positive definite");
  }
  // W = V^{-1}; dropping coordinate j from the active set downdates the
  // inverse of the active block by W(:,j) W(j,:) / W(j,j).
  RMatrix W = llt.solve(RMatrix::Identity(n, n));
  std::vector<int> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<int> order(n);
  for (int pos = n - 1; pos >= 0; --pos) {
    std::size_t pick = 0;
    for (std::size_t r = 1; r < remaining.size(); ++r) {
      if (W(remaining[r], remaining[r]) < W(remaining[pick], remaining[pick])) pick = r;
    }
    const int j = remaining[pick];
    order[pos] = j;
    const RVector wj = W.col(j);
    W.noalias() -= wj * wj.transpose() / wj(j);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return order;
}

SesdResult solve_ils_column(const IlsProblem& prob, int column, std::span<const double> levels,
                            const SesdOptions& options, const RVector* warm_start) {
  const int n = prob.dim;
  std::vector<RVector> hint;
  if (warm_start) {
    RVector w(n);
    for (int a = 0; a < n; ++a) w(a) = (*warm_start)(prob.search_order[a]);
    hint.push_back(std::move(w));
  }
  SesdResult r = sesd_solve(prob.search_R, prob.search_targets[column], levels, options, hint);
  RVector x(n);
  std::vector<int> idx(n);
  for (int a = 0; a < n; ++a) {
    x(prob.search_order[a]) = r.x(a);
    idx[prob.search_order[a]] = r.indices[a];
  }
  r.x = std::move(x);
  r.indices = std::move(idx);
  r.objective = (prob.targets[column] - prob.R * r.x).squaredNorm();
  return r;
}

double ils_quadratic_objective(const IlsProblem& prob, int column, const RVector& x) {
  return x.dot(prob.gram * x) - 2.0 * prob.linear[column].dot(x);
}

namespace {

int nearest_level(std::span<const double> levels, double c) {
  const auto it = std::lower_bound(levels.begin(), levels.end(), c);
  if (it == levels.begin()) return 0;
  if (it == levels.end()) return static_cast<int>(levels.size()) - 1;
  const int hi = static_cast<int>(it - levels.begin());
  return (c - levels[hi - 1] <= levels[hi] - c) ? hi - 1 : hi;
}

void check_inputs(const RMatrix& R, const RVector& e, std::span<const double> levels) {
  if (levels.empty()) throw std::invalid_argument("sesd: empty alphabet");
  if (!std::is_sorted(levels.begin(), levels.end())) {
    throw std::invalid_argument("sesd: levels must be ascending");
  }
  if (R.rows() != R.cols() || R.rows() != e.size()) {
    throw DimensionError("sesd: R must be square and match e");
  }
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    if (!(R(i, i) > 0)) throw std::invalid_argument("sesd: R needs a positive diagonal");
  }
}

// Per-layer Schnorr-Euchner enumeration state.
struct Layer {
  double center = 0.0;
  double base = 0.0;  // partial distance accumulated above this layer
  int lo = 0;         // visited index window [lo, hi]
  int hi = -1;
};

}  // namespace

RVector babai_point(const RMatrix& R, const RVector& e, std::span<const double> levels) {
  check_inputs(R, e, levels);
  const int n = static_cast<int>(R.rows());
  RVector x(n);
  for (int k = n - 1; k >= 0; --k) {
    double s = e(k);
    for (int j = k + 1; j < n; ++j) s -= R(k, j) * x(j);
    x(k) = levels[nearest_level(levels, s / R(k, k))];
  }
  return x;
}

SesdResult sesd_solve(const RMatrix& R, const RVector& e, std::span<const double> levels,
                      const SesdOptions& options, std::span<const RVector> warm_starts) {
  check_inputs(R, e, levels);
  const int n = static_cast<int>(R.rows());
  const int L = static_cast<int>(levels.size());

  SesdResult res;
  res.x = babai_point(R, e, levels);
  double best = (e - R * res.x).squaredNorm();
  for (const auto& w : warm_starts) {
    if (w.size() != n) continue;
    const double d = (e - R * w).squaredNorm();
    if (d < best) {
      best = d;
      res.x = w;
    }
  }
  if (n == 0) {
    res.objective = best;
    return res;
  }

  std::vector<Layer> layers(n);
  std::vector<int> idx(n, 0);
  RVector x = RVector::Zero(n);
  // Row-major copy so the per-layer center is a contiguous dot product.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Rr = R;

  auto enter = [&](int k, double base) {
    const int tail = n - k - 1;
    const double s = e(k) - Rr.row(k).tail(tail).dot(x.tail(tail));
    Layer& layer = layers[k];
    layer.center = s / Rr(k, k);
    layer.base = base;
    layer.lo = 0;
    layer.hi = -1;
  };
  // Next child in order of increasing distance to the center; -1 when exhausted.
  auto next_child = [&](int k) -> int {
    Layer& layer = layers[k];
    if (layer.hi < layer.lo) {
      const int c = nearest_level(levels, layer.center);
      layer.lo = layer.hi = c;
      return c;
    }
    const bool has_down = layer.lo > 0;
    const bool has_up = layer.hi < L - 1;
    if (!has_down && !has_up) return -1;
    if (has_down && has_up) {
      const double dd = layer.center - levels[layer.lo - 1];
      const double du = levels[layer.hi + 1] - layer.center;
      if (dd <= du) return --layer.lo;
      return ++layer.hi;
    }
    return has_down ? --layer.lo : ++layer.hi;
  };

  int k = n - 1;
  enter(k, 0.0);
  while (true) {
    if (options.max_nodes != 0 && res.nodes >= options.max_nodes) {
      res.complete = false;
      break;
    }
    const int child = next_child(k);
    if (child < 0) {
      if (++k == n) break;
      continue;
    }
    ++res.nodes;
    const double r = Rr(k, k) * (layers[k].center - levels[child]);
    const double d = layers[k].base + r * r;
    if (d >= best) {
      // Children come in increasing order of cost; the rest of this layer
      // cannot do better.
      if (++k == n) break;
      continue;
    }
    x(k) = levels[child];
    idx[k] = child;
    if (k == 0) {
      best = d;
      res.x = x;
      if (++k == n) break;
      continue;
    }
    --k;
    enter(k, d);
  }

  res.indices.resize(n);
  for (int i = 0; i < n; ++i) res.indices[i] = nearest_level(levels, res.x(i));
  res.objective = (e - R * res.x).squaredNorm();
  return res;
}

}  // namespace splitprec
