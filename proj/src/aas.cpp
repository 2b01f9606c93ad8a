#include "splitprec/aas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace splitprec {

namespace {

constexpr double kPivotTolerance = 1e-12;

void check_rank_request(const ChannelMatrix& channel, int N, const char* who) {
  if (N < 1) throw DimensionError(std::string(who) + ": N must be >= 1");
  if (N > channel.num_ues()) {
    throw DimensionError(std::string(who) + ": N must not exceed K (use dft for N > K)");
  }
  if (N > channel.num_antennas()) throw DimensionError(std::string(who) + ": N must not exceed M");
}

}  // namespace

std::string to_string(AasMethod method) {
  switch (method) {
    case AasMethod::gs_mrt: return "gs_mrt";
    case AasMethod::mrt: return "mrt";
    case AasMethod::dft: return "dft";
  }
  return "?";
}

AasMethod parse_aas_method(std::string_view name) {
  if (name == "gs_mrt") return AasMethod::gs_mrt;
  if (name == "mrt") return AasMethod::mrt;
  if (name == "dft") return AasMethod::dft;
  throw ConfigError("unknown aas_method '" + std::string(name) + "' (expected gs_mrt, mrt, dft)");
}

AasPrecoder gs_mrt(const ChannelMatrix& channel, int N) {
  check_rank_request(channel, N, "gs_mrt");
  const CMatrix& H = channel.H;
  AasPrecoder out;
  out.method = AasMethod::gs_mrt;
  out.matrix.resize(H.cols(), N);
  for (int i = 0; i < N; ++i) {
    CVector v = H.row(i).conjugate().transpose();
    // MGS, then a second pass to restore orthogonality lost to rounding.
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < i; ++j) {
        const cplx proj = out.matrix.col(j).dot(v);  // p_j^H v
        v -= proj * out.matrix.col(j);
      }
    }
    const double norm = v.norm();
    if (norm < kPivotTolerance) {
      throw DegenerateError("gs_mrt: MRT directions are linearly dependent at column " +
                            std::to_string(i));
    }
    out.matrix.col(i) = v / norm;
  }
  out.objective_value = (H * out.matrix).squaredNorm();
  return out;
}

AasPrecoder mrt(const ChannelMatrix& channel, int N) {
  check_rank_request(channel, N, "mrt");
  const CMatrix& H = channel.H;
  AasPrecoder out;
  out.method = AasMethod::mrt;
  out.matrix.resize(H.cols(), N);
  for (int i = 0; i < N; ++i) {
    const double norm = H.row(i).norm();
    if (!(norm > 0)) throw DegenerateError("mrt: zero channel row " + std::to_string(i));
    out.matrix.col(i) = H.row(i).conjugate().transpose() / norm;
  }
  out.objective_value = (H * out.matrix).squaredNorm();
  return out;
}

CMatrix dft_matrix(int M) {
  CMatrix F(M, M);
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < M; ++n) {
      // Reduce the exponent mod M to keep the phase argument small.
      const long long idx = (static_cast<long long>(m) * n) % M;
      F(m, n) = std::polar(scale, -2.0 * std::numbers::pi * static_cast<double>(idx) / M);
    }
  }
  return F;
}

AasPrecoder dft_select(const ChannelMatrix& channel, int N) {
  const int M = channel.num_antennas();
  if (N < 1 || N > M) throw DimensionError("dft_select: require 1 <= N <= M");
  const CMatrix F = dft_matrix(M);
  const CMatrix beamspace = channel.H * F;
  std::vector<double> energy(M);
  for (int m = 0; m < M; ++m) energy[m] = beamspace.col(m).squaredNorm();

  std::vector<int> order(M);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&energy](int a, int b) { return energy[a] > energy[b]; });
  std::vector<int> chosen(order.begin(), order.begin() + N);
  std::sort(chosen.begin(), chosen.end());

  AasPrecoder out;
  out.method = AasMethod::dft;
  out.matrix.resize(M, N);
  for (int i = 0; i < N; ++i) out.matrix.col(i) = F.col(chosen[i]);
  out.selected_beams = std::move(chosen);
  out.objective_value = (channel.H * out.matrix).squaredNorm();
  return out;
}

AasPrecoder select_subspace(AasMethod method, const ChannelMatrix& channel, int N) {
  switch (method) {
    case AasMethod::gs_mrt: return gs_mrt(channel, N);
    case AasMethod::mrt: return mrt(channel, N);
    case AasMethod::dft: return dft_select(channel, N);
  }
  throw ConfigError("select_subspace: unknown method");
}

EffectiveChannel effective_channel(const ChannelMatrix& channel, const AasPrecoder& aas) {
  if (channel.H.cols() != aas.matrix.rows()) {
    throw DimensionError("effective_channel: H has " + std::to_string(channel.H.cols()) +
                         " columns but P_A has " + std::to_string(aas.matrix.rows()) + " rows");
  }
  return {channel.H * aas.matrix};
}

}  // namespace splitprec
