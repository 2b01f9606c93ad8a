#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "splitprec/channel.hpp"
#include "splitprec/common.hpp"

namespace splitprec {

enum class AasMethod { gs_mrt, mrt, dft };

std::string to_string(AasMethod method);
AasMethod parse_aas_method(std::string_view name);

/// First-stage M x N precoder applied at the antenna system.
struct AasPrecoder {
  CMatrix matrix;
  AasMethod method = AasMethod::gs_mrt;
  double objective_value = 0.0;      // ||H P_A||_F^2
  std::vector<int> selected_beams;  // DFT column indices (dft only)

  int dim() const { return static_cast<int>(matrix.cols()); }
};

struct EffectiveChannel {
  CMatrix matrix;  // K x N, H * P_A
};

// Orthonormalizes conj(h_1), ..., conj(h_N) in order (modified Gram-Schmidt,
// two passes). Requires N <= min(M, K).
AasPrecoder gs_mrt(const ChannelMatrix& channel, int N);

// Column i = conj(h_i) / ||h_i||; N <= K.
AasPrecoder mrt(const ChannelMatrix& channel, int N);

/// Keeps the N columns of the unitary M-point DFT matrix whose beamspace
/// channel columns have the largest norms, lowest index first on ties.
/// Selected columns are stored in ascending index order.
AasPrecoder dft_select(const ChannelMatrix& channel, int N);

AasPrecoder select_subspace(AasMethod method, const ChannelMatrix& channel, int N);

// Unitary DFT matrix, F(m, n) = exp(-j 2 pi m n / M) / sqrt(M).
CMatrix dft_matrix(int M);

EffectiveChannel effective_channel(const ChannelMatrix& channel, const AasPrecoder& aas);

}  // namespace splitprec
