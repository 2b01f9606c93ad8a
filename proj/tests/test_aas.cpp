#include <doctest.h>

#include <algorithm>
#include <numeric>

#include <Eigen/SVD>

#include "splitprec/aas.hpp"
#include "splitprec/channel.hpp"

using namespace splitprec;

namespace {

ChannelMatrix rayleigh(int M, int K, std::uint64_t seed) {
  SystemConfig c;
  c.M = M;
  c.K = K;
  c.N = K;
  return gen_rayleigh(c, seed);
}

ChannelMatrix from(const CMatrix& H) {
  ChannelMatrix ch;
  ch.H = H;
  return ch;
}

double semi_unitary_error(const CMatrix& P) {
  return (P.adjoint() * P - CMatrix::Identity(P.cols(), P.cols())).norm();
}

}  // namespace

TEST_CASE("gs_mrt: identity channel") {
  const AasPrecoder p = gs_mrt(from(CMatrix::Identity(4, 4)), 4);
  CHECK((p.matrix - CMatrix::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("gs_mrt: hand example") {
  CMatrix H(2, 2);
  H << 1, 0, 1, 1;
  const AasPrecoder p = gs_mrt(from(H), 2);
  CMatrix expect(2, 2);
  expect << 1, 0, 0, 1;
  CHECK((p.matrix - expect).norm() < 1e-14);
}

TEST_CASE("gs_mrt: N = K keeps all channel energy, matching the SVD subspace") {
  for (int t = 0; t < 50; ++t) {
    const ChannelMatrix ch = rayleigh(32, 8, derive_seed(21, 1, t));
    const AasPrecoder p = gs_mrt(ch, 8);
    const double total = ch.H.squaredNorm();
    CHECK(std::abs(p.objective_value - total) <= 1e-8 * total);
    const Eigen::JacobiSVD<CMatrix> svd(ch.H, Eigen::ComputeFullV);
    const double sv2 = svd.singularValues().squaredNorm();
    CHECK(std::abs((ch.H * p.matrix).squaredNorm() - sv2) <= 1e-8 * total);
    // Dominant right singular vectors span the same subspace.
    const CMatrix V = svd.matrixV().leftCols(8);
    CHECK(((V * V.adjoint()) - p.matrix * p.matrix.adjoint()).norm() < 1e-9);
  }
}

TEST_CASE("semi-unitarity of gs_mrt and dft") {
  for (int t = 0; t < 1000; ++t) {
    const ChannelMatrix ch = rayleigh(32, 8, derive_seed(22, 1, t));
    CHECK(semi_unitary_error(gs_mrt(ch, 8).matrix) <= 1e-9);
    CHECK(semi_unitary_error(dft_select(ch, 16).matrix) <= 1e-9);
  }
}

TEST_CASE("gs_mrt rejects dependent rows and oversized requests") {
  CMatrix H(2, 3);
  H << 1, 2, 3, 2, 4, 6;
  CHECK_THROWS_AS(gs_mrt(from(H), 2), DegenerateError);
  CHECK_THROWS_AS(gs_mrt(rayleigh(8, 4, 1), 5), DimensionError);
}

TEST_CASE("mrt: normalization hand example") {
  CMatrix H(1, 2);
  H << 3, 4;
  const AasPrecoder p = mrt(from(H), 1);
  CHECK(std::abs(p.matrix(0, 0) - cplx(0.6, 0)) < 1e-15);
  CHECK(std::abs(p.matrix(1, 0) - cplx(0.8, 0)) < 1e-15);
}

TEST_CASE("mrt coincides with gs_mrt on orthogonal rows") {
  const CMatrix F = dft_matrix(8);
  const ChannelMatrix ch = from(2.5 * F.topRows(4));
  CHECK((mrt(ch, 4).matrix - gs_mrt(ch, 4).matrix).norm() <= 1e-12);
}

TEST_CASE("mrt: effective channel diagonal is the row norm") {
  for (int t = 0; t < 20; ++t) {
    const ChannelMatrix ch = rayleigh(16, 4, derive_seed(23, 1, t));
    const CMatrix He = effective_channel(ch, mrt(ch, 4)).matrix;
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(He(i, i).imag()) < 1e-12);
      CHECK(He(i, i).real() == doctest::Approx(ch.H.row(i).norm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("dft: single-beam channel selects its beam") {
  const CMatrix F = dft_matrix(16);
  for (int m : {0, 5, 15}) {
    const ChannelMatrix ch = from(F.col(m).adjoint());
    const AasPrecoder p = dft_select(ch, 2);
    CHECK(std::find(p.selected_beams.begin(), p.selected_beams.end(), m) != p.selected_beams.end());
    CHECK((ch.H * p.matrix).squaredNorm() == doctest::Approx(ch.H.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("dft: selection equals a brute-force beam ranking") {
  for (int t = 0; t < 100; ++t) {
    const ChannelMatrix ch = rayleigh(32, 8, derive_seed(24, 1, t));
    const CMatrix F = dft_matrix(32);
    std::vector<double> power(32);
    for (int m = 0; m < 32; ++m) {
      double acc = 0.0;
      for (int k = 0; k < 8; ++k) {
        cplx s = 0.0;
        for (int a = 0; a < 32; ++a) s += ch.H(k, a) * F(a, m);
        acc += std::norm(s);
      }
      power[m] = acc;
    }
    std::vector<int> idx(32);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return power[a] > power[b]; });
    std::vector<int> top(idx.begin(), idx.begin() + 8);
    std::sort(top.begin(), top.end());
    CHECK(dft_select(ch, 8).selected_beams == top);
  }
}

TEST_CASE("dft: N = M keeps all energy") {
  const ChannelMatrix ch = rayleigh(16, 4, 77);
  const AasPrecoder p = dft_select(ch, 16);
  CHECK(p.objective_value == doctest::Approx(ch.H.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("effective channel") {
  const ChannelMatrix ch = rayleigh(6, 3, 4);
  AasPrecoder eye;
  eye.matrix = CMatrix::Identity(6, 6);
  CHECK((effective_channel(ch, eye).matrix - ch.H).norm() == 0.0);

  const CMatrix He = effective_channel(ch, gs_mrt(ch, 3)).matrix;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) CHECK(std::abs(He(i, j)) < 1e-10);
  }

  const ChannelMatrix zero = from(CMatrix::Zero(3, 6));
  CHECK(effective_channel(zero, dft_select(zero, 3)).matrix.norm() == 0.0);

  AasPrecoder wrong;
  wrong.matrix = CMatrix::Identity(5, 3);
  CHECK_THROWS_AS(effective_channel(ch, wrong), DimensionError);
}

TEST_CASE("method names round-trip") {
  for (AasMethod m : {AasMethod::gs_mrt, AasMethod::mrt, AasMethod::dft}) {
    CHECK(parse_aas_method(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_aas_method("svd"), ConfigError);
}
