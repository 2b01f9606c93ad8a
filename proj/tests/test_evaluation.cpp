#include <doctest.h>

#include <cmath>
#include <random>

#include "splitprec/evaluation.hpp"

using namespace splitprec;

namespace {

CMatrix random_cmatrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n01(0.0, scale * std::sqrt(0.5));
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = cplx(n01(rng), n01(rng));
  return m;
}

// Straight-line sum rate with explicit loops.
double reference_rate(const CMatrix& H, const CMatrix& P, double s2) {
  const int K = static_cast<int>(H.rows());
  const int M = static_cast<int>(H.cols());
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    double signal = 0.0;
    double interference = 0.0;
    for (int i = 0; i < K; ++i) {
      cplx g = 0.0;
      for (int m = 0; m < M; ++m) g += H(k, m) * P(m, i);
      (i == k ? signal : interference) += std::norm(g);
    }
    total += std::log2(1.0 + signal / (interference + s2));
  }
  return total;
}

}  // namespace

TEST_CASE("power scaling") {
  std::mt19937_64 rng(1);
  const CMatrix P0 = power_scale(random_cmatrix(6, 3, rng), 2.0);
  CHECK(P0.squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK((power_scale(P0, 2.0) - P0).norm() < 1e-12);
  CHECK((power_scale(2.0 * P0, 2.0) - P0).norm() < 1e-12);
  CHECK_THROWS_AS(power_scale(CMatrix::Zero(2, 2), 1.0), DegenerateError);
}

TEST_CASE("sum rate: hand cases") {
  CHECK(sum_rate(CMatrix::Identity(4, 4), CMatrix::Identity(4, 4), 1.0) == doctest::Approx(4.0));
  CMatrix h(1, 1), p(1, 1);
  h << cplx(1.0, 2.0);
  p << cplx(0.5, 0.0);
  CHECK(sum_rate(h, p, 0.3) == doctest::Approx(std::log2(1.0 + 1.25 / 0.3)));
  CHECK_THROWS_AS(sum_rate(h, p, -1.0), std::invalid_argument);
}

TEST_CASE("sum rate agrees with a loop implementation") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const CMatrix H = random_cmatrix(8, 32, rng);
    const CMatrix P = power_scale(random_cmatrix(32, 8, rng), 1.0);
    const double s2 = std::pow(10.0, -(t % 5));
    CHECK(std::abs(sum_rate(H, P, s2) - reference_rate(H, P, s2)) <= 1e-10);
  }
}

TEST_CASE("sum MSE: hand cases") {
  ReceiverGains one;
  one.beta = CVector::Ones(3);
  CHECK(sum_mse(CMatrix::Identity(3, 3), CMatrix::Identity(3, 3), one, 0.0) ==
        doctest::Approx(0.0));
  ReceiverGains zero;
  zero.beta = CVector::Zero(3);
  CHECK(sum_mse(CMatrix::Identity(3, 3), CMatrix::Zero(3, 3), zero, 0.5) == doctest::Approx(3.0));
}

TEST_CASE("sum MSE matches a QPSK Monte-Carlo estimate") {
  std::mt19937_64 rng(3);
  const int K = 3;
  const CMatrix H = random_cmatrix(K, 6, rng);
  const CMatrix P = power_scale(random_cmatrix(6, K, rng), 1.0);
  ReceiverGains g;
  g.beta = random_cmatrix(K, 1, rng, 0.5);
  const double s2 = 0.2;
  const double analytic = sum_mse(H, P, g, s2);

  std::bernoulli_distribution bit;
  std::normal_distribution<double> noise(0.0, std::sqrt(s2 / 2));
  const CMatrix HP = H * P;
  const double a = 1.0 / std::sqrt(2.0);
  double acc = 0.0;
  const int draws = 100000;
  CVector s(K), n(K);
  for (int d = 0; d < draws; ++d) {
    for (int k = 0; k < K; ++k) {
      s(k) = cplx(bit(rng) ? a : -a, bit(rng) ? a : -a);
      n(k) = cplx(noise(rng), noise(rng));
    }
    const CVector y = HP * s + n;
    acc += (s - g.beta.cwiseProduct(y)).squaredNorm();
  }
  CHECK(acc / draws == doctest::Approx(analytic).epsilon(0.01));
}

TEST_CASE("fronthaul accounting") {
  FronthaulBudget b{32, 8, 8, 4, 1, true};
  const FronthaulReport r = fronthaul_bits(b);
  CHECK(r.split_bits == 512);
  CHECK(r.one_stage_bits == 512);
  CHECK(r.ratio_identity);

  FronthaulBudget same{16, 16, 4, 2, 2, true};
  CHECK(fronthaul_bits(same).split_bits == fronthaul_bits(same).one_stage_bits);

  FronthaulBudget bad{32, 8, 8, 2, 1, true};
  CHECK_THROWS_AS(fronthaul_bits(bad), ConfigError);
  bad.equal_budget = false;
  CHECK_FALSE(fronthaul_bits(bad).ratio_identity);

  CHECK(equal_budget_split_bits(128, 8, 1) == 16);
  CHECK(equal_budget_split_bits(32, 8, 1) == 4);
}

TEST_CASE("compensated summation is order independent") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(100000);
  for (auto& x : v) x = u(rng) * std::pow(10.0, static_cast<int>(u(rng) * 8));
  CompensatedSum fwd, rev;
  for (double x : v) fwd.add(x);
  for (auto it = v.rbegin(); it != v.rend(); ++it) rev.add(*it);
  CHECK(std::abs(fwd.value() - rev.value()) <= 1e-12 * std::max(1.0, std::abs(fwd.value())));
}
