#include <catch_amalgamated.hpp>

#include "sosmom/cov.hpp"

#include <random>

using namespace sosmom;
using Catch::Approx;

namespace {

Matrix e11(int d) {
  Matrix m = Matrix::Zero(d, d);
  m(0, 0) = 1.0;
  return m;
}

Matrix random_psd(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = g(rng);
  return a * a.transpose() / d;
}

}  // namespace

TEST_CASE("test_cov_value on exact instances") {
  const int d = 2, k = 4;
  const Matrix x = Matrix::Identity(d, d);
  std::vector<Matrix> same(k, x);
  const auto zero = test_cov_value(same, x, 0.1, Sign::pos);
  REQUIRE(zero.solved());
  CHECK(zero.value == Approx(0.0).margin(1e-6));

  const double s = 0.8;
  std::vector<Matrix> spike(k, x + s * e11(d));
  const auto pos = test_cov_value(spike, x, s / 2, Sign::pos);
  REQUIRE(pos.solved());
  CHECK(pos.value == Approx(k).margin(1e-6));
  // Nonnegativity of b_i u_1^2 needs b_i u_1 in the basis.
  const auto neg = test_cov_value(spike, x, s / 2, Sign::neg, BasisMode::full);
  REQUIRE(neg.solved());
  CHECK(neg.value == Approx(0.0).margin(1e-6));
  const auto neg_partial = test_cov_value(spike, x, s / 2, Sign::neg);
  REQUIRE(neg_partial.solved());
  CHECK(neg_partial.value < 0.999 * k);
  CHECK_THROWS_AS(test_cov_value(spike, Matrix::Identity(3, 3), 0.1, Sign::pos), InvalidArgument);
}

TEST_CASE("test_cov_value is bounded and monotone in r") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 4; ++t) {
    std::vector<Matrix> Z;
    for (int i = 0; i < 5; ++i) Z.push_back(random_psd(3, rng));
    const Matrix x = random_psd(3, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double r : {0.01, 0.05, 0.1, 0.2, 0.4, 0.8}) {
      const auto c = test_cov_value(Z, x, r, t % 2 ? Sign::neg : Sign::pos);
      REQUIRE(c.solved());
      CHECK(c.value >= -1e-6);
      CHECK(c.value <= 5 + 1e-6);
      CHECK(c.value <= prev + 1e-6);
      prev = c.value;
    }
  }
}

TEST_CASE("replacing one bucket moves the value by at most one") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 5; ++t) {
    const int k = 6;
    std::vector<Matrix> Z;
    for (int i = 0; i < k; ++i) Z.push_back(random_psd(3, rng));
    const Matrix x = random_psd(3, rng);
    const double r = 0.1 + 0.1 * t;
    const auto a = test_cov_value(Z, x, r, Sign::pos);
    Z[t % k] = 10.0 * random_psd(3, rng);
    const auto b = test_cov_value(Z, x, r, Sign::pos);
    REQUIRE(a.solved());
    REQUIRE(b.solved());
    CHECK(std::abs(a.value - b.value) / k <= 1.0 / k + 1e-6);
  }
}

TEST_CASE("distance estimation examples") {
  const int d = 3, k = 6;
  CovConfig cfg;
  cfg.k = k;
  const Matrix x = Matrix::Identity(d, d);
  std::vector<Matrix> same(k, x);
  CHECK(dist_est(same, x, cfg).r == cfg.r_min);

  const double s = 0.5;
  std::vector<Matrix> spike(k, x + s * e11(d));
  const auto dr = dist_est(spike, x, cfg);
  CHECK(dr.r >= 0.95 * s);
  CHECK(dr.r <= 1.05 * s);
  // the radius is a maximum: one grid step higher fails
  CHECK(test_cov_value(spike, x, dr.r * 1.011, Sign::pos).value < cfg.accept * k);

  std::vector<Matrix> split;
  for (int i = 0; i < k; ++i) split.push_back(x + (i % 2 ? s : -s) * e11(d));
  CHECK(dist_est(split, x, cfg).r < s / 2);
}

TEST_CASE("bracketing from a hint finds the same radius") {
  std::mt19937_64 rng(2);
  CovConfig cfg;
  cfg.k = 5;
  std::vector<Matrix> Z;
  for (int i = 0; i < 5; ++i) Z.push_back(Matrix::Identity(3, 3) + 0.05 * random_psd(3, rng));
  const Matrix x = 0.3 * Matrix::Identity(3, 3);
  const auto plain = dist_est(Z, x, cfg);
  for (int hint : {0, 10, plain.grid_index, plain.grid_index + 3, 100000}) {
    CHECK(dist_est(Z, x, cfg, hint).r == plain.r);
  }
}

TEST_CASE("gradient estimation") {
  const int d = 3, k = 6;
  CovConfig cfg;
  cfg.k = k;
  const Matrix x = Matrix::Identity(d, d);
  const double s = 0.5;
  std::vector<Matrix> up(k, x + s * e11(d)), down(k, x - s * e11(d));
  const Matrix gu = grad_est(up, x, cfg);
  const Matrix gd = grad_est(down, x, cfg);
  CHECK((gu - e11(d)).cwiseAbs().maxCoeff() < 1e-2);
  CHECK((gd + e11(d)).cwiseAbs().maxCoeff() < 1e-2);
  CHECK(nuclear_norm(gu) == Approx(1.0).margin(1e-4));
  CHECK(nuclear_norm(gd) == Approx(1.0).margin(1e-4));
  std::vector<Matrix> same(k, x);
  CHECK_THROWS_WITH(grad_est(same, x, cfg), Catch::Matchers::ContainsSubstring("no gradient available"));
}

TEST_CASE("descent recovers a point mass") {
  DistSpec s;
  s.kind = DistKind::point_mass;
  s.d = 2;
  s.point = Vector(2);
  s.point << 1.0, -0.5;
  CovConfig cfg;
  cfg.k = 4;
  cfg.epsilon = 5e-4;
  const auto r = estimate_covariance(sample_dist(s, 40, 1), cfg);
  CHECK((r.sigma_hat - s.point * s.point.transpose()).cwiseAbs().maxCoeff() < 1e-3);
  CHECK(r.iterations <= r.nit);
}

TEST_CASE("nit = 0 returns the zero start") {
  DistSpec s;
  s.d = 2;
  CovConfig cfg;
  cfg.k = 5;
  cfg.nit = 0;
  const Dataset data = sample_dist(s, 500, 3);
  const auto r = estimate_covariance(data, cfg);
  CHECK(r.sigma_hat.isZero(0.0));
  CHECK(r.iterations == 0);
  CHECK(r.d_star == dist_est(make_buckets(data, 5, cfg.alpha), Matrix::Zero(2, 2), cfg).r);
}

TEST_CASE("gaussian covariance is recovered") {
  DistSpec s;
  s.d = 3;
  CovConfig cfg;
  cfg.k = 10;
  cfg.epsilon = 1e-2;
  for (std::uint64_t seed : {101u, 102u}) {
    const auto r = estimate_covariance(sample_dist(s, 3000, seed), cfg);
    CHECK(sym_op_norm(r.sigma_hat - Matrix::Identity(3, 3)) <= 0.5);
    for (std::size_t t = 1; t < r.trace.size(); ++t) {
      if (sym_op_norm(r.trace[t - 1].sigma - Matrix::Identity(3, 3)) < 0.5) break;
      CHECK((r.trace[t].sigma - Matrix::Identity(3, 3)).norm() <=
            (r.trace[t - 1].sigma - Matrix::Identity(3, 3)).norm() + 1e-12);
    }
  }
}

TEST_CASE("configuration validation and bucket counts") {
  CovConfig cfg;
  cfg.accept = 0.0005;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  CHECK(buckets_for_delta(1e-3) == 30);
  CHECK(buckets_for_delta(0.5) == 3);
  CHECK_THROWS_AS(buckets_for_delta(1.5), InvalidArgument);
}
