#include <doctest.h>

#include <cmath>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/gon.hpp"

using namespace hs;

namespace {

std::int64_t brute_class_count(std::int64_t k, std::int64_t R) {
  std::int64_t c = 0;
  for (const auto& m : enumerate_shell(k, Parity::integral).elements) c += in_cylinder_class(m, R);
  return c;
}

std::int64_t imag_zero_count(std::int64_t k) {
  const std::int64_t s = isqrt(k);
  return s * s == k ? 2 : 0;
}

Lattice4 diagonal(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  Lattice4 l;
  l.basis = {{{a, 0, 0, 0}, {0, b, 0, 0}, {0, 0, c, 0}, {0, 0, 0, d}}};
  return l;
}

}  // namespace

TEST_CASE("cylinder membership examples") {
  CHECK(in_cylinder_class(Quaternion::integral(5, 0, 0, 0), 4));
  CHECK_FALSE(in_cylinder_class(Quaternion::integral(0, 1, 0, 0), 2));
  CHECK(in_cylinder_class(Quaternion::integral(4, 3, 0, 0), 1));
  CHECK(is_dyadic(1));
  CHECK(is_dyadic(64));
  CHECK_FALSE(is_dyadic(6));
  CHECK_FALSE(is_dyadic(0));
}

TEST_CASE("shell class count examples") {
  CHECK(shell_class_count(25, 2).count == 2);
  CHECK(shell_class_count(1, 1).count == 8);
  CHECK(shell_class_count(1, 2).count == 2);
  CHECK_THROWS_AS(shell_class_count(5, 3), DomainError);
}

TEST_CASE("dyadic class count examples") {
  // R >= 8 leaves only real m with 8 < m1^2 <= 16: m1 in {+-3, +-4}.
  CHECK(dyadic_class_count(8, 8).count == 4);
  CHECK(dyadic_class_count(8, 16).count == 4);
  // Norm 2 elements all have m2^2+m3^2+m4^2 >= 1 > 2/4.
  CHECK(dyadic_class_count(1, 2).count == 0);
  std::int64_t mass = 0;
  for (std::int64_t k = 7; k <= 12; ++k) mass += r4_count(k);
  CHECK(dyadic_class_count(6, 1).count == mass);
}

TEST_CASE("class counts agree with brute-force shells") {
  for (std::int64_t k = 1; k <= 300; k += 7)
    for (std::int64_t R : {1, 2, 4, 8, 32}) {
      REQUIRE(shell_class_count(k, R).count == brute_class_count(k, R));
      REQUIRE(shell_dyadic_band_count(k, R) == brute_class_count(k, R) - brute_class_count(k, 2 * R));
    }
  for (std::int64_t M : {3, 10, 40})
    for (std::int64_t R : {1, 2, 4}) {
      std::int64_t want = 0;
      for (std::int64_t k = M + 1; k <= 2 * M; ++k) want += brute_class_count(k, R);
      CHECK(dyadic_class_count(M, R).count == want);
    }
}

TEST_CASE("C(1) is the whole shell") {
  for (std::int64_t k = 1; k <= 500; ++k) REQUIRE(shell_class_count(k, 1).count == r4_count(k));
}

TEST_CASE("dyadic bands partition the shell up to the real remainder") {
  for (std::int64_t k = 1; k <= 400; ++k) {
    std::int64_t sum = 0, R = 1;
    while (R * R <= k) {
      sum += shell_dyadic_band_count(k, R);
      R *= 2;
    }
    // Past R^2 > k only real elements remain in C(R).
    REQUIRE(shell_class_count(k, R).count == imag_zero_count(k));
    REQUIRE(sum + imag_zero_count(k) == r4_count(k));
  }
}

TEST_CASE("reference right-hand sides and fitted constants") {
  const auto rec = shell_class_count(16, 2);
  CHECK(rec.rhs == doctest::Approx((1 + 4.0 / 2 + 16.0 / 8) * std::pow(16.0, kCountEpsilon)));
  const auto dy = dyadic_class_count(16, 4);
  CHECK(dy.rhs == doctest::Approx((4 + 256.0 / 64) * std::pow(16.0, kCountEpsilon)));
  std::vector<CountRecord> recs{rec, dy, shell_class_count(99, 1)};
  const double c = fit_constant(recs);
  for (const auto& r : recs) {
    CHECK(r.constant == c);
    CHECK(static_cast<double>(r.count) <= r.bound * (1 + 1e-12));
  }
}

TEST_CASE("A(X)") {
  CHECK(a_of_x(4, 1) == doctest::Approx(256));
  CHECK(a_of_x(0, 1) == doctest::Approx(64));
  // n = 0: every summand is 1, so A(X) = sum r4(k)^2.
  double want = 0;
  for (std::int64_t k = 1; k <= 50; ++k) want += static_cast<double>(r4_count(k)) * static_cast<double>(r4_count(k));
  CHECK(a_of_x(0, 50) == doctest::Approx(want).epsilon(1e-14));

  // Direct floating oracle at n = 6.
  double direct = 0;
  for (std::int64_t k = 1; k <= 40; ++k) {
    double s = 0;
    for (const auto& m : enumerate_shell(k, Parity::integral).elements) {
      const double im = static_cast<double>(m.doubled_imag_square()) / 4;
      s += im == 0 ? 7.0 : std::min(7.0, std::sqrt(static_cast<double>(k) / im));
    }
    direct += s * s;
  }
  CHECK(a_of_x(6, 40) == doctest::Approx(direct).epsilon(1e-12));

  const auto series = a_of_x_series(6, 40);
  CHECK(series.back() == doctest::Approx(a_of_x(6, 40)).epsilon(1e-14));
  for (std::size_t i = 1; i < series.size(); ++i) CHECK(series[i] >= series[i - 1]);
  for (int n = 0; n < 20; n += 2) CHECK(a_of_x(n + 2, 60) >= a_of_x(n, 60));
  // Each summand is at most (8 sigma(k) (n+1))^2, bounded by X^3 up to constants.
  CHECK(a_of_x(10, 100) <= 121.0 * a_of_x(0, 100));
}

TEST_CASE("log-log fit") {
  std::vector<double> x, y;
  for (int i = 1; i <= 10; ++i) {
    x.push_back(i);
    y.push_back(5 * std::pow(i, 2.5));
  }
  const auto f = loglog_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  for (double r : f.residuals) CHECK(std::fabs(r) < 1e-12);
  CHECK_THROWS_AS(loglog_fit({1.0}, {1.0}), DomainError);
}

TEST_CASE("lattice basics and rank") {
  const auto l = diagonal(1, 1, 1, 2);
  CHECK(l.covolume() == 2);
  CHECK(l.contains({3, -1, 0, 4}));
  CHECK_FALSE(l.contains({0, 0, 0, 1}));
  CHECK_THROWS_AS(diagonal(1, 1, 0, 1).covolume(), DomainError);
  CHECK(integer_rank({{1, 0, 0, 0}, {2, 0, 0, 0}, {0, 1, 0, 0}}) == 2);
  CHECK(integer_rank({{1, 2, 3, 4}, {2, 3, 4, 5}, {3, 4, 5, 6}, {4, 5, 6, 8}}) == 3);
  CHECK(integer_rank({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}) == 4);
}

TEST_CASE("successive minima examples") {
  const auto cube = Body::box({1, 1, 1, 1});
  const auto m = successive_minima(diagonal(1, 1, 1, 1), cube);
  for (int i = 0; i < 4; ++i) CHECK(m.lambda[static_cast<std::size_t>(i)] == 1);
  const auto m2 = successive_minima(diagonal(1, 1, 1, 2), cube);
  CHECK(m2.lambda == std::array<double, 4>{1, 1, 1, 2});
  CHECK(m2.lambda_squared[3] == 4);
  CHECK(integer_rank({m2.vectors[0], m2.vectors[1], m2.vectors[2], m2.vectors[3]}) == 4);
}

TEST_CASE("product bound examples") {
  const auto cube = Body::box({1, 1, 1, 1});
  const auto r = product_bound_check(diagonal(1, 1, 1, 1), cube);
  CHECK(r.count == 81);
  CHECK(r.bound == doctest::Approx(945));
  CHECK(r.holds);
  const auto sparse = product_bound_check(diagonal(9, 9, 9, 9), cube);
  CHECK(sparse.minima.lambda[0] > 8);
  CHECK(sparse.count == 1);
  CHECK(sparse.holds);
}

TEST_CASE("cylinder bodies") {
  const auto c = Body::cylinder(8, 2);
  CHECK(c.volume() == doctest::Approx(2 * std::sqrt(16.0) * 4.0 / 3 * std::numbers::pi * std::pow(4.0, 1.5)));
  CHECK(c.extent()[0] == doctest::Approx(4));
  CHECK(c.extent()[1] == doctest::Approx(2));
  const auto g = c.gauge_squared({4, 0, 0, 0});
  mpq_class gq(g.first, g.second);
  gq.canonicalize();
  CHECK(gq == 1);
  // Points of the lattice in the cylinder are exactly the integral quaternions with m1^2 <= 16 and imag <= 4.
  std::int64_t want = 0;
  for (int a = -4; a <= 4; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int cc = -2; cc <= 2; ++cc)
        for (int d = -2; d <= 2; ++d) want += b * b + cc * cc + d * d <= 4;
  CHECK(lattice_point_count(diagonal(1, 1, 1, 1), c) == want);
}

TEST_CASE("random instances satisfy both inequalities") {
  const auto instances = random_gon_instances(50, 20240611);
  REQUIRE(instances.size() == 50);
  for (const auto& inst : instances) {
    const auto pb = product_bound_check(inst.lattice, inst.body);
    const auto mk = minkowski_check(inst.lattice, inst.body, pb.minima);
    CHECK(pb.holds);
    CHECK(mk.holds);
    CHECK(mk.normalised >= mk.lower);
    CHECK(mk.normalised <= mk.upper);
    for (std::size_t i = 1; i < 4; ++i) CHECK(pb.minima.lambda[i] >= pb.minima.lambda[i - 1]);
    CHECK(integer_rank({pb.minima.vectors[0], pb.minima.vectors[1], pb.minima.vectors[2], pb.minima.vectors[3]}) == 4);
    for (const auto& v : pb.minima.vectors) CHECK(inst.lattice.contains(v));
  }
  const auto again = random_gon_instances(50, 20240611);
  CHECK(again[17].lattice.basis == instances[17].lattice.basis);
}

TEST_CASE("enumeration budget") {
  CHECK_THROWS_AS(lattice_point_count(diagonal(1, 1, 1, 1), Body::box({30, 30, 30, 30}), 1000), BudgetError);
}
