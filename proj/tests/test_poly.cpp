#include <doctest.h>

#include <cmath>
#include <random>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/harmonic.hpp"
#include "hecke_sphere/poly.hpp"

using namespace hs;

namespace {

// Closed form E[x^alpha] on S^3 with probability measure.
double beta_moment(const Exponent4& a) {
  double log_num = std::lgamma(2.0);
  int total = 0;
  for (int e : a) {
    if (e % 2) return 0;
    log_num += std::lgamma((e + 1) / 2.0) - std::lgamma(0.5);
    total += e;
  }
  return std::exp(log_num - std::lgamma(2.0 + total / 2.0));
}

// Hamilton product with real coordinates.
std::array<double, 4> hamilton(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3], a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1], a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

}  // namespace

TEST_CASE("monomial sphere integrals") {
  CHECK(monomial_sphere_integral({2, 0, 0, 0}) == mpq_class(1, 4));
  CHECK(monomial_sphere_integral({1, 1, 0, 0}) == 0);
  CHECK(monomial_sphere_integral({4, 0, 0, 0}) == mpq_class(1, 8));
  CHECK(monomial_sphere_integral({0, 0, 0, 0}) == 1);
  for (int a = 0; a <= 6; a += 2)
    for (int b = 0; b <= 6; b += 2)
      for (int c = 0; c <= 4; c += 2)
        for (int d = 0; d <= 4; ++d) {
          const Exponent4 e{a, b, c, d};
          CHECK(monomial_sphere_integral(e).get_d() == doctest::Approx(beta_moment(e)).epsilon(1e-13));
        }
}

TEST_CASE("x1^4 moment against Monte Carlo") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  const int samples = 10'000'000;
  double sum = 0;
  for (int s = 0; s < samples; ++s) {
    const double a = g(rng), b = g(rng), c = g(rng), d = g(rng);
    const double x = a * a / (a * a + b * b + c * c + d * d);
    sum += x * x;
  }
  CHECK(std::fabs(sum / samples - 0.125) < 1e-3);
}

TEST_CASE("polynomial arithmetic") {
  Poly4 f(2);
  f.add_term({2, 0, 0, 0}, 1);
  f.add_term({0, 2, 0, 0}, -1);
  CHECK(f.laplacian().is_zero());
  Poly4 r2(2);
  for (int i = 0; i < 4; ++i) {
    Exponent4 e{0, 0, 0, 0};
    e[static_cast<std::size_t>(i)] = 2;
    r2.add_term(e, 1);
  }
  CHECK(r2.laplacian().coeff({0, 0, 0, 0}) == 8);
  Poly4 g = f;
  g -= f;
  CHECK(g.is_zero());
  CHECK((f * f).degree() == 4);
  CHECK((f * f).coeff({2, 2, 0, 0}) == -2);
  CHECK_THROWS_AS(f.add_term({1, 0, 0, 0}, 1), DomainError);
}

TEST_CASE("monomial index ordering") {
  const MonomialIndex3 idx(1);
  REQUIRE(idx.size() == 3);
  CHECK(idx[0] == Exponent3{1, 0, 0});
  CHECK(idx[1] == Exponent3{0, 1, 0});
  CHECK(idx[2] == Exponent3{0, 0, 1});
  const MonomialIndex4 idx4(5);
  CHECK(idx4.size() == monomial_count(5, 4));
  for (std::size_t i = 0; i < idx4.size(); ++i) CHECK(idx4.index(idx4[i]) == i);
}

TEST_CASE("harmonic basis small degrees") {
  const auto b0 = harmonic_basis(0);
  REQUIRE(b0.dim() == 1);
  CHECK(b0.gram(0, 0) == 1);

  const auto b1 = harmonic_basis(1);
  REQUIRE(b1.dim() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(b1.gram(i, j) == (i == j ? mpq_class(1, 4) : mpq_class(0)));

  CHECK(harmonic_basis(2).dim() == 9);
}

TEST_CASE("harmonic basis is harmonic, complete and Gram positive") {
  for (int n = 0; n <= 8; ++n) {
    const auto b = harmonic_basis(n);
    REQUIRE(b.dim() == harmonic_dimension(n));
    CHECK(b.gram.is_symmetric());
    for (std::size_t i = 0; i < b.dim(); ++i) {
      CHECK(b.basis[i].laplacian().is_zero());
      CHECK(b.gram(i, i) > 0);
      const auto coords = b.coordinates(b.basis[i]);
      for (std::size_t j = 0; j < b.dim(); ++j) CHECK(coords[j] == (i == j ? 1 : 0));
    }
    // Positive definiteness: every LDL pivot is positive.
    for (const auto& d : ldl_decompose(b.gram).diagonal) CHECK(d > 0);
  }
}

TEST_CASE("linear substitution examples") {
  const auto x1 = Poly4::monomial({1, 0, 0, 0});
  const auto fi = substitute_left_mul(x1, Quaternion::integral(0, 1, 0, 0));
  CHECK(fi == Poly4::monomial({0, 1, 0, 0}, -1));

  const auto one = Poly4::monomial({0, 0, 0, 0});
  CHECK(substitute_left_mul(one, Quaternion::integral(3, -1, 2, 5)) == one);
}

TEST_CASE("substitution agrees with numeric evaluation") {
  Poly4 f(2);
  f.add_term({2, 0, 0, 0}, 1);
  f.add_term({0, 2, 0, 0}, -1);
  const auto m = Quaternion::integral(1, 1, 0, 0);
  const auto g = substitute_left_mul(f, m);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    const std::array<double, 4> x{u(rng), u(rng), u(rng), u(rng)};
    const auto mx = hamilton({1, 1, 0, 0}, x);
    const double want = f.evaluate(std::span<const double, 4>(mx));
    const double got = g.evaluate(std::span<const double, 4>(x));
    CHECK(std::fabs(got - want) <= 1e-12 * std::max(1.0, std::fabs(want)));
  }
}

TEST_CASE("substitution of harmonic basis elements stays harmonic") {
  const auto b = harmonic_basis_no_gram(4);
  for (const auto& q : {Quaternion::integral(1, 1, 1, 0), Quaternion::integral(2, -1, 0, 3)})
    for (std::size_t i = 0; i < b.dim(); i += 3) CHECK(substitute_left_mul(b.basis[i], q).laplacian().is_zero());
}

TEST_CASE("evaluation examples") {
  const auto f = Poly4::monomial({1, 1, 0, 0});
  const mpq_class p[4] = {1, 1, 0, 0};
  CHECK(f.evaluate(std::span<const mpq_class, 4>(p)) == 1);
  const auto one = Poly4::monomial({0, 0, 0, 0});
  const mpq_class q[4] = {mpq_class(2, 7), -5, 3, 11};
  CHECK(one.evaluate(std::span<const mpq_class, 4>(q)) == 1);

  const auto b = harmonic_basis_no_gram(4);
  const mpq_class pe[4] = {mpq_class(3, 5), mpq_class(4, 5), 0, 0};
  const double pd[4] = {0.6, 0.8, 0, 0};
  for (const auto& h : b.basis) {
    const double exact = h.evaluate(std::span<const mpq_class, 4>(pe)).get_d();
    CHECK(std::fabs(h.evaluate(std::span<const double, 4>(pd)) - exact) <= 1e-12 * std::max(1.0, std::fabs(exact)));
  }
}
