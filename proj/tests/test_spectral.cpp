#include <doctest.h>

#include <cmath>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/spectral.hpp"

using namespace hs;

namespace {
const std::int64_t kPrimes[] = {3, 5, 7};
}

TEST_CASE("n=0 is a single space with lambda(p) = p+1") {
  const std::int64_t extras[] = {9, 15};
  const auto dec = joint_eigenspaces(0, kPrimes, extras);
  REQUIRE(dec.spaces.size() == 1);
  const auto& sp = dec.spaces[0];
  CHECK(sp.dim() == 1);
  CHECK(sp.t1_flag == 1);
  CHECK(sp.lambda.at(3) == doctest::Approx(4));
  CHECK(sp.lambda.at(5) == doctest::Approx(6));
  CHECK(sp.lambda.at(7) == doctest::Approx(8));
  CHECK(dec.eigenvalues(9)[0] == doctest::Approx(13));
  CHECK(dec.eigenvalues(15)[0] == doctest::Approx(24));
}

TEST_CASE("n=2 is complete and the T3 trace matches") {
  const auto basis = harmonic_basis(2);
  const auto dec = joint_eigenspaces<double>(basis, kPrimes, {});
  CHECK(dec.total_dim() == 9);
  const auto a3 = hecke_matrix(basis, 3);
  const double trace = mpq_class(a3.exact().trace() * a3.scale()).get_d();
  double sum = 0;
  for (const auto& sp : dec.spaces) sum += sp.lambda.at(3) * static_cast<double>(sp.dim());
  CHECK(std::fabs(trace - sum) <= 1e-6);
  CHECK(a3.exact().trace().get_den() == 1);
}

TEST_CASE("eigenvectors are Gram-orthonormal and satisfy the Hecke recurrence") {
  const auto basis = harmonic_basis(6);
  const std::int64_t extras[] = {9, 15, 25};
  const auto dec = joint_eigenspaces<double>(basis, kPrimes, extras);
  CHECK(dec.total_dim() == 49);
  CHECK(dec.max_residual <= 1e-9);
  std::vector<std::vector<double>> vs;
  for (const auto& sp : dec.spaces)
    for (const auto& v : sp.vectors) vs.push_back(v);
  const std::size_t d = basis.dim();
  for (std::size_t a = 0; a < vs.size(); a += 5)
    for (std::size_t b = 0; b < vs.size(); b += 3) {
      double g = 0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) g += vs[a][i] * basis.gram(i, j).get_d() * vs[b][j];
      CHECK(std::fabs(g - (a == b ? 1.0 : 0.0)) <= 1e-9);
    }
  const auto l1 = dec.eigenvalues(1), l3 = dec.eigenvalues(3), l5 = dec.eigenvalues(5);
  const auto l9 = dec.eigenvalues(9), l15 = dec.eigenvalues(15), l25 = dec.eigenvalues(25);
  for (std::size_t j = 0; j < l1.size(); ++j) {
    CHECK(l9[j] == doctest::Approx(l3[j] * l3[j] - 3 * l1[j]).epsilon(1e-8).scale(1));
    CHECK(l25[j] == doctest::Approx(l5[j] * l5[j] - 5 * l1[j]).epsilon(1e-8).scale(1));
    CHECK(l15[j] == doctest::Approx(l3[j] * l5[j]).epsilon(1e-8).scale(1));
  }
  for (const auto& sp : dec.spaces) {
    CHECK((sp.t1_flag == 0 || sp.t1_flag == 1));
    CHECK(sp.lambda.at(1) == doctest::Approx(sp.t1_flag).scale(1));
  }
  CHECK_THROWS_AS(dec.eigenvalues(21), DomainError);
}

TEST_CASE("binary128 and double decompositions agree") {
  const auto basis = harmonic_basis(4);
  const std::int64_t extras[] = {9};
  const auto d = joint_eigenspaces<double>(basis, kPrimes, extras);
  const auto q = joint_eigenspaces<Quad>(basis, kPrimes, extras);
  REQUIRE(d.spaces.size() == q.spaces.size());
  for (std::size_t s = 0; s < d.spaces.size(); ++s) {
    CHECK(d.spaces[s].dim() == q.spaces[s].dim());
    CHECK(d.spaces[s].t1_flag == q.spaces[s].t1_flag);
    for (const auto& [N, v] : d.spaces[s].lambda) CHECK(v == doctest::Approx(q.spaces[s].lambda.at(N)).epsilon(1e-10));
  }
  const auto ld = d.eigenvalues(9);
  const auto lq = q.eigenvalues(9);
  for (std::size_t j = 0; j < ld.size(); ++j) CHECK(ld[j] == doctest::Approx(static_cast<double>(lq[j])).epsilon(1e-10));
  CHECK(q.max_residual <= 1e-20);
}

TEST_CASE("input validation") {
  const std::int64_t bad[] = {9};
  CHECK_THROWS_AS(joint_eigenspaces(3, kPrimes, {}), DomainError);
  CHECK_THROWS_AS(joint_eigenspaces(2, bad, {}), DomainError);
  CHECK_THROWS_AS(joint_eigenspaces(2, {}, {}), DomainError);
}
