#include <doctest.h>

#include <cmath>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/moments.hpp"

using namespace hs;

namespace {

const std::int64_t kPrimes[] = {3, 5, 7};

struct Fixture {
  HarmonicBasis basis;
  SpectralDecomposition dec;
  explicit Fixture(int n) : basis(harmonic_basis(n)), dec(joint_eigenspaces<double>(basis, kPrimes, {})) {}
};

MomentReport synthetic(int n, double family, double fourth, double individual) {
  MomentReport r;
  r.n = n;
  r.family.value = family;
  r.fourth.value = fourth;
  r.individual.value = individual;
  return r;
}

}  // namespace

TEST_CASE("sphere grid is reproducible and on the sphere") {
  const auto a = sphere_grid(100, 9), b = sphere_grid(100, 9), c = sphere_grid(100, 10);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& p : a) CHECK(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3] == doctest::Approx(1).epsilon(1e-15));
}

TEST_CASE("n=0: the constant form") {
  const Fixture f(0);
  const auto r = moment_sweep(f.basis, f.dec, 200, 1);
  CHECK(r.flagged_spaces == 1);
  CHECK(r.family.value == doctest::Approx(1).epsilon(1e-12));
  CHECK(r.fourth.value == doctest::Approx(1).epsilon(1e-12));
  CHECK(r.individual.value == doctest::Approx(1).epsilon(1e-12));
  CHECK(r.closure_error <= 1e-13);
}

TEST_CASE("evaluator matches exact basis evaluation") {
  const Fixture f(4);
  const EigenfunctionEvaluator ev(f.basis, f.dec);
  CHECK(ev.count() == 25);
  for (const auto& x : sphere_grid(5, 4)) {
    std::vector<double> b;
    for (const auto& p : f.basis.basis) b.push_back(p.evaluate(std::span<const double, 4>(x)));
    const auto want = f.dec.eigenfunction_values(b);
    std::vector<double> got;
    ev.evaluate(x, got);
    for (std::size_t j = 0; j < got.size(); ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-10).scale(1));
  }
  const auto pts = sphere_grid(7, 5);
  std::vector<double> batch, single;
  ev.evaluate_batch(pts, batch);
  for (std::size_t b = 0; b < pts.size(); ++b) {
    ev.evaluate(pts[b], single);
    for (std::size_t j = 0; j < single.size(); ++j) CHECK(batch[b * ev.count() + j] == single[j]);
  }
}

TEST_CASE("pre-trace identity at floating points") {
  for (int n : {2, 4, 8}) {
    const Fixture f(n);
    const auto r = pretrace_check(f.basis, f.dec, 100, 7);
    CHECK(r.passed);
    CHECK(r.max_residual <= 1e-8 * (n + 1) * (n + 1));
  }
  const Fixture f(2);
  CHECK_THROWS_AS(pretrace_check(f.basis, f.dec, 0, 7), DomainError);
}

TEST_CASE("closure, the family invariant and the fourth-moment ordering") {
  for (int n : {4, 6, 10}) {
    const Fixture f(n);
    const auto r = moment_sweep(f.basis, f.dec, 2000, 3);
    CHECK(r.closure_error <= 1e-10);
    CHECK(r.fourth_below_family);
    CHECK(r.fourth.value <= r.family.value * (1 + 1e-12));
    CHECK(r.family.value >= r.family.grid_value);
    CHECK(r.individual.value * r.individual.value <= r.family.value * (1 + 1e-12));
    // Each flagged space is invariant under right SU(2), so its pointwise mass is its dimension.
    double want = 0;
    for (const auto& sp : f.dec.spaces)
      if (sp.t1_flag) want += static_cast<double>(sp.dim() * sp.dim());
    CHECK(r.family.value == doctest::Approx(want).epsilon(1e-9));
    CHECK(r.cauchy_schwarz_floor <= r.family.value * (1 + 1e-12));
  }
}

TEST_CASE("refined maxima are stable between grid sizes") {
  const Fixture f(4);
  const auto small = moment_sweep(f.basis, f.dec, 5000, 11);
  const auto large = moment_sweep(f.basis, f.dec, 50000, 12);
  REQUIRE(small.flagged_spaces > 0);
  CHECK(std::fabs(small.family.value - large.family.value) <= 0.02 * large.family.value);
  CHECK(std::fabs(small.fourth.value - large.fourth.value) <= 0.02 * large.fourth.value);
  CHECK(std::fabs(small.individual.value - large.individual.value) <= 0.02 * large.individual.value);
}

TEST_CASE("moment sweep is deterministic across thread counts") {
  const Fixture f(6);
  const auto a = moment_sweep(f.basis, f.dec, 1000, 5, 10, 1);
  const auto b = moment_sweep(f.basis, f.dec, 1000, 5, 10, 3);
  CHECK(a.family.value == b.family.value);
  CHECK(a.fourth.value == b.fourth.value);
  CHECK(a.individual.point == b.individual.point);
  CHECK_THROWS_AS(moment_sweep(f.basis, f.dec, 0, 5), DomainError);
}

TEST_CASE("growth fits on synthetic reports") {
  std::vector<MomentReport> reports;
  for (int n = 2; n <= 12; n += 2) reports.push_back(synthetic(n, std::pow(n, 3), 4.0, 2 * std::sqrt(n)));
  const auto fits = growth_fit(reports);
  REQUIRE(fits.size() == 3);
  CHECK(fits[0].stat == "sup_family");
  CHECK(std::fabs(fits[0].slope - 3) <= 1e-9);
  CHECK(std::fabs(fits[1].slope) <= 1e-9);
  CHECK(std::fabs(fits[2].slope - 0.5) <= 1e-9);
  CHECK(fits[0].used.size() == 6);

  // Vanishing statistics are skipped rather than fitted.
  reports.push_back(synthetic(14, 0, 0, 0));
  CHECK(growth_fit(reports)[0].used.size() == 6);

  std::vector<MomentReport> few;
  for (int n = 2; n <= 6; n += 2) few.push_back(synthetic(n, n, n, n));
  CHECK_THROWS_AS(growth_fit(few), DomainError);
}
