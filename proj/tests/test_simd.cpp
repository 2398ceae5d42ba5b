#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/simd.hpp"
#include "hecke_sphere/zonal.hpp"

using namespace hs;

namespace {

std::vector<double> random_vector(std::size_t len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(len);
  for (auto& x : v) x = u(rng);
  return v;
}

// Both summation orders lie within len * eps * sum |a_i b_i| of the exact value.
double dot_tolerance(const double* a, const double* b, std::size_t len) {
  double mag = 0;
  for (std::size_t i = 0; i < len; ++i) mag += std::fabs(a[i] * b[i]);
  return 2.0 * static_cast<double>(len + 1) * std::numeric_limits<double>::epsilon() * mag;
}

bool has_avx2() { return simd::detected_isa() == simd::Isa::avx2; }

struct IsaGuard {
  simd::Isa saved = simd::active_isa();
  ~IsaGuard() { simd::set_active_isa(saved); }
};

}  // namespace

TEST_CASE("scalar reference against naive loops") {
  for (std::size_t len : {0u, 1u, 3u, 4u, 7u, 64u, 129u}) {
    const auto a = random_vector(len, 1), b = random_vector(len, 2);
    long double naive = 0;
    for (std::size_t i = 0; i < len; ++i) naive += static_cast<long double>(a[i]) * b[i];
    CHECK(simd::scalar::dot(a.data(), b.data(), len) == doctest::Approx(static_cast<double>(naive)).epsilon(1e-14).scale(1));
  }
  const auto x = random_vector(50, 3);
  std::vector<double> out(50);
  simd::scalar::chebyshev_u_batch(9, x.data(), out.data(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(out[i] == chebyshev_U_recurrence(9, x[i]));
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!has_avx2()) {
    MESSAGE("host lacks AVX2; equivalence not exercised");
    return;
  }
  for (std::size_t len : {1u, 2u, 3u, 4u, 5u, 8u, 15u, 16u, 17u, 100u, 1001u}) {
    const auto a = random_vector(len, len), b = random_vector(len, len + 1);
    CHECK(std::fabs(simd::avx2::dot(a.data(), b.data(), len) - simd::scalar::dot(a.data(), b.data(), len)) <=
          dot_tolerance(a.data(), b.data(), len));
  }
  for (std::size_t rows : {1u, 5u, 25u}) {
    for (std::size_t cols : {1u, 4u, 7u, 35u, 286u}) {
      const std::size_t lda = cols + 3;
      const auto A = random_vector(rows * lda, rows * 100 + cols);
      const auto x = random_vector(cols, 7);
      std::vector<double> ys(rows), ya(rows);
      simd::scalar::gemv(A.data(), rows, cols, lda, x.data(), ys.data());
      simd::avx2::gemv(A.data(), rows, cols, lda, x.data(), ya.data());
      for (std::size_t r = 0; r < rows; ++r)
        CHECK(std::fabs(ys[r] - ya[r]) <= dot_tolerance(A.data() + r * lda, x.data(), cols));

      const std::size_t points = 9, ldx = cols + 1, ldy = rows + 2;
      const auto X = random_vector(points * ldx, 8);
      std::vector<double> Ys(points * ldy, 0), Ya(points * ldy, 0);
      simd::scalar::gemm_nt(A.data(), rows, cols, lda, X.data(), points, ldx, Ys.data(), ldy);
      simd::avx2::gemm_nt(A.data(), rows, cols, lda, X.data(), points, ldx, Ya.data(), ldy);
      for (std::size_t p = 0; p < points; ++p)
        for (std::size_t r = 0; r < rows; ++r) {
          CHECK(Ys[p * ldy + r] == simd::scalar::dot(A.data() + r * lda, X.data() + p * ldx, cols));
          CHECK(std::fabs(Ys[p * ldy + r] - Ya[p * ldy + r]) <=
                dot_tolerance(A.data() + r * lda, X.data() + p * ldx, cols));
        }
      // Batched rows use the same blocking as gemv, so single points reproduce exactly.
      std::vector<double> y0(rows);
      simd::avx2::gemv(A.data(), rows, cols, lda, X.data(), y0.data());
      for (std::size_t r = 0; r < rows; ++r) CHECK(Ya[r] == y0[r]);
    }
  }
  for (int n : {0, 1, 2, 7, 24}) {
    const auto x = random_vector(37, static_cast<std::uint64_t>(n));
    std::vector<double> os(x.size()), oa(x.size());
    simd::scalar::chebyshev_u_batch(n, x.data(), os.data(), x.size());
    simd::avx2::chebyshev_u_batch(n, x.data(), oa.data(), x.size());
    CHECK(os == oa);
  }
}

TEST_CASE("dispatch override") {
  IsaGuard guard;
  CHECK(simd::isa_name(simd::Isa::scalar) == std::string("scalar"));
  simd::set_active_isa(simd::Isa::scalar);
  CHECK(simd::active_isa() == simd::Isa::scalar);
  const auto a = random_vector(33, 4), b = random_vector(33, 5);
  const double s = simd::dot(a, b);
  CHECK(s == simd::scalar::dot(a.data(), b.data(), a.size()));
  if (has_avx2()) {
    simd::set_active_isa(simd::Isa::avx2);
    CHECK(simd::active_isa() == simd::Isa::avx2);
    CHECK(std::fabs(simd::dot(a, b) - s) <= dot_tolerance(a.data(), b.data(), a.size()));
  } else {
    CHECK_THROWS_AS(simd::set_active_isa(simd::Isa::avx2), DomainError);
  }
  CHECK_THROWS_AS(simd::dot(std::span<const double>(a), std::span<const double>(b).first(3)), DomainError);
}
