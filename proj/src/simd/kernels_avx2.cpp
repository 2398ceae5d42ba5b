// Built with -mavx2 -mfma; only reached when the CPU reports both.
#include <immintrin.h>

#include "hecke_sphere/simd.hpp"

namespace hs::simd::avx2 {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= len; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) s += a[i] * b[i];
  return s;
}

namespace {

// Four dot products of consecutive rows of A against one vector x.
inline void dot4(const double* a0, std::size_t lda, const double* x, std::size_t cols, double* out, std::size_t stride) {
  const double* a1 = a0 + lda;
  const double* a2 = a1 + lda;
  const double* a3 = a2 + lda;
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd(), s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
  std::size_t c = 0;
  for (; c + 4 <= cols; c += 4) {
    const __m256d xv = _mm256_loadu_pd(x + c);
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + c), xv, s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + c), xv, s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + c), xv, s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + c), xv, s3);
  }
  double t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2), t3 = hsum(s3);
  for (; c < cols; ++c) {
    t0 += a0[c] * x[c];
    t1 += a1[c] * x[c];
    t2 += a2[c] * x[c];
    t3 += a3[c] * x[c];
  }
  out[0] = t0;
  out[stride] = t1;
  out[2 * stride] = t2;
  out[3 * stride] = t3;
}

}  // namespace

void gemv(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* x, double* y) {
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) dot4(A + r * lda, lda, x, cols, y + r, 1);
  for (; r < rows; ++r) y[r] = dot(A + r * lda, x, cols);
}

void gemm_nt(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* X, std::size_t points,
             std::size_t ldx, double* Y, std::size_t ldy) {
  // Each block of four rows stays in cache while every point streams past it.
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    double buf[4];
    for (std::size_t b = 0; b < points; ++b) {
      dot4(A + r * lda, lda, X + b * ldx, cols, buf, 1);
      for (std::size_t i = 0; i < 4; ++i) Y[b * ldy + r + i] = buf[i];
    }
  }
  for (; r < rows; ++r)
    for (std::size_t b = 0; b < points; ++b) Y[b * ldy + r] = dot(A + r * lda, X + b * ldx, cols);
}

void chebyshev_u_batch(int n, const double* x, double* out, std::size_t len) {
  std::size_t i = 0;
  const __m256d one = _mm256_set1_pd(1.0);
  for (; i + 4 <= len; i += 4) {
    const __m256d two_x = _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(x + i));
    __m256d prev = one, cur = n == 0 ? one : two_x;
    for (int k = 2; k <= n; ++k) {
      // Same rounding as the scalar 2 x cur - prev: one product, one subtraction.
      const __m256d next = _mm256_sub_pd(_mm256_mul_pd(two_x, cur), prev);
      prev = cur;
      cur = next;
    }
    _mm256_storeu_pd(out + i, cur);
  }
  scalar::chebyshev_u_batch(n, x + i, out + i, len - i);
}

}  // namespace hs::simd::avx2
