#include "hecke_sphere/simd.hpp"

namespace hs::simd::scalar {

double dot(const double* a, const double* b, std::size_t len) {
  double s = 0;
  for (std::size_t i = 0; i < len; ++i) s += a[i] * b[i];
  return s;
}

void gemv(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(A + r * lda, x, cols);
}

void gemm_nt(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* X, std::size_t points,
             std::size_t ldx, double* Y, std::size_t ldy) {
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t b = 0; b < points; ++b) Y[b * ldy + r] = dot(A + r * lda, X + b * ldx, cols);
}

void chebyshev_u_batch(int n, const double* x, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    double prev = 1, cur = 2 * x[i];
    if (n == 0) cur = 1;
    for (int k = 2; k <= n; ++k) {
      const double next = 2 * x[i] * cur - prev;
      prev = cur;
      cur = next;
    }
    out[i] = cur;
  }
}

}  // namespace hs::simd::scalar
