#pragma once

// Dense double-precision kernels with a scalar reference and an AVX2/FMA
// variant, chosen once at runtime from the host CPU.

#include <cstddef>
#include <span>

namespace hs::simd {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);

/// Best variant the host supports.
Isa detected_isa();

/// Variant used by the dispatching entry points below.
Isa active_isa();

/// Pins the active variant. Throws DomainError if the host lacks it.
void set_active_isa(Isa isa);

/// sum_i a_i b_i. Sizes must match.
double dot(std::span<const double> a, std::span<const double> b);

/// y = A x for row-major A with `rows` rows of stride `lda` >= cols.
void gemv(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* x, double* y);

/// Y[b * ldy + r] = dot(row r of A, row b of X) for r < rows, b < points.
void gemm_nt(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* X, std::size_t points,
             std::size_t ldx, double* Y, std::size_t ldy);

/// out_i = U_n(x_i) by the three-term recurrence.
void chebyshev_u_batch(int n, std::span<const double> x, std::span<double> out);

namespace scalar {
double dot(const double* a, const double* b, std::size_t len);
void gemv(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* x, double* y);
void gemm_nt(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* X, std::size_t points,
             std::size_t ldx, double* Y, std::size_t ldy);
void chebyshev_u_batch(int n, const double* x, double* out, std::size_t len);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t len);
void gemv(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* x, double* y);
void gemm_nt(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* X, std::size_t points,
             std::size_t ldx, double* Y, std::size_t ldy);
void chebyshev_u_batch(int n, const double* x, double* out, std::size_t len);
}  // namespace avx2

}  // namespace hs::simd
