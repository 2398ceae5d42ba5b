#include <atomic>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/simd.hpp"

namespace hs::simd {

namespace {

bool host_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{detected_isa()};
  return slot;
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() {
  static const Isa isa = host_has_avx2() ? Isa::avx2 : Isa::scalar;
  return isa;
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) throw DomainError("host CPU lacks AVX2/FMA");
  active_slot().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("dot: size mismatch");
  return active_isa() == Isa::avx2 ? avx2::dot(a.data(), b.data(), a.size()) : scalar::dot(a.data(), b.data(), a.size());
}

void gemv(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* x, double* y) {
  if (lda < cols) throw DomainError("gemv: stride shorter than a row");
  if (active_isa() == Isa::avx2)
    avx2::gemv(A, rows, cols, lda, x, y);
  else
    scalar::gemv(A, rows, cols, lda, x, y);
}

void gemm_nt(const double* A, std::size_t rows, std::size_t cols, std::size_t lda, const double* X, std::size_t points,
             std::size_t ldx, double* Y, std::size_t ldy) {
  if (lda < cols || ldx < cols || ldy < rows) throw DomainError("gemm_nt: stride shorter than a row");
  if (active_isa() == Isa::avx2)
    avx2::gemm_nt(A, rows, cols, lda, X, points, ldx, Y, ldy);
  else
    scalar::gemm_nt(A, rows, cols, lda, X, points, ldx, Y, ldy);
}

void chebyshev_u_batch(int n, std::span<const double> x, std::span<double> out) {
  if (n < 0) throw DomainError("Chebyshev degree must be >= 0");
  if (x.size() != out.size()) throw DomainError("chebyshev_u_batch: size mismatch");
  if (active_isa() == Isa::avx2)
    avx2::chebyshev_u_batch(n, x.data(), out.data(), x.size());
  else
    scalar::chebyshev_u_batch(n, x.data(), out.data(), x.size());
}

}  // namespace hs::simd
