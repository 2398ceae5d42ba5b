#pragma once

// Hecke operators T_N f(x) = (1/8) sum_{nr(m)=N} f(m x / sqrt(N)) on the
// degree-n harmonic space, as exact matrices in the pivot basis.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hecke_sphere/harmonic.hpp"
#include "hecke_sphere/qmatrix.hpp"

namespace hs {

/// A = entries / denominator is the matrix of f -> sum_{nr(m)=N} f(m x)
/// acting on basis coordinate columns; T_N = scale * A.
struct HeckeMatrix {
  int n = 0;
  std::int64_t N = 0;
  ZMatrix entries;
  mpz_class denominator = 1;

  std::size_t dim() const noexcept { return entries.rows(); }
  QMatrix exact() const;
  /// 1/(8 N^(n/2)). Throws DomainError for odd n.
  mpq_class scale() const;
  /// 1/(8 N^(n/2)) in floating point, valid for every n.
  double scale_double() const;
  /// T_N in floating point, row-major.
  std::vector<double> scaled_double() const;
};

/// Matrix of sum_{nr(m)=N} f(m x) on the span of `basis`, for any n.
HeckeMatrix hecke_sum_matrix(const HarmonicBasis& basis, std::int64_t N, unsigned threads = 1);

/// Requires n even and N >= 1.
HeckeMatrix hecke_matrix(int n, std::int64_t N, unsigned threads = 1);
HeckeMatrix hecke_matrix(const HarmonicBasis& basis, std::int64_t N, unsigned threads = 1);

struct RelationResult {
  std::string identity;  // "product", "recurrence", "commutator" or "selfadjoint"
  std::int64_t M = 0;
  std::int64_t N = 0;
  bool passed = false;
};

struct RelationsReport {
  int n = 0;
  std::vector<std::int64_t> computed;  // every N whose matrix was built
  std::vector<RelationResult> results;
  bool all_passed() const;
};

/// Builds T_1, T_(p^a) for a <= alpha_max and T_(pq) for distinct p, q in
/// `primes`, then checks multiplicativity, the prime-power recurrence for
/// a < alpha_max, every pairwise commutator and G-self-adjointness, all as
/// exact integer identities. `basis` must carry its Gram matrix.
RelationsReport hecke_relations_check(const HarmonicBasis& basis, std::span<const std::int64_t> primes,
                                      int alpha_max, unsigned threads = 1);
RelationsReport hecke_relations_check(int n, std::span<const std::int64_t> primes, int alpha_max,
                                      unsigned threads = 1);

/// T_M T_N = T_(MN) for coprime M, N, at the unscaled level: A_M A_N = 8 A_(MN).
bool product_relation(const HeckeMatrix& am, const HeckeMatrix& an, const HeckeMatrix& amn);
/// T_(p^(a+1)) = T_(p^a) T_p - p T_(p^(a-1)), i.e.
/// A_(p^(a+1)) = A_(p^a) A_p / 8 - p^(n+1) A_(p^(a-1)).
bool recurrence_relation(const HeckeMatrix& next, const HeckeMatrix& cur, const HeckeMatrix& ap,
                         const HeckeMatrix& prev, std::int64_t p);
bool commutes(const HeckeMatrix& a, const HeckeMatrix& b);

/// Exact G A = A^T G.
bool selfadjoint_check(const HarmonicBasis& basis, const HeckeMatrix& a);
bool selfadjoint_check(int n, std::int64_t N, unsigned threads = 1);

/// True iff the exact T_1 matrix vanishes. Requires n odd.
bool t1_vanishing(int n);

}  // namespace hs
