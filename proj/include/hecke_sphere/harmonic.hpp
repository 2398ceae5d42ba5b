#pragma once

// Harmonic homogeneous polynomials of degree n on R^4, i.e. the
// -n(n+2) eigenspace of the Laplacian on S^3.

#include <gmpxx.h>

#include <cstddef>
#include <vector>

#include "hecke_sphere/poly.hpp"
#include "hecke_sphere/qmatrix.hpp"

namespace hs {

/// Exact basis of ker(Laplacian) on degree-n polynomials.
///
/// Element j is the unique harmonic polynomial whose coefficients on the free
/// monomials (x1-exponent 0 or 1) are 1 at `pivots[j]` and 0 elsewhere; the
/// remaining coefficients follow from solving the Laplacian row by row in
/// powers of x1. Pivots are ordered: x1-exponent 0 first, then 1, each block in
/// MonomialIndex3 order of the remaining exponents.
struct HarmonicBasis {
  int n = 0;
  std::vector<Poly4> basis;
  std::vector<Exponent4> pivots;
  /// gram(i, j) = integral over S^3 of b_i b_j, probability measure.
  QMatrix gram;

  std::size_t dim() const noexcept { return basis.size(); }
  /// Parity class (bit i set iff exponent i odd) shared by every monomial of b_j.
  int parity_class(std::size_t j) const;
  /// Coordinates of a harmonic polynomial of degree n: its pivot coefficients.
  std::vector<mpq_class> coordinates(const Poly4& h) const;
};

/// Builds the basis and its Gram matrix; Gram columns are spread over `threads`.
HarmonicBasis harmonic_basis(int n, unsigned threads = 1);

/// Basis without the Gram matrix (cheap).
HarmonicBasis harmonic_basis_no_gram(int n);

/// Dimension of the degree-n harmonic space in 4 variables, (n+1)^2.
inline std::size_t harmonic_dimension(int n) {
  return static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1);
}

}  // namespace hs
