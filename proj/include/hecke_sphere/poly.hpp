#pragma once

// Sparse exact-rational homogeneous polynomials in four variables.

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "hecke_sphere/quat.hpp"

namespace hs {

using Exponent4 = std::array<int, 4>;
using Exponent3 = std::array<int, 3>;

/// Homogeneous polynomial of fixed degree; zero coefficients are never stored.
class Poly4 {
 public:
  using Terms = std::map<Exponent4, mpq_class>;

  explicit Poly4(int degree = 0);
  /// The monomial x^alpha.
  static Poly4 monomial(const Exponent4& alpha, const mpq_class& coeff = 1);

  int degree() const noexcept { return degree_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  /// Adds c * x^alpha. Throws DomainError if |alpha| differs from the degree.
  void add_term(const Exponent4& alpha, const mpq_class& c);
  mpq_class coeff(const Exponent4& alpha) const;

  Poly4& operator+=(const Poly4& other);
  Poly4& operator-=(const Poly4& other);
  Poly4& operator*=(const mpq_class& s);
  friend Poly4 operator*(const Poly4& a, const Poly4& b);
  friend bool operator==(const Poly4& a, const Poly4& b) = default;

  /// Euclidean Laplacian on R^4.
  Poly4 laplacian() const;

  mpq_class evaluate(std::span<const mpq_class, 4> p) const;
  double evaluate(std::span<const double, 4> p) const;

 private:
  int degree_;
  Terms terms_;
};

/// 4x4 integer matrix acting on column vectors, row-major.
using IntMat4 = std::array<std::array<std::int64_t, 4>, 4>;

/// Matrix of x -> m x (left multiplication by an integral quaternion).
IntMat4 left_mul_matrix(const Quaternion& m);

/// f(L x), exact.
Poly4 substitute_linear(const Poly4& f, const IntMat4& L);

/// f(m x) for an integral quaternion m.
Poly4 substitute_left_mul(const Poly4& f, const Quaternion& m);

/// Integral of x^alpha over S^3 against the uniform probability measure.
mpq_class monomial_sphere_integral(const Exponent4& alpha);

/// Integral of f g over S^3 against the uniform probability measure.
mpq_class sphere_inner(const Poly4& f, const Poly4& g);

/// Dense enumeration of the exponents of a fixed degree in 3 or 4 variables.
///
/// Exponents are listed in descending lexicographic order, e.g. for degree 1
/// in 3 variables: (1,0,0), (0,1,0), (0,0,1).
template <std::size_t Vars>
class MonomialIndex {
 public:
  using Exponent = std::array<int, Vars>;

  explicit MonomialIndex(int degree);

  int degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return exps_.size(); }
  const Exponent& operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<Exponent>& exponents() const noexcept { return exps_; }
  /// Position of an exponent of this degree.
  std::size_t index(const Exponent& e) const;

 private:
  int degree_;
  std::vector<Exponent> exps_;
  std::vector<std::size_t> lookup_;
};

using MonomialIndex3 = MonomialIndex<3>;
using MonomialIndex4 = MonomialIndex<4>;

/// Number of monomials of degree d in v variables, C(d+v-1, v-1).
std::size_t monomial_count(int degree, int vars);

}  // namespace hs
