#pragma once

// Dense exact matrices over Z (mpz_class) and Q (mpq_class).

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

namespace hs {

template <class T>
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ExactMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ExactMatrix transpose() const;
  bool is_zero() const;
  bool is_symmetric() const;
  T trace() const;

  ExactMatrix& operator+=(const ExactMatrix& o);
  ExactMatrix& operator-=(const ExactMatrix& o);
  ExactMatrix& operator*=(const T& s);
  friend ExactMatrix operator+(ExactMatrix a, const ExactMatrix& b) { return a += b; }
  friend ExactMatrix operator-(ExactMatrix a, const ExactMatrix& b) { return a -= b; }
  friend ExactMatrix operator*(ExactMatrix a, const T& s) { return a *= s; }
  friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  template <class U>
  friend ExactMatrix<U> operator*(const ExactMatrix<U>& a, const ExactMatrix<U>& b);

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using ZMatrix = ExactMatrix<mpz_class>;
using QMatrix = ExactMatrix<mpq_class>;

ZMatrix operator*(const ZMatrix& a, const ZMatrix& b);
QMatrix operator*(const QMatrix& a, const QMatrix& b);

/// Least common multiple of all entry denominators.
mpz_class common_denominator(const QMatrix& m);
/// Entries times `scale`, which must clear every denominator.
ZMatrix to_integer(const QMatrix& m, const mpz_class& scale);
QMatrix to_rational(const ZMatrix& m);

/// Exact G = L D L^T for a symmetric matrix; L unit lower triangular.
struct LdlFactor {
  QMatrix lower;
  std::vector<mpq_class> diagonal;
};

/// Throws DomainError if a zero pivot appears.
LdlFactor ldl_decompose(const QMatrix& g);

/// Inverse of a unit lower-triangular matrix.
QMatrix unit_lower_inverse(const QMatrix& l);

/// "p/q" with q > 0, always including the denominator.
std::string rational_to_string(const mpq_class& q);
mpq_class rational_from_string(const std::string& s);

extern template class ExactMatrix<mpz_class>;
extern template class ExactMatrix<mpq_class>;

}  // namespace hs
