#include "hecke_sphere/qmatrix.hpp"

#include <algorithm>

#include "hecke_sphere/error.hpp"

namespace hs {

template <class T>
ExactMatrix<T> ExactMatrix<T>::identity(std::size_t n) {
  ExactMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

template <class T>
ExactMatrix<T> ExactMatrix<T>::transpose() const {
  ExactMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

template <class T>
bool ExactMatrix<T>::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const T& v) { return v == 0; });
}

template <class T>
bool ExactMatrix<T>::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r + 1; c < cols_; ++c)
      if ((*this)(r, c) != (*this)(c, r)) return false;
  return true;
}

template <class T>
T ExactMatrix<T>::trace() const {
  T t = 0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

template <class T>
ExactMatrix<T>& ExactMatrix<T>::operator+=(const ExactMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DomainError("matrix shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

template <class T>
ExactMatrix<T>& ExactMatrix<T>::operator-=(const ExactMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DomainError("matrix shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

template <class T>
ExactMatrix<T>& ExactMatrix<T>::operator*=(const T& s) {
  for (auto& v : data_) v *= s;
  return *this;
}

template class ExactMatrix<mpz_class>;
template class ExactMatrix<mpq_class>;

ZMatrix operator*(const ZMatrix& a, const ZMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("matrix shape mismatch in product");
  ZMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const mpz_class& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        const mpz_class& bkj = b(k, j);
        if (bkj == 0) continue;
        mpz_addmul(out(i, j).get_mpz_t(), aik.get_mpz_t(), bkj.get_mpz_t());
      }
    }
  }
  return out;
}

QMatrix operator*(const QMatrix& a, const QMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("matrix shape mismatch in product");
  QMatrix out(a.rows(), b.cols());
  mpq_class t;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const mpq_class& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        const mpq_class& bkj = b(k, j);
        if (bkj == 0) continue;
        mpq_mul(t.get_mpq_t(), aik.get_mpq_t(), bkj.get_mpq_t());
        out(i, j) += t;
      }
    }
  }
  return out;
}

mpz_class common_denominator(const QMatrix& m) {
  mpz_class l = 1;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).get_den_mpz_t());
  return l;
}

ZMatrix to_integer(const QMatrix& m, const mpz_class& scale) {
  ZMatrix z(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const mpq_class& v = m(r, c);
      if (!mpz_divisible_p(scale.get_mpz_t(), v.get_den_mpz_t()))
        throw DomainError("scale does not clear a denominator");
      z(r, c) = v.get_num() * (scale / v.get_den());
    }
  }
  return z;
}

QMatrix to_rational(const ZMatrix& m) {
  QMatrix q(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) q(r, c) = m(r, c);
  return q;
}

LdlFactor ldl_decompose(const QMatrix& g) {
  const std::size_t n = g.rows();
  if (g.cols() != n) throw DomainError("LDL requires a square matrix");
  LdlFactor f{QMatrix::identity(n), std::vector<mpq_class>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    mpq_class d = g(j, j);
    for (std::size_t k = 0; k < j; ++k) {
      if (f.lower(j, k) == 0) continue;
      d -= f.lower(j, k) * f.lower(j, k) * f.diagonal[k];
    }
    if (d == 0) throw DomainError("zero pivot in LDL decomposition");
    f.diagonal[j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      mpq_class s = g(i, j);
      for (std::size_t k = 0; k < j; ++k) {
        if (f.lower(i, k) == 0 || f.lower(j, k) == 0) continue;
        s -= f.lower(i, k) * f.lower(j, k) * f.diagonal[k];
      }
      if (s != 0) f.lower(i, j) = s / d;
    }
  }
  return f;
}

QMatrix unit_lower_inverse(const QMatrix& l) {
  const std::size_t n = l.rows();
  QMatrix inv = QMatrix::identity(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j + 1; i < n; ++i) {
      mpq_class s = 0;
      for (std::size_t k = j; k < i; ++k) {
        if (l(i, k) == 0 || inv(k, j) == 0) continue;
        s -= l(i, k) * inv(k, j);
      }
      inv(i, j) = s;
    }
  }
  return inv;
}

std::string rational_to_string(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

mpq_class rational_from_string(const std::string& s) {
  mpq_class q;
  if (s.empty() || q.set_str(s, 10) != 0) throw DomainError("malformed rational '" + s + "'");
  if (q.get_den() == 0) throw DomainError("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

}  // namespace hs
