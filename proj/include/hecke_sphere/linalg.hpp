#pragma once

// Dense floating linear algebra over double or binary128: symmetric
// eigendecomposition by Householder tridiagonalisation and implicit QL.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "hecke_sphere/real.hpp"

namespace hs {

/// Row-major square matrix.
template <class T>
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<T> a;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t size) : n(size), a(size * size, T(0)) {}
  T& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

template <class T>
struct SymmetricEigen {
  std::vector<T> values;  // ascending
  SquareMatrix<T> vectors;  // column k is the unit eigenvector of values[k]
};

template <class T>
T frobenius_norm(const SquareMatrix<T>& m) {
  T s = 0;
  for (const T& v : m.a) s += v * v;
  return real_sqrt(s);
}

template <class T>
std::vector<T> multiply(const SquareMatrix<T>& m, const std::vector<T>& v) {
  std::vector<T> out(m.n, T(0));
  for (std::size_t i = 0; i < m.n; ++i) {
    T s = 0;
    for (std::size_t j = 0; j < m.n; ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

template <class T>
T dot(const std::vector<T>& x, const std::vector<T>& y) {
  T s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

/// Eigendecomposition of the symmetric part of `m`.
template <class T>
SymmetricEigen<T> symmetric_eigen(const SquareMatrix<T>& m) {
  const std::size_t n = m.n;
  SquareMatrix<T> V(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) V(i, j) = (m(i, j) + m(j, i)) / 2;
  std::vector<T> d(n), e(n);
  if (n == 0) return {};

  // Householder reduction to tridiagonal form.
  for (std::size_t j = 0; j < n; ++j) d[j] = V(n - 1, j);
  for (std::size_t i = n - 1; i > 0; --i) {
    T scale = 0, h = 0;
    for (std::size_t k = 0; k < i; ++k) scale += real_abs(d[k]);
    if (scale == 0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = V(i - 1, j);
        V(i, j) = 0;
        V(j, i) = 0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      T f = d[i - 1];
      T g = real_sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0;
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        V(j, i) = f;
        g = e[j] + V(j, j) * f;
        for (std::size_t k = j + 1; k < i; ++k) {
          g += V(k, j) * d[k];
          e[k] += V(k, j) * f;
        }
        e[j] = g;
      }
      f = 0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const T hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k < i; ++k) V(k, j) -= (f * e[k] + g * d[k]);
        d[j] = V(i - 1, j);
        V(i, j) = 0;
      }
    }
    d[i] = h;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    V(n - 1, i) = V(i, i);
    V(i, i) = 1;
    const T h = d[i + 1];
    if (h != 0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = V(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        T g = 0;
        for (std::size_t k = 0; k <= i; ++k) g += V(k, i + 1) * V(k, j);
        for (std::size_t k = 0; k <= i; ++k) V(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) V(k, i + 1) = 0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = V(n - 1, j);
    V(n - 1, j) = 0;
  }
  V(n - 1, n - 1) = 1;
  e[0] = 0;

  // Implicit QL on the tridiagonal matrix.
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0;
  T f = 0, tst1 = 0;
  const T eps = real_epsilon<T>();
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, real_abs(d[l]) + real_abs(e[l]));
    std::size_t mm = l;
    while (mm < n) {
      if (real_abs(e[mm]) <= eps * tst1) break;
      ++mm;
    }
    if (mm > l) {
      do {
        T g = d[l];
        T p = (d[l + 1] - g) / (2 * e[l]);
        T r = real_hypot(p, T(1));
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const T dl1 = d[l + 1];
        T h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;
        p = d[mm];
        T c = 1, c2 = 1, c3 = 1, s = 0, s2 = 0;
        const T el1 = e[l + 1];
        for (std::size_t ii = mm; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = real_hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          for (std::size_t k = 0; k < n; ++k) {
            h = V(k, ii + 1);
            V(k, ii + 1) = s * V(k, ii) + c * h;
            V(k, ii) = c * V(k, ii) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (real_abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  SymmetricEigen<T> out;
  out.values.resize(n);
  out.vectors = SquareMatrix<T>(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = V(i, order[k]);
  }
  return out;
}

}  // namespace hs
