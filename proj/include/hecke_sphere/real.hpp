#pragma once

// Floating scalar support for the spectral code: IEEE double and binary128.

#include <gmpxx.h>
#include <quadmath.h>

#include <cmath>
#include <limits>
#include <utility>
#include <string>

namespace hs {

using Quad = __float128;

enum class Precision { standard, extended };

inline double real_sqrt(double x) { return std::sqrt(x); }
inline Quad real_sqrt(Quad x) { return sqrtq(x); }
inline double real_abs(double x) { return std::fabs(x); }
inline Quad real_abs(Quad x) { return fabsq(x); }
inline double real_hypot(double a, double b) { return std::hypot(a, b); }
inline Quad real_hypot(Quad a, Quad b) { return hypotq(a, b); }

inline double real_log(double x) { return std::log(x); }
inline Quad real_log(Quad x) { return logq(x); }
inline double real_exp(double x) { return std::exp(x); }
inline Quad real_exp(Quad x) { return expq(x); }
inline double real_log1p(double x) { return std::log1p(x); }
inline Quad real_log1p(Quad x) { return log1pq(x); }
inline double real_lgamma(double x) { return std::lgamma(x); }
inline Quad real_lgamma(Quad x) { return lgammaq(x); }

/// log(e^a + e^b) without overflow.
template <class T>
T log_add_exp(T a, T b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + real_log1p(real_exp(b - a));
}

template <class T>
constexpr T real_epsilon();
template <>
constexpr double real_epsilon<double>() {
  return 0x1p-52;
}
template <>
constexpr Quad real_epsilon<Quad>() {
  return static_cast<Quad>(0x1p-112);
}

template <class T>
T real_from(const mpq_class& q);

template <>
inline double real_from<double>(const mpq_class& q) {
  return q.get_d();
}

/// Rounds an exact rational to binary128 via a 3-term double expansion.
template <>
inline Quad real_from<Quad>(const mpq_class& q) {
  if (q == 0) return 0;
  mpf_class r(0, 256);
  r = q;
  Quad out = 0;
  for (int term = 0; term < 3; ++term) {
    double d = r.get_d();
    out += static_cast<Quad>(d);
    r -= d;
  }
  return out;
}

/// log|z| for an integer of any size; -inf for zero.
template <class T>
T log_abs(const mpz_class& z) {
  if (z == 0) return -std::numeric_limits<double>::infinity();
  const long bits = static_cast<long>(mpz_sizeinbase(z.get_mpz_t(), 2));
  const long shift = bits > 120 ? bits - 120 : 0;
  mpz_class top = abs(z);
  mpz_fdiv_q_2exp(top.get_mpz_t(), top.get_mpz_t(), static_cast<unsigned long>(shift));
  return real_log(real_from<T>(mpq_class(top))) + static_cast<T>(shift) * real_log(static_cast<T>(2));
}

inline std::string quad_to_string(Quad x) {
  char buf[64];
  quadmath_snprintf(buf, sizeof buf, "%.33Qe", x);
  return buf;
}

}  // namespace hs
