#include "hecke_sphere/zonal.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "hecke_sphere/error.hpp"

namespace hs {

double chebyshev_U_recurrence(int n, double x) {
  if (n < 0) throw DomainError("Chebyshev degree must be nonnegative");
  double prev = 1.0, cur = 2.0 * x;
  if (n == 0) return prev;
  for (int j = 1; j < n; ++j) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

KernelValue chebyshev_U(int n, double x) {
  if (n < 0) throw DomainError("Chebyshev degree must be nonnegative");
  if (x == 1.0) return {static_cast<double>(n + 1), KernelRegime::capped};
  if (x == -1.0) return {(n % 2 ? -1.0 : 1.0) * (n + 1), KernelRegime::capped};
  if (std::fabs(x) > 1.0) return {chebyshev_U_recurrence(n, x), KernelRegime::recurrence};
  const double theta = std::acos(x);
  const double s = std::sin(theta);
  if (std::fabs(s) < kTrigSwitch) return {chebyshev_U_recurrence(n, x), KernelRegime::recurrence};
  return {std::sin((n + 1) * theta) / s, KernelRegime::trig};
}

mpq_class chebyshev_U(int n, const mpq_class& x) {
  if (n < 0) throw DomainError("Chebyshev degree must be nonnegative");
  mpq_class prev = 1, cur = 2 * x;
  if (n == 0) return prev;
  for (int j = 1; j < n; ++j) {
    mpq_class next = 2 * x * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

const std::vector<mpz_class>& chebyshev_U_coefficients(int n) {
  if (n < 0) throw DomainError("Chebyshev degree must be nonnegative");
  static std::mutex guard;
  static std::map<int, std::vector<mpz_class>> cache;
  std::lock_guard lock(guard);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  std::vector<mpz_class> prev{1}, cur{0, 2};
  if (n == 0) return cache.emplace(n, prev).first->second;
  for (int j = 1; j < n; ++j) {
    std::vector<mpz_class> next(cur.size() + 1, 0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2 * cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cache.emplace(n, cur).first->second;
}

double kernel_cap(int n, double x) {
  if (std::fabs(x) > 1.0) throw DomainError("kernel_cap requires |x| <= 1");
  const double one_minus = 1.0 - x * x;
  if (one_minus <= 0.0) return n + 1.0;
  return std::fmin(n + 1.0, 1.0 / std::sqrt(one_minus));
}

double pretrace_kernel(int n, const Point4& x, const Point4& y) {
  double nx = 0, ny = 0, t = 0;
  for (int i = 0; i < 4; ++i) {
    nx += x[i] * x[i];
    ny += y[i] * y[i];
    t += x[i] * y[i];  // tr(x conj(y)) / 2 is the Euclidean inner product
  }
  if (std::fabs(nx - 1.0) > 1e-12 || std::fabs(ny - 1.0) > 1e-12)
    throw DomainError("pretrace_kernel requires unit quaternions");
  if (std::fabs(t) > 1.0 + 1e-9) throw DomainError("pretrace_kernel argument outside [-1, 1]");
  t = std::fmax(-1.0, std::fmin(1.0, t));
  return (n + 1) * chebyshev_U(n, t).value;
}

}  // namespace hs
