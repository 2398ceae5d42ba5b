#pragma once

// Chebyshev polynomials of the second kind and the zonal kernel of the
// degree-n eigenspace on S^3.

#include <gmpxx.h>

#include <array>
#include <vector>

namespace hs {

enum class KernelRegime { capped, trig, recurrence };

struct KernelValue {
  double value;
  KernelRegime regime;
};

/// Below this |sin(theta)| the trigonometric form switches to the recurrence.
inline constexpr double kTrigSwitch = 1e-6;

/// U_n(x). Trigonometric form for |x| <= 1 away from the endpoints, the
/// three-term recurrence otherwise, and the limit (+-1)^n (n+1) at x = +-1.
KernelValue chebyshev_U(int n, double x);

/// U_n(x) via the recurrence only.
double chebyshev_U_recurrence(int n, double x);

/// U_n(x) exactly.
mpq_class chebyshev_U(int n, const mpq_class& x);

/// Integer coefficients a_0..a_n with U_n(s) = sum_j a_j s^j.
const std::vector<mpz_class>& chebyshev_U_coefficients(int n);

/// min{n+1, (1-x^2)^(-1/2)}, taken as n+1 at x = +-1.
double kernel_cap(int n, double x);

using Point4 = std::array<double, 4>;

/// (n+1) U_n(tr(x conj(y)) / 2) for unit quaternions x, y.
///
/// Throws DomainError if either point is off the sphere by more than 1e-12 in
/// norm, or the argument leaves [-1, 1] by more than 1e-9.
double pretrace_kernel(int n, const Point4& x, const Point4& y);

}  // namespace hs
