#pragma once

// Fourier coefficients of the theta kernel
//   F_n(x, y; z) = sum_m nr(m)^(n/2) U_n(tr(m x conj(y)) / (2 sqrt(nr m))) e(nr(m) z)
// and of its expansion at the cusp 1, modularity residuals, and the
// normalised Petersson-norm estimate.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "hecke_sphere/harmonic.hpp"
#include "hecke_sphere/quat.hpp"
#include "hecke_sphere/real.hpp"
#include "hecke_sphere/spectral.hpp"

namespace hs {

/// Coefficient of e(kz) in F_n at the unit points x = q_x / sqrt(N_x), y = q_y / sqrt(N_y).
struct ThetaCoefficient {
  int n = 0;
  std::int64_t k = 0;
  Quaternion x, y;
  mpq_class value;
  /// Direct floating summation over the shell.
  double float_value = 0;
  /// Sum of the absolute values of the floating terms.
  double magnitude = 0;
};

/// Exact coefficient for even n. Every Chebyshev power that occurs is even,
/// so the value is rational for any integral q_x, q_y.
ThetaCoefficient theta_coefficient(int n, const Quaternion& qx, const Quaternion& qy, std::int64_t k);

/// Exact coefficients c_1..c_K of F_n at x = y (independent of the point);
/// element k-1 holds c_k. Uses three-square counts rather than shells.
std::vector<mpz_class> diagonal_theta_coefficients(int n, std::int64_t K);

/// Coefficient of e(kz/2) in the expansion of G_n(z) = F_n(z/2) at the cusp 1,
/// for x = y. It does not depend on x; zero for even k.
mpq_class coset_coefficient_exact(int n, std::int64_t k);
double coset_coefficient(int n, const Quaternion& qx, std::int64_t k);
/// d_1..d_K scaled by 2^n to integers; element k-1 holds 2^n d_k.
std::vector<mpz_class> diagonal_coset_coefficients_scaled(int n, std::int64_t K);

/// b_i(q / sqrt(nr q)) for every basis element, exactly rounded. Requires even n.
template <class T>
std::vector<T> basis_values_at(const HarmonicBasis& basis, const Quaternion& q);

/// (8/(n+1)) sum_j phi_j(x) phi_j(y) lambda_j(k) k^(n/2).
template <class T>
T spectral_coefficient(const SpectralDecompositionT<T>& dec, std::span<const T> basis_x, std::span<const T> basis_y,
                       std::int64_t k);

struct Mat2 {
  std::int64_t a = 1, b = 0, c = 0, d = 1;
};

struct ModularityResult {
  int n = 0;
  Mat2 gamma;
  std::complex<double> z, gz;
  std::int64_t cutoff = 0;
  std::complex<double> f_z, f_gz;
  /// |F(gz) - (cz+d)^(n+2) F(z)| / |F(z)|; 0 when F vanishes identically.
  double residual = 0;
  /// Certified bound on the truncation error of the compared quantity.
  double tail_bound = 0;
  /// Every coefficient up to the cutoff is exactly zero.
  bool identically_zero = false;
};

/// Compares both sides of F_n(gamma z) = (cz+d)^(n+2) F_n(z) with K-term
/// truncations. K = 0 picks the smallest K whose certified tail is below
/// `tail_target`. Throws DomainError if gamma is not in Gamma_0(4), if
/// Im z < 1/2, or if |F(z)| is below 1e-3 of the largest series term.
ModularityResult modularity_check(int n, const Mat2& gamma, std::complex<double> z, std::int64_t K,
                                  const Quaternion& qx, const Quaternion& qy, double tail_target = 1e-8);

/// Bound on sum_{k > K} |c_k| |q|^k from |U_n| <= n+1 and r4(k) <= 24 k (1 + ln k).
double theta_tail_bound(int n, std::int64_t K, double abs_q);

struct PeterssonEstimate {
  int n = 0;
  std::int64_t cutoff = 0;
  /// Natural logarithms of the strip sums; -inf when a sum vanishes.
  double log_i1 = 0, log_i2 = 0;
  double log_rho = 0;
  double rho = 0;
  /// Certified bound on the omitted k > K part, relative to I1 + I2.
  double relative_tail = 0;
  bool extended = false;
};

/// I1 = sum_{k<=K} c_k^2 Gamma(n+1, 2 pi k sqrt(3)/2) / (2 pi k)^(n+1), I2 the
/// same over the coset coefficients, and
/// rho = (4 pi)^n / Gamma(n+2) 2^(-n-1) (I1 + I2), all in log space.
/// Requires even n and K >= max(10 n, 1).
PeterssonEstimate petersson_estimate(int n, std::int64_t K, Precision precision = Precision::standard);

/// log Gamma(s, a) for integer s >= 1 by the upward recurrence from Gamma(1, a) = e^(-a).
template <class T>
T log_upper_gamma(int s, T a);

}  // namespace hs
