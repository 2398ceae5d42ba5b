#include "hecke_sphere/theta.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/zonal.hpp"

namespace hs {

namespace {

void require_even(int n) {
  if (n < 0 || n % 2) throw DomainError("theta coefficients require even n >= 0");
}

mpz_class mpz_pow(const mpz_class& base, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// k^(n/2) U_n(w / (2 sqrt(k s))) * (2 sqrt(s))^n  =  sum_{j even} a_j w^j k^((n-j)/2) (4 s)^((n-j)/2)
// is an integer; here s = N_x N_y and w = tr(m q_x conj(q_y)).
mpz_class scaled_kernel(const std::vector<mpz_class>& a, int n, const mpz_class& w, const mpz_class& k,
                        const mpz_class& four_s) {
  mpz_class total = 0, wp = 1;
  const mpz_class w2 = w * w;
  for (int j = 0; j <= n; j += 2) {
    if (a[static_cast<std::size_t>(j)] != 0)
      total += a[static_cast<std::size_t>(j)] * wp * mpz_pow(k * four_s, static_cast<unsigned long>((n - j) / 2));
    wp *= w2;
  }
  return total;
}

}  // namespace

ThetaCoefficient theta_coefficient(int n, const Quaternion& qx, const Quaternion& qy, std::int64_t k) {
  require_even(n);
  if (k < 1) throw DomainError("theta coefficient index must be positive (F_n has no constant term)");
  const std::int64_t nx = qx.norm(), ny = qy.norm();
  if (nx == 0 || ny == 0) throw DomainError("theta points must be nonzero quaternions");
  const Quaternion p = quat_mul(qx, qy.conjugate());
  std::map<std::int64_t, std::int64_t> hist;
  for (const auto& m : enumerate_shell(k, Parity::integral).elements) ++hist[quat_mul(m, p).trace()];

  ThetaCoefficient out;
  out.n = n;
  out.k = k;
  out.x = qx;
  out.y = qy;
  const auto& a = chebyshev_U_coefficients(n);
  const mpz_class s = mpz_class(static_cast<long>(nx)) * static_cast<long>(ny);
  mpz_class num = 0;
  for (const auto& [w, cnt] : hist) num += static_cast<long>(cnt) * scaled_kernel(a, n, mpz_class(static_cast<long>(w)), mpz_class(static_cast<long>(k)), 4 * s);
  out.value = mpq_class(num, mpz_pow(4 * s, static_cast<unsigned long>(n / 2)));
  out.value.canonicalize();

  const double kp = std::pow(static_cast<double>(k), n / 2.0);
  const double root = 2.0 * std::sqrt(static_cast<double>(k) * s.get_d());
  for (const auto& [w, cnt] : hist) {
    const double t = std::clamp(static_cast<double>(w) / root, -1.0, 1.0);
    const double term = static_cast<double>(cnt) * kp * chebyshev_U(n, t).value;
    out.float_value += term;
    out.magnitude += std::fabs(term);
  }
  return out;
}

std::vector<mpz_class> diagonal_theta_coefficients(int n, std::int64_t K) {
  require_even(n);
  if (K < 1) return {};
  const auto r3 = three_square_counts(K, Parity::integral);
  const auto& a = chebyshev_U_coefficients(n);
  std::vector<mpz_class> out(static_cast<std::size_t>(K));
  // At x = y, tr(m x conj(x)) = tr(m) = 2 m1 and k^(n/2) U_n(m1/sqrt k) = sum_j a_j m1^j k^((n-j)/2).
  std::vector<mpz_class> kp(static_cast<std::size_t>(n / 2 + 1));
  for (std::int64_t k = 1; k <= K; ++k) {
    kp[0] = 1;
    for (std::size_t h = 1; h < kp.size(); ++h) kp[h] = kp[h - 1] * static_cast<long>(k);
    mpz_class total = 0;
    for (std::int64_t m1 = 0; m1 * m1 <= k; ++m1) {
      const std::int64_t rest = r3[static_cast<std::size_t>(k - m1 * m1)];
      if (rest == 0) continue;
      mpz_class poly = 0, mp = 1;
      for (int j = 0; j <= n; j += 2) {
        if (a[static_cast<std::size_t>(j)] != 0) poly += a[static_cast<std::size_t>(j)] * mp * kp[static_cast<std::size_t>((n - j) / 2)];
        mp *= static_cast<long>(m1 * m1);
      }
      total += poly * static_cast<long>(rest * (m1 ? 2 : 1));
    }
    out[static_cast<std::size_t>(k - 1)] = std::move(total);
  }
  return out;
}

std::vector<mpz_class> diagonal_coset_coefficients_scaled(int n, std::int64_t K) {
  require_even(n);
  if (K < 1) return {};
  const auto r3 = three_square_counts(4 * K, Parity::coset);
  const auto& a = chebyshev_U_coefficients(n);
  std::vector<mpz_class> out(static_cast<std::size_t>(K));
  // 2^n k^(n/2) U_n(c1/(2 sqrt k)) = sum_j a_j c1^j (4k)^((n-j)/2) for odd doubled c1.
  std::vector<mpz_class> kp(static_cast<std::size_t>(n / 2 + 1));
  for (std::int64_t k = 1; k <= K; k += 2) {
    kp[0] = 1;
    for (std::size_t h = 1; h < kp.size(); ++h) kp[h] = kp[h - 1] * static_cast<long>(4 * k);
    mpz_class total = 0;
    for (std::int64_t c1 = 1; c1 * c1 <= 4 * k; c1 += 2) {
      const std::int64_t rest = r3[static_cast<std::size_t>(4 * k - c1 * c1)];
      if (rest == 0) continue;
      mpz_class poly = 0, cp = 1;
      for (int j = 0; j <= n; j += 2) {
        if (a[static_cast<std::size_t>(j)] != 0) poly += a[static_cast<std::size_t>(j)] * cp * kp[static_cast<std::size_t>((n - j) / 2)];
        cp *= static_cast<long>(c1 * c1);
      }
      total += poly * static_cast<long>(2 * rest);
    }
    out[static_cast<std::size_t>(k - 1)] = -total;
  }
  return out;
}

mpq_class coset_coefficient_exact(int n, std::int64_t k) {
  require_even(n);
  if (k < 1) throw DomainError("coset coefficient index must be positive");
  if (k % 2 == 0) return 0;
  mpq_class v(diagonal_coset_coefficients_scaled(n, k).back(), mpz_pow(2, static_cast<unsigned long>(n)));
  v.canonicalize();
  return v;
}

double coset_coefficient(int n, const Quaternion& qx, std::int64_t k) {
  if (qx.norm() == 0) throw DomainError("coset coefficient point must be nonzero");
  return coset_coefficient_exact(n, k).get_d();
}

template <class T>
std::vector<T> basis_values_at(const HarmonicBasis& basis, const Quaternion& q) {
  require_even(basis.n);
  const std::int64_t N = q.norm();
  if (N == 0) throw DomainError("basis values need a nonzero quaternion");
  std::array<mpq_class, 4> p;
  for (int i = 0; i < 4; ++i) p[static_cast<std::size_t>(i)] = mpq_class(static_cast<long>(q.doubled(i)), 2);
  const mpq_class inv(1, mpz_pow(mpz_class(static_cast<long>(N)), static_cast<unsigned long>(basis.n / 2)));
  std::vector<T> out;
  out.reserve(basis.dim());
  for (const auto& b : basis.basis) out.push_back(real_from<T>(mpq_class(b.evaluate(std::span<const mpq_class, 4>(p)) * inv)));
  return out;
}

template std::vector<double> basis_values_at<double>(const HarmonicBasis&, const Quaternion&);
template std::vector<Quad> basis_values_at<Quad>(const HarmonicBasis&, const Quaternion&);

template <class T>
T spectral_coefficient(const SpectralDecompositionT<T>& dec, std::span<const T> basis_x, std::span<const T> basis_y,
                       std::int64_t k) {
  if (k < 1) throw DomainError("spectral coefficient index must be positive");
  const std::vector<T> fx = dec.eigenfunction_values(basis_x);
  const std::vector<T> fy = dec.eigenfunction_values(basis_y);
  const std::vector<T> lam = dec.eigenvalues(k);
  T s = 0;
  for (std::size_t j = 0; j < fx.size(); ++j) s += fx[j] * fy[j] * lam[j];
  const T kp = real_from<T>(mpq_class(mpz_pow(mpz_class(static_cast<long>(k)), static_cast<unsigned long>(dec.n / 2))));
  return s * kp * 8 / (dec.n + 1);
}

template double spectral_coefficient<double>(const SpectralDecompositionT<double>&, std::span<const double>,
                                             std::span<const double>, std::int64_t);
template Quad spectral_coefficient<Quad>(const SpectralDecompositionT<Quad>&, std::span<const Quad>,
                                         std::span<const Quad>, std::int64_t);

double theta_tail_bound(int n, std::int64_t K, double abs_q) {
  if (!(abs_q > 0 && abs_q < 1)) throw DomainError("tail bound needs 0 < |q| < 1");
  // log g(k) with g(k) = 24 (n+1) k^(n/2+1) (1 + ln k) |q|^k; g(k+1)/g(k) <= ((k+1)/k)^(n/2+2) |q|.
  const double lq = std::log(abs_q);
  auto log_g = [&](double k) {
    return std::log(24.0 * (n + 1)) + (n / 2.0 + 1) * std::log(k) + std::log1p(std::log(k)) + k * lq;
  };
  double log_sum = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = std::max<std::int64_t>(K + 1, 1);; ++k) {
    const double kd = static_cast<double>(k);
    const double log_ratio = (n / 2.0 + 2) * std::log1p(1.0 / kd) + lq;
    if (log_ratio < 0.5 * lq) {
      log_sum = log_add_exp(log_sum, log_g(kd) - std::log1p(-std::exp(log_ratio)));
      break;
    }
    log_sum = log_add_exp(log_sum, log_g(kd));
  }
  return std::exp(log_sum);
}

ModularityResult modularity_check(int n, const Mat2& gamma, std::complex<double> z, std::int64_t K,
                                  const Quaternion& qx, const Quaternion& qy, double tail_target) {
  require_even(n);
  if (gamma.a * gamma.d - gamma.b * gamma.c != 1) throw DomainError("gamma must have determinant 1");
  if (gamma.c % 4 != 0) throw DomainError("gamma must lie in Gamma_0(4)");
  if (z.imag() < 0.5 - 1e-12) throw DomainError("test point needs Im z >= 1/2");
  if (K < 0) throw DomainError("cutoff must be nonnegative");

  ModularityResult res;
  res.n = n;
  res.gamma = gamma;
  res.z = z;
  const std::complex<double> cz_d = static_cast<double>(gamma.c) * z + static_cast<double>(gamma.d);
  res.gz = (static_cast<double>(gamma.a) * z + static_cast<double>(gamma.b)) / cz_d;
  const double two_pi = 2 * std::numbers::pi;
  const double q_z = std::exp(-two_pi * z.imag()), q_gz = std::exp(-two_pi * res.gz.imag());
  const double factor = std::pow(std::abs(cz_d), n + 2);
  auto tail = [&](std::int64_t k) { return theta_tail_bound(n, k, q_gz) + factor * theta_tail_bound(n, k, q_z); };
  if (K == 0) {
    K = 1;
    while (tail(K) >= tail_target) {
      if (K > 1000000) throw DomainError("no cutoff reaches the requested tail bound");
      K = K < 64 ? K + 1 : K + K / 8;
    }
  }
  res.cutoff = K;
  res.tail_bound = tail(K);

  // x = y exactly when q_x conj(q_y) is a positive real.
  const Quaternion p = quat_mul(qx, qy.conjugate());
  const bool diagonal = p.doubled(1) == 0 && p.doubled(2) == 0 && p.doubled(3) == 0 && p.doubled(0) > 0;
  std::vector<double> c(static_cast<std::size_t>(K));
  bool all_zero = true;
  if (diagonal) {
    const auto exact = diagonal_theta_coefficients(n, K);
    for (std::size_t i = 0; i < exact.size(); ++i) {
      c[i] = exact[i].get_d();
      all_zero = all_zero && exact[i] == 0;
    }
  } else {
    for (std::int64_t k = 1; k <= K; ++k) {
      const auto tc = theta_coefficient(n, qx, qy, k);
      c[static_cast<std::size_t>(k - 1)] = tc.value.get_d();
      all_zero = all_zero && tc.value == 0;
    }
  }

  auto evaluate = [&](std::complex<double> w, double* max_term) {
    std::complex<double> sum = 0;
    for (std::int64_t k = K; k >= 1; --k) {
      const std::complex<double> e = std::exp(std::complex<double>(0, two_pi * static_cast<double>(k)) * w);
      const std::complex<double> term = c[static_cast<std::size_t>(k - 1)] * e;
      if (max_term) *max_term = std::max(*max_term, std::abs(term));
      sum += term;
    }
    return sum;
  };
  double max_term = 0;
  res.f_z = evaluate(z, &max_term);
  res.f_gz = evaluate(res.gz, nullptr);
  if (all_zero) {
    res.identically_zero = true;
    res.residual = 0;
    return res;
  }
  if (std::abs(res.f_z) < 1e-3 * max_term) throw DomainError("ill-conditioned test point: |F(z)| is tiny against its terms");
  res.residual = std::abs(res.f_gz - std::pow(cz_d, n + 2) * res.f_z) / std::abs(res.f_z);
  return res;
}

template <class T>
T log_upper_gamma(int s, T a) {
  if (s < 1) throw DomainError("upper incomplete gamma needs integer s >= 1");
  // Gamma(t+1, a) = t Gamma(t, a) + a^t e^(-a)
  T l = -a;
  const T la = real_log(a);
  for (int t = 1; t < s; ++t) l = log_add_exp(real_log(static_cast<T>(t)) + l, static_cast<T>(t) * la - a);
  return l;
}

template double log_upper_gamma<double>(int, double);
template Quad log_upper_gamma<Quad>(int, Quad);

namespace {

template <class T>
PeterssonEstimate petersson_impl(int n, std::int64_t K) {
  const T ninf = -std::numeric_limits<double>::infinity();
  const T pi = static_cast<T>(std::numbers::pi);
  const T pi_q = sizeof(T) > sizeof(double) ? static_cast<T>(M_PIq) : pi;
  const T sqrt3 = real_sqrt(static_cast<T>(3));
  const T log2 = real_log(static_cast<T>(2));
  const auto c = diagonal_theta_coefficients(n, K);
  const auto d = diagonal_coset_coefficients_scaled(n, K);

  T log_i1 = ninf, log_i2 = ninf;
  for (std::int64_t k = 1; k <= K; ++k) {
    const T kk = static_cast<T>(k);
    const T a = pi_q * sqrt3 * kk;  // 2 pi k * sqrt(3)/2
    const T strip = log_upper_gamma<T>(n + 1, a) - static_cast<T>(n + 1) * real_log(2 * pi_q * kk);
    const auto& ck = c[static_cast<std::size_t>(k - 1)];
    const auto& dk = d[static_cast<std::size_t>(k - 1)];
    if (ck != 0) log_i1 = log_add_exp(log_i1, 2 * log_abs<T>(ck) + strip);
    if (dk != 0) log_i2 = log_add_exp(log_i2, 2 * (log_abs<T>(dk) - static_cast<T>(n) * log2) + strip);
  }

  PeterssonEstimate est;
  est.n = n;
  est.cutoff = K;
  est.extended = sizeof(T) > sizeof(double);
  const T log_total = log_add_exp(log_i1, log_i2);
  est.log_i1 = static_cast<double>(log_i1);
  est.log_i2 = static_cast<double>(log_i2);
  const T log_rho = static_cast<T>(n) * real_log(4 * pi_q) - real_lgamma(static_cast<T>(n + 2)) -
                    static_cast<T>(n + 1) * log2 + log_total;
  est.log_rho = static_cast<double>(log_rho);
  est.rho = log_total == ninf ? 0.0 : static_cast<double>(real_exp(log_rho));

  // Tail over k > K for both cusps: |coefficient| <= k^(n/2) (n+1) 24 k (1 + ln k) and
  // Gamma(n+1, x) <= x^n e^(-x) / (1 - n/x) for x > n. Successive terms shrink by at
  // most ((k+1)/k)^(n+3) e^(-pi sqrt 3).
  const double kk = static_cast<double>(K + 1);
  const double x = std::numbers::pi * std::sqrt(3.0) * kk;
  const double log_term = std::log(2.0) + 2 * std::log(24.0 * (n + 1)) + 2 * std::log(kk) + 2 * std::log1p(std::log(kk)) +
                          n * std::log(kk) + n * std::log(x) - x - std::log1p(-n / x) -
                          (n + 1) * std::log(2 * std::numbers::pi * kk);
  const double log_ratio = (n + 3) * std::log1p(1.0 / kk) - std::numbers::pi * std::sqrt(3.0);
  const double log_tail = log_term - std::log1p(-std::exp(log_ratio));
  est.relative_tail = log_total == ninf ? std::exp(log_tail) : std::exp(log_tail - static_cast<double>(log_total));
  return est;
}

}  // namespace

PeterssonEstimate petersson_estimate(int n, std::int64_t K, Precision precision) {
  require_even(n);
  if (K < std::max<std::int64_t>(10 * n, 1))
    throw DomainError("the tail certificate needs cutoff K >= 10 n (and K >= 1)");
  return precision == Precision::extended ? petersson_impl<Quad>(n, K) : petersson_impl<double>(n, K);
}

}  // namespace hs
