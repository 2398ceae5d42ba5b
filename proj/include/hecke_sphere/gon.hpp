#pragma once

// Geometry of numbers: the cylinder classes C(R) and D(R) = C(R) \ C(2R) of
// integral quaternions, lattice-point counts with their reference bounds,
// the sum A(X), and brute-force successive minima of 4-dimensional bodies.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hecke_sphere/quat.hpp"

namespace hs {

/// m2^2 + m3^2 + m4^2 <= nr(m) / R^2, decided in integers. R >= 1.
bool in_cylinder_class(const Quaternion& m, std::int64_t R);

/// True iff R is a positive power of two (1 included).
bool is_dyadic(std::int64_t R);

struct CountRecord {
  std::string family;
  /// Shell norm k for "single", lower end M of (M, 2M] for "dyadic".
  std::int64_t k_or_M = 0;
  std::int64_t R = 1;
  Parity parity = Parity::integral;
  std::int64_t count = 0;
  /// Reference right-hand side with the k^eps (or M^eps) factor included.
  double rhs = 0;
  /// constant * rhs once a constant has been fitted, else rhs.
  double bound = 0;
  double constant = 1;

  double ratio() const { return rhs > 0 ? static_cast<double>(count) / rhs : 0.0; }
};

/// Exponent folded into every reported right-hand side.
inline constexpr double kCountEpsilon = 0.1;

/// |{m in B(Z) : nr(m) = k, m in C(R)}| against (1 + k^(1/2)/R + k/R^3) k^eps.
CountRecord shell_class_count(std::int64_t k, std::int64_t R);

/// |{m in B(Z) : M < nr(m) <= 2M, m in C(R)}| against (M^(1/2) + M^2/R^3) M^eps.
CountRecord dyadic_class_count(std::int64_t M, std::int64_t R);

/// |{m : nr(m) = k, m in D(R)}|.
std::int64_t shell_dyadic_band_count(std::int64_t k, std::int64_t R);

/// Sets constant = max ratio over the records and bound = constant * rhs; returns the constant.
double fit_constant(std::vector<CountRecord>& records);

/// A(X) = sum_{k<=X} (sum_{nr m = k} min{n+1, sqrt(nr m / (m2^2+m3^2+m4^2))})^2,
/// with the summand n+1 when the imaginary part vanishes.
double a_of_x(int n, std::int64_t X);

/// A(1), ..., A(X); element X-1 holds A(X).
std::vector<double> a_of_x_series(int n, std::int64_t X);

/// Least-squares slope and intercept of log y against log x.
struct LogLogFit {
  double slope = 0, intercept = 0;
  std::vector<double> residuals;
};
LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log A(X) against log X over the integers X in [lo, hi].
LogLogFit a_of_x_growth(int n, std::int64_t lo, std::int64_t hi);

/// Closed, convex, 0-symmetric body in R^4 with integral data.
///
/// Cylinder: x1^2 <= 2M and x2^2 + x3^2 + x4^2 <= 2M / R^2.
/// Box: |x_i| <= h_i.
struct Body {
  enum class Kind { cylinder, box };
  Kind kind = Kind::box;
  std::int64_t M = 1, R = 1;
  std::array<std::int64_t, 4> half{1, 1, 1, 1};

  static Body cylinder(std::int64_t M, std::int64_t R);
  static Body box(std::array<std::int64_t, 4> half);

  double volume() const;
  /// Half-widths of the axis-parallel bounding box.
  std::array<double, 4> extent() const;
  /// Squared gauge of an integer point as an exact fraction num / den.
  std::pair<mpz_class, mpz_class> gauge_squared(const std::array<std::int64_t, 4>& x) const;
  std::string describe() const;
};

using IntMatrix4 = std::array<std::array<std::int64_t, 4>, 4>;

/// Lattice B Z^4 with the basis vectors as columns of B.
struct Lattice4 {
  IntMatrix4 basis{};
  /// |det B|. Throws DomainError if B is singular.
  std::int64_t covolume() const;
  /// x lies in B Z^4.
  bool contains(const std::array<std::int64_t, 4>& x) const;
};

struct SuccessiveMinima {
  std::array<double, 4> lambda{};
  /// lambda_i^2 exactly.
  std::array<mpq_class, 4> lambda_squared;
  /// The linearly independent lattice vectors attaining the minima.
  std::array<std::array<std::int64_t, 4>, 4> vectors{};
  /// Integer points inspected.
  long long visited = 0;

  double product() const { return lambda[0] * lambda[1] * lambda[2] * lambda[3]; }
};

inline constexpr long long kEnumerationBudget = 10'000'000;

/// Lattice points are enumerated in growing dilates t K, sorted by exact
/// gauge, and accepted greedily when they raise the exact rank. Throws
/// BudgetError past `budget` inspected points.
SuccessiveMinima successive_minima(const Lattice4& lattice, const Body& body, long long budget = kEnumerationBudget);

/// |K cap Lambda| including the origin.
std::int64_t lattice_point_count(const Lattice4& lattice, const Body& body, long long budget = kEnumerationBudget);

struct ProductBoundResult {
  std::int64_t count = 0;
  double bound = 0;
  SuccessiveMinima minima;
  bool holds = false;
};

/// |K cap Lambda| <= prod_i (1 + 2 i / lambda_i).
ProductBoundResult product_bound_check(const Lattice4& lattice, const Body& body, long long budget = kEnumerationBudget);

struct MinkowskiResult {
  double normalised = 0;  // lambda_1...lambda_4 vol(K) / covol
  double lower = 16.0 / 24.0, upper = 16.0;
  bool holds = false;
};

/// 2^4 / 4! <= lambda_1 ... lambda_4 vol(K) / covol <= 2^4.
MinkowskiResult minkowski_check(const Lattice4& lattice, const Body& body, const SuccessiveMinima& minima);

/// Exact rank of up to four integer vectors.
int integer_rank(const std::vector<std::array<std::int64_t, 4>>& vectors);

struct GonInstance {
  Lattice4 lattice;
  Body body;
};

/// Reproducible random instances: integer bases with entries in [-3, 3] and
/// covolume in [1, 40], cylinders with M in [4, 64] and R in {1, 2, 4}.
std::vector<GonInstance> random_gon_instances(std::size_t count, std::uint64_t seed);

}  // namespace hs
