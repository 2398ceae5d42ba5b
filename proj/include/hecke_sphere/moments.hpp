#pragma once

// Pointwise moment statistics of Hecke eigenforms on S^3 over random grids,
// the pre-trace check at floating points, and power-law growth fits in n.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hecke_sphere/gon.hpp"
#include "hecke_sphere/harmonic.hpp"
#include "hecke_sphere/spectral.hpp"
#include "hecke_sphere/zonal.hpp"

namespace hs {

/// Evaluates every stored eigenfunction phi_j at floating points.
///
/// phi_j = sum_i v_ji b_i is expanded once into monomial coefficients (long
/// double accumulation), so each point costs one dense product with the
/// vector of degree-n monomials.
class EigenfunctionEvaluator {
 public:
  EigenfunctionEvaluator(const HarmonicBasis& basis, const SpectralDecomposition& dec);

  std::size_t count() const noexcept { return rows_; }
  std::size_t monomials() const noexcept { return cols_; }
  /// Space index of phi_j within the decomposition.
  std::size_t space_of(std::size_t j) const { return space_[j]; }

  /// out[j] = phi_j(x), out.size() == count().
  void evaluate(const Point4& x, std::vector<double>& out) const;
  /// Row b of `values` (stride count()) receives phi(points[b]).
  void evaluate_batch(const std::vector<Point4>& points, std::vector<double>& values) const;

 private:
  void monomial_values(const Point4& x, double* out) const;

  int n_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Exponent4> exps_;
  std::vector<double> coeff_;  // rows_ x cols_, row-major
  std::vector<std::size_t> space_;
};

/// Pseudo-uniform points on S^3: normalised Gaussian 4-vectors from mt19937_64(seed).
std::vector<Point4> sphere_grid(std::size_t count, std::uint64_t seed);

struct PretraceReport {
  int n = 0;
  std::size_t pairs = 0;
  std::uint64_t seed = 0;
  /// max |sum_j phi_j(x) phi_j(y) - (n+1) U_n(tr(x conj y)/2)|.
  double max_residual = 0;
  /// 1e-8 (n+1)^2.
  double tolerance = 0;
  bool passed = false;
};

/// Random unit pairs from mt19937_64(seed); the first pair has x = y.
PretraceReport pretrace_check(const HarmonicBasis& basis, const SpectralDecomposition& dec, std::size_t pairs,
                              std::uint64_t seed);

struct MomentStat {
  /// Best value on the grid and after refinement.
  double grid_value = 0, value = 0;
  Point4 grid_point{}, point{};
};

struct MomentReport {
  int n = 0;
  std::size_t grid_size = 0;
  std::uint64_t seed = 0;
  int refine_steps = 0;
  std::size_t flagged_spaces = 0, flagged_dim = 0;
  /// sup_x sum_{lambda(1)=1} (sum_{phi_j in V_lambda} phi_j(x)^2)^2.
  MomentStat family;
  /// sup_x sum'_j phi_j(x)^4 over eigenforms with lambda(1)=1.
  MomentStat fourth;
  /// max_j sup_x |phi_j(x)| over eigenforms with lambda(1)=1.
  MomentStat individual;
  /// max over grid points of |sum_all phi_j(x)^2 - (n+1)^2| / (n+1)^2.
  double closure_error = 0;
  /// sum_j' phi_j^4 <= family sum held at every grid point.
  bool fourth_below_family = true;
  /// (sum_{flagged} phi_j(x)^2)^2 / #flagged spaces at the family maximiser.
  double cauchy_schwarz_floor = 0;
};

/// Evaluates the eigenforms on `sphere_grid(grid_size, seed)`, takes the three
/// sups, and refines each by `refine_steps` rounds of coordinate ascent.
MomentReport moment_sweep(const HarmonicBasis& basis, const SpectralDecomposition& dec, std::size_t grid_size,
                          std::uint64_t seed, int refine_steps = 20, unsigned threads = 1);

struct GrowthFit {
  std::string stat;
  double slope = 0, intercept = 0;
  std::vector<double> residuals;
  /// The n actually fitted; statistics that vanish (no lambda(1)=1 space) are skipped.
  std::vector<int> used;
};

/// Log-log fits of sup_family, sup_fourth and sup_individual against n.
/// Throws DomainError when a statistic has fewer than 4 distinct usable n.
std::vector<GrowthFit> growth_fit(const std::vector<MomentReport>& reports);

}  // namespace hs
