#include "hecke_sphere/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/parallel.hpp"
#include "hecke_sphere/simd.hpp"

namespace hs {

namespace {

Point4 normalised(Point4 p) {
  const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
  for (auto& c : p) c /= r;
  return p;
}

constexpr std::size_t kBatch = 64;

struct PointStats {
  double family = 0, fourth = 0, individual = 0, closure = 0;
};

PointStats point_stats(const SpectralDecomposition& dec, const double* phi) {
  PointStats s;
  std::size_t j = 0;
  for (const auto& sp : dec.spaces) {
    double block = 0;
    for (std::size_t v = 0; v < sp.dim(); ++v, ++j) {
      const double sq = phi[j] * phi[j];
      s.closure += sq;
      if (!sp.t1_flag) continue;
      block += sq;
      s.fourth += sq * sq;
      s.individual = std::max(s.individual, std::fabs(phi[j]));
    }
    if (sp.t1_flag) s.family += block * block;
  }
  return s;
}

// Coordinate ascent on the sphere: each round tries +-h along every axis and
// halves h when nothing improves.
MomentStat refine(const std::function<double(const Point4&)>& f, const Point4& start, double start_value, int steps) {
  MomentStat st;
  st.grid_point = st.point = start;
  st.grid_value = st.value = start_value;
  double h = 0.05;
  for (int round = 0; round < steps; ++round) {
    bool improved = false;
    for (std::size_t axis = 0; axis < 4; ++axis) {
      for (double sign : {1.0, -1.0}) {
        Point4 trial = st.point;
        trial[axis] += sign * h;
        trial = normalised(trial);
        const double v = f(trial);
        if (v > st.value) {
          st.value = v;
          st.point = trial;
          improved = true;
        }
      }
    }
    if (!improved) h /= 2;
  }
  return st;
}

}  // namespace

EigenfunctionEvaluator::EigenfunctionEvaluator(const HarmonicBasis& basis, const SpectralDecomposition& dec)
    : n_(basis.n) {
  if (dec.n != basis.n) throw DomainError("decomposition and basis have different degrees");
  const MonomialIndex4 index(n_);
  exps_ = index.exponents();
  cols_ = exps_.size();
  rows_ = dec.total_dim();

  struct Term {
    std::size_t basis, mono;
    long double c;
  };
  std::vector<Term> terms;
  for (std::size_t i = 0; i < basis.dim(); ++i)
    for (const auto& [alpha, c] : basis.basis[i].terms())
      terms.push_back({i, index.index(alpha), static_cast<long double>(c.get_d())});

  coeff_.assign(rows_ * cols_, 0.0);
  std::vector<long double> row(cols_);
  std::size_t r = 0;
  for (std::size_t s = 0; s < dec.spaces.size(); ++s) {
    for (const auto& v : dec.spaces[s].vectors) {
      if (v.size() != basis.dim()) throw DomainError("eigenvector length differs from the basis dimension");
      std::fill(row.begin(), row.end(), 0.0L);
      for (const auto& t : terms) row[t.mono] += static_cast<long double>(v[t.basis]) * t.c;
      for (std::size_t c = 0; c < cols_; ++c) coeff_[r * cols_ + c] = static_cast<double>(row[c]);
      space_.push_back(s);
      ++r;
    }
  }
}

void EigenfunctionEvaluator::monomial_values(const Point4& x, double* out) const {
  std::array<std::vector<double>, 4> pw;
  for (std::size_t v = 0; v < 4; ++v) {
    pw[v].resize(static_cast<std::size_t>(n_) + 1);
    pw[v][0] = 1;
    for (int e = 1; e <= n_; ++e) pw[v][static_cast<std::size_t>(e)] = pw[v][static_cast<std::size_t>(e - 1)] * x[v];
  }
  for (std::size_t c = 0; c < cols_; ++c) {
    const auto& a = exps_[c];
    out[c] = pw[0][static_cast<std::size_t>(a[0])] * pw[1][static_cast<std::size_t>(a[1])] *
             pw[2][static_cast<std::size_t>(a[2])] * pw[3][static_cast<std::size_t>(a[3])];
  }
}

void EigenfunctionEvaluator::evaluate(const Point4& x, std::vector<double>& out) const {
  std::vector<double> mono(cols_);
  monomial_values(x, mono.data());
  out.resize(rows_);
  simd::gemv(coeff_.data(), rows_, cols_, cols_, mono.data(), out.data());
}

void EigenfunctionEvaluator::evaluate_batch(const std::vector<Point4>& points, std::vector<double>& values) const {
  std::vector<double> mono(points.size() * cols_);
  for (std::size_t b = 0; b < points.size(); ++b) monomial_values(points[b], mono.data() + b * cols_);
  values.resize(points.size() * rows_);
  simd::gemm_nt(coeff_.data(), rows_, cols_, cols_, mono.data(), points.size(), cols_, values.data(), rows_);
}

std::vector<Point4> sphere_grid(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Point4> out;
  out.reserve(count);
  while (out.size() < count) {
    Point4 p{g(rng), g(rng), g(rng), g(rng)};
    if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3] < 1e-20) continue;
    out.push_back(normalised(p));
  }
  return out;
}

PretraceReport pretrace_check(const HarmonicBasis& basis, const SpectralDecomposition& dec, std::size_t pairs,
                              std::uint64_t seed) {
  if (pairs == 0) throw DomainError("pre-trace check needs at least one pair");
  const EigenfunctionEvaluator ev(basis, dec);
  const auto pts = sphere_grid(2 * pairs, seed);
  PretraceReport rep;
  rep.n = basis.n;
  rep.pairs = pairs;
  rep.seed = seed;
  const double d = basis.n + 1;
  rep.tolerance = 1e-8 * d * d;
  std::vector<double> fx, fy;
  for (std::size_t p = 0; p < pairs; ++p) {
    const Point4& x = pts[2 * p];
    const Point4& y = p == 0 ? x : pts[2 * p + 1];
    ev.evaluate(x, fx);
    ev.evaluate(y, fy);
    const double lhs = simd::dot(fx, fy);
    rep.max_residual = std::max(rep.max_residual, std::fabs(lhs - pretrace_kernel(basis.n, x, y)));
  }
  rep.passed = rep.max_residual <= rep.tolerance;
  return rep;
}

MomentReport moment_sweep(const HarmonicBasis& basis, const SpectralDecomposition& dec, std::size_t grid_size,
                          std::uint64_t seed, int refine_steps, unsigned threads) {
  if (grid_size == 0) throw DomainError("moment sweep needs a nonempty grid");
  if (basis.n % 2) throw DomainError("moment sweep requires even n");
  const EigenfunctionEvaluator ev(basis, dec);
  const auto grid = sphere_grid(grid_size, seed);

  MomentReport rep;
  rep.n = basis.n;
  rep.grid_size = grid_size;
  rep.seed = seed;
  rep.refine_steps = refine_steps;
  for (const auto& sp : dec.spaces)
    if (sp.t1_flag) {
      ++rep.flagged_spaces;
      rep.flagged_dim += sp.dim();
    }

  std::vector<PointStats> stats(grid.size());
  const std::size_t batches = (grid.size() + kBatch - 1) / kBatch;
  parallel_for(batches, threads, [&](std::size_t b) {
    const std::size_t lo = b * kBatch, hi = std::min(grid.size(), lo + kBatch);
    std::vector<Point4> pts(grid.begin() + static_cast<std::ptrdiff_t>(lo), grid.begin() + static_cast<std::ptrdiff_t>(hi));
    std::vector<double> vals;
    ev.evaluate_batch(pts, vals);
    for (std::size_t i = lo; i < hi; ++i) stats[i] = point_stats(dec, vals.data() + (i - lo) * ev.count());
  });

  const double full = static_cast<double>(basis.n + 1) * (basis.n + 1);
  std::size_t best_family = 0, best_fourth = 0, best_individual = 0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    rep.closure_error = std::max(rep.closure_error, std::fabs(stats[i].closure - full) / full);
    if (stats[i].fourth > stats[i].family * (1 + 1e-12)) rep.fourth_below_family = false;
    if (stats[i].family > stats[best_family].family) best_family = i;
    if (stats[i].fourth > stats[best_fourth].fourth) best_fourth = i;
    if (stats[i].individual > stats[best_individual].individual) best_individual = i;
  }

  auto objective = [&](double PointStats::*field) {
    return [&ev, &dec, field](const Point4& x) {
      std::vector<double> phi;
      ev.evaluate(x, phi);
      return point_stats(dec, phi.data()).*field;
    };
  };
  rep.family = refine(objective(&PointStats::family), grid[best_family], stats[best_family].family, refine_steps);
  rep.fourth = refine(objective(&PointStats::fourth), grid[best_fourth], stats[best_fourth].fourth, refine_steps);
  rep.individual = refine(objective(&PointStats::individual), grid[best_individual], stats[best_individual].individual,
                          refine_steps);

  if (rep.flagged_spaces) {
    std::vector<double> phi;
    ev.evaluate(rep.family.point, phi);
    double flagged = 0;
    for (std::size_t j = 0; j < phi.size(); ++j)
      if (dec.spaces[ev.space_of(j)].t1_flag) flagged += phi[j] * phi[j];
    rep.cauchy_schwarz_floor = flagged * flagged / static_cast<double>(rep.flagged_spaces);
  }
  return rep;
}

std::vector<GrowthFit> growth_fit(const std::vector<MomentReport>& reports) {
  const std::pair<const char*, MomentStat MomentReport::*> stats[] = {
      {"sup_family", &MomentReport::family},
      {"sup_fourth", &MomentReport::fourth},
      {"sup_individual", &MomentReport::individual},
  };
  std::vector<GrowthFit> out;
  for (const auto& [name, member] : stats) {
    std::vector<double> xs, ys;
    GrowthFit fit;
    fit.stat = name;
    std::set<int> distinct;
    for (const auto& r : reports) {
      const double v = (r.*member).value;
      if (r.n <= 0 || !(v > 0)) continue;
      xs.push_back(r.n);
      ys.push_back(v);
      fit.used.push_back(r.n);
      distinct.insert(r.n);
    }
    if (distinct.size() < 4) throw DomainError(std::string("growth fit of ") + name + " needs at least 4 distinct n");
    const LogLogFit f = loglog_fit(xs, ys);
    fit.slope = f.slope;
    fit.intercept = f.intercept;
    fit.residuals = f.residuals;
    out.push_back(std::move(fit));
  }
  return out;
}

}  // namespace hs
