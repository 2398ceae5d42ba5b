#include "hecke_sphere/gon.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "hecke_sphere/error.hpp"

namespace hs {

namespace {

// Three-square counts r3(s) for s <= limit, grown on demand and shared.
std::shared_ptr<const std::vector<std::int64_t>> r3_table(std::int64_t limit) {
  static std::mutex guard;
  static std::shared_ptr<const std::vector<std::int64_t>> table;
  std::lock_guard lock(guard);
  if (!table || static_cast<std::int64_t>(table->size()) <= limit) {
    const std::int64_t grown = std::max<std::int64_t>(limit, table ? 2 * static_cast<std::int64_t>(table->size()) : 64);
    table = std::make_shared<const std::vector<std::int64_t>>(three_square_counts(grown, Parity::integral));
  }
  return table;
}

void require_dyadic(std::int64_t R) {
  if (!is_dyadic(R)) throw DomainError("R must be a power of two >= 1");
}

// Quaternions of norm k in C(R): m1^2 + s = k with s R^2 <= k, s the imaginary square sum.
std::int64_t class_count(std::int64_t k, std::int64_t R, const std::vector<std::int64_t>& r3) {
  std::int64_t total = 0;
  const __int128 R2 = static_cast<__int128>(R) * R;
  for (std::int64_t m1 = 0; m1 * m1 <= k; ++m1) {
    const std::int64_t s = k - m1 * m1;
    if (s * R2 > k) continue;
    total += (m1 ? 2 : 1) * r3[static_cast<std::size_t>(s)];
  }
  return total;
}

double single_rhs(std::int64_t k, std::int64_t R) {
  const double kd = static_cast<double>(k), Rd = static_cast<double>(R);
  return (1 + std::sqrt(kd) / Rd + kd / (Rd * Rd * Rd)) * std::pow(kd, kCountEpsilon);
}

double dyadic_rhs(std::int64_t M, std::int64_t R) {
  const double Md = static_cast<double>(M), Rd = static_cast<double>(R);
  return (std::sqrt(Md) + Md * Md / (Rd * Rd * Rd)) * std::pow(Md, kCountEpsilon);
}

// Exact comparison key num / den with den > 0.
struct Key {
  __int128 num = 0, den = 1;
  friend bool operator<(const Key& a, const Key& b) { return a.num * b.den < b.num * a.den; }
};

Key gauge_key(const Body& body, const std::array<std::int64_t, 4>& x) {
  if (body.kind == Body::Kind::cylinder) {
    const __int128 re = static_cast<__int128>(x[0]) * x[0];
    const __int128 im = static_cast<__int128>(x[1]) * x[1] + static_cast<__int128>(x[2]) * x[2] +
                        static_cast<__int128>(x[3]) * x[3];
    const __int128 R2 = static_cast<__int128>(body.R) * body.R;
    return {std::max(re, R2 * im), 2 * static_cast<__int128>(body.M)};
  }
  Key best{0, 1};
  for (int i = 0; i < 4; ++i) {
    const Key k{static_cast<__int128>(x[static_cast<std::size_t>(i)]) * x[static_cast<std::size_t>(i)],
                static_cast<__int128>(body.half[static_cast<std::size_t>(i)]) * body.half[static_cast<std::size_t>(i)]};
    if (best < k) best = k;
  }
  return best;
}

mpz_class to_mpz(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  mpz_class hi(static_cast<unsigned long>(u >> 64)), lo(static_cast<unsigned long>(u & ~0ULL));
  mpz_class out = (hi << 64) + lo;
  return neg ? mpz_class(-out) : out;
}

std::int64_t det3(const IntMatrix4& b, int skip_row, int skip_col) {
  std::array<std::array<std::int64_t, 3>, 3> m{};
  for (int i = 0, r = 0; i < 4; ++i) {
    if (i == skip_row) continue;
    for (int j = 0, c = 0; j < 4; ++j) {
      if (j == skip_col) continue;
      m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c++)] = b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    ++r;
  }
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// x in B Z^4 iff adj(B) x = 0 mod det B.
struct Membership {
  IntMatrix4 adj{};
  std::int64_t det = 0;

  explicit Membership(const IntMatrix4& b) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const std::int64_t cof = ((i + j) % 2 ? -1 : 1) * det3(b, i, j);
        adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = cof;
      }
    }
    for (int j = 0; j < 4; ++j) det += b[0][static_cast<std::size_t>(j)] * adj[static_cast<std::size_t>(j)][0];
    if (det == 0) throw DomainError("lattice basis is singular");
  }

  bool operator()(const std::array<std::int64_t, 4>& x) const {
    for (const auto& row : adj) {
      const std::int64_t v = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
      if (v % det != 0) return false;
    }
    return true;
  }
};

// Visits every integer point of t K (t a dyadic rational, so the bounds are exact).
template <class Fn>
void for_each_point(const Body& body, double t, long long budget, long long& visited, Fn&& fn) {
  const auto e = body.extent();
  std::array<std::int64_t, 4> lim{};
  long double box = 1;
  for (std::size_t i = 0; i < 4; ++i) {
    lim[i] = static_cast<std::int64_t>(std::floor(t * e[i] + 1e-9));
    box *= 2.0L * static_cast<long double>(lim[i]) + 1;
  }
  if (static_cast<long double>(visited) + box > static_cast<long double>(budget))
    throw BudgetError("lattice enumeration budget exceeded", visited);
  const Key limit = [&] {
    // t^2 as an exact fraction of int128s: t = a / 2^s.
    int s = 0;
    double a = t;
    while (a != std::floor(a) && s < 60) {
      a *= 2;
      ++s;
    }
    const __int128 num = static_cast<__int128>(a) * static_cast<__int128>(a);
    return Key{num, static_cast<__int128>(1) << (2 * s)};
  }();
  std::array<std::int64_t, 4> x{};
  for (x[0] = -lim[0]; x[0] <= lim[0]; ++x[0])
    for (x[1] = -lim[1]; x[1] <= lim[1]; ++x[1])
      for (x[2] = -lim[2]; x[2] <= lim[2]; ++x[2])
        for (x[3] = -lim[3]; x[3] <= lim[3]; ++x[3]) {
          const Key g = gauge_key(body, x);
          if (limit < g) continue;
          fn(x, g);
        }
  visited += static_cast<long long>(box);
}

}  // namespace

bool is_dyadic(std::int64_t R) { return R >= 1 && (R & (R - 1)) == 0; }

bool in_cylinder_class(const Quaternion& m, std::int64_t R) {
  if (R < 1) throw DomainError("R must be >= 1");
  // doubled_imag_square / 4 <= nr / R^2.
  return static_cast<__int128>(m.doubled_imag_square()) * R * R <= 4 * static_cast<__int128>(m.norm());
}

CountRecord shell_class_count(std::int64_t k, std::int64_t R) {
  if (k < 1) throw DomainError("shell norm must be positive");
  require_dyadic(R);
  const auto r3 = r3_table(k);
  CountRecord rec;
  rec.family = "single";
  rec.k_or_M = k;
  rec.R = R;
  rec.count = class_count(k, R, *r3);
  rec.rhs = single_rhs(k, R);
  rec.bound = rec.rhs;
  return rec;
}

CountRecord dyadic_class_count(std::int64_t M, std::int64_t R) {
  if (M < 1) throw DomainError("M must be positive");
  require_dyadic(R);
  const auto r3 = r3_table(2 * M);
  CountRecord rec;
  rec.family = "dyadic";
  rec.k_or_M = M;
  rec.R = R;
  for (std::int64_t k = M + 1; k <= 2 * M; ++k) rec.count += class_count(k, R, *r3);
  rec.rhs = dyadic_rhs(M, R);
  rec.bound = rec.rhs;
  return rec;
}

std::int64_t shell_dyadic_band_count(std::int64_t k, std::int64_t R) {
  if (k < 1) throw DomainError("shell norm must be positive");
  require_dyadic(R);
  const auto r3 = r3_table(k);
  return class_count(k, R, *r3) - class_count(k, 2 * R, *r3);
}

double fit_constant(std::vector<CountRecord>& records) {
  double c = 0;
  for (const auto& r : records) c = std::max(c, r.ratio());
  for (auto& r : records) {
    r.constant = c;
    r.bound = c * r.rhs;
  }
  return c;
}

std::vector<double> a_of_x_series(int n, std::int64_t X) {
  if (n < 0) throw DomainError("n must be >= 0");
  if (X < 1) throw DomainError("A(X) needs X >= 1");
  const auto r3 = r3_table(X);
  const long double cap = n + 1;
  std::vector<double> out(static_cast<std::size_t>(X));
  long double total = 0;
  for (std::int64_t k = 1; k <= X; ++k) {
    long double inner = 0;
    for (std::int64_t m1 = 0; m1 * m1 <= k; ++m1) {
      const std::int64_t s = k - m1 * m1;
      const long double mult = m1 ? 2 : 1;
      if (s == 0) {
        inner += mult * cap;
      } else if ((*r3)[static_cast<std::size_t>(s)] != 0) {
        const long double ratio = std::sqrt(static_cast<long double>(k) / static_cast<long double>(s));
        inner += mult * static_cast<long double>((*r3)[static_cast<std::size_t>(s)]) * std::min(cap, ratio);
      }
    }
    total += inner * inner;
    out[static_cast<std::size_t>(k - 1)] = static_cast<double>(total);
  }
  return out;
}

double a_of_x(int n, std::int64_t X) { return a_of_x_series(n, X).back(); }

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("log-log fit needs at least two paired points");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw DomainError("log-log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0) throw DomainError("log-log fit needs two distinct abscissae");
  LogLogFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  for (std::size_t i = 0; i < x.size(); ++i) fit.residuals.push_back(ly[i] - fit.intercept - fit.slope * lx[i]);
  return fit;
}

LogLogFit a_of_x_growth(int n, std::int64_t lo, std::int64_t hi) {
  if (lo < 1 || hi <= lo) throw DomainError("A(X) growth needs 1 <= lo < hi");
  const auto series = a_of_x_series(n, hi);
  std::vector<double> xs, ys;
  for (std::int64_t X = lo; X <= hi; ++X) {
    xs.push_back(static_cast<double>(X));
    ys.push_back(series[static_cast<std::size_t>(X - 1)]);
  }
  return loglog_fit(xs, ys);
}

Body Body::cylinder(std::int64_t M, std::int64_t R) {
  if (M < 1 || R < 1) throw DomainError("cylinder needs M >= 1 and R >= 1");
  Body b;
  b.kind = Kind::cylinder;
  b.M = M;
  b.R = R;
  return b;
}

Body Body::box(std::array<std::int64_t, 4> half) {
  for (auto h : half)
    if (h < 1) throw DomainError("box half-widths must be positive integers");
  Body b;
  b.kind = Kind::box;
  b.half = half;
  return b;
}

double Body::volume() const {
  if (kind == Kind::cylinder) {
    const double a = std::sqrt(2.0 * static_cast<double>(M));
    const double r = a / static_cast<double>(R);
    return 2 * a * (4.0 / 3.0) * std::numbers::pi * r * r * r;
  }
  double v = 1;
  for (auto h : half) v *= 2.0 * static_cast<double>(h);
  return v;
}

std::array<double, 4> Body::extent() const {
  if (kind == Kind::cylinder) {
    const double a = std::sqrt(2.0 * static_cast<double>(M));
    const double r = a / static_cast<double>(R);
    return {a, r, r, r};
  }
  return {static_cast<double>(half[0]), static_cast<double>(half[1]), static_cast<double>(half[2]),
          static_cast<double>(half[3])};
}

std::pair<mpz_class, mpz_class> Body::gauge_squared(const std::array<std::int64_t, 4>& x) const {
  const Key k = gauge_key(*this, x);
  return {to_mpz(k.num), to_mpz(k.den)};
}

std::string Body::describe() const {
  std::ostringstream os;
  if (kind == Kind::cylinder)
    os << "cylinder(M=" << M << ",R=" << R << ")";
  else
    os << "box(" << half[0] << "," << half[1] << "," << half[2] << "," << half[3] << ")";
  return os.str();
}

std::int64_t Lattice4::covolume() const { return std::abs(Membership(basis).det); }

bool Lattice4::contains(const std::array<std::int64_t, 4>& x) const { return Membership(basis)(x); }

int integer_rank(const std::vector<std::array<std::int64_t, 4>>& vectors) {
  std::vector<std::array<mpz_class, 4>> m;
  for (const auto& v : vectors) m.push_back({v[0], v[1], v[2], v[3]});
  int rank = 0;
  for (std::size_t col = 0; col < 4 && static_cast<std::size_t>(rank) < m.size(); ++col) {
    std::size_t piv = static_cast<std::size_t>(rank);
    while (piv < m.size() && m[piv][col] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[static_cast<std::size_t>(rank)]);
    const auto& p = m[static_cast<std::size_t>(rank)];
    for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < m.size(); ++r) {
      if (m[r][col] == 0) continue;
      const mpz_class f = m[r][col];
      for (std::size_t c = 0; c < 4; ++c) m[r][c] = m[r][c] * p[col] - p[c] * f;
    }
    ++rank;
  }
  return rank;
}

SuccessiveMinima successive_minima(const Lattice4& lattice, const Body& body, long long budget) {
  const Membership member(lattice.basis);
  SuccessiveMinima out;
  // Start near the scale where t K holds about one fundamental domain.
  const double scale = std::pow(static_cast<double>(std::abs(member.det)) / body.volume(), 0.25);
  double t = std::exp2(std::floor(std::log2(std::max(scale, 1e-6))));
  for (;;) {
    std::vector<std::pair<Key, std::array<std::int64_t, 4>>> pts;
    for_each_point(body, t, budget, out.visited, [&](const std::array<std::int64_t, 4>& x, const Key& g) {
      if (g.num == 0 || !member(x)) return;
      pts.emplace_back(g, x);
    });
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      if (a.first < b.first || b.first < a.first) return a.first < b.first;
      return a.second < b.second;
    });
    std::vector<std::array<std::int64_t, 4>> chosen;
    std::vector<Key> keys;
    for (const auto& [g, x] : pts) {
      chosen.push_back(x);
      if (integer_rank(chosen) < static_cast<int>(chosen.size())) {
        chosen.pop_back();
        continue;
      }
      keys.push_back(g);
      if (chosen.size() == 4) break;
    }
    if (chosen.size() == 4) {
      for (std::size_t i = 0; i < 4; ++i) {
        out.vectors[i] = chosen[i];
        out.lambda_squared[i] = mpq_class(to_mpz(keys[i].num), to_mpz(keys[i].den));
        out.lambda_squared[i].canonicalize();
        out.lambda[i] = std::sqrt(out.lambda_squared[i].get_d());
      }
      return out;
    }
    t *= 2;
  }
}

std::int64_t lattice_point_count(const Lattice4& lattice, const Body& body, long long budget) {
  const Membership member(lattice.basis);
  std::int64_t count = 0;
  long long visited = 0;
  for_each_point(body, 1.0, budget, visited, [&](const std::array<std::int64_t, 4>& x, const Key&) {
    if (member(x)) ++count;
  });
  return count;
}

ProductBoundResult product_bound_check(const Lattice4& lattice, const Body& body, long long budget) {
  ProductBoundResult r;
  r.minima = successive_minima(lattice, body, budget);
  r.count = lattice_point_count(lattice, body, budget);
  r.bound = 1;
  for (int i = 0; i < 4; ++i) r.bound *= 1 + 2.0 * (i + 1) / r.minima.lambda[static_cast<std::size_t>(i)];
  r.holds = static_cast<double>(r.count) <= r.bound;
  return r;
}

MinkowskiResult minkowski_check(const Lattice4& lattice, const Body& body, const SuccessiveMinima& minima) {
  MinkowskiResult r;
  r.normalised = minima.product() * body.volume() / static_cast<double>(lattice.covolume());
  r.holds = r.normalised >= r.lower * (1 - 1e-12) && r.normalised <= r.upper * (1 + 1e-12);
  return r;
}

std::vector<GonInstance> random_gon_instances(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  std::vector<GonInstance> out;
  while (out.size() < count) {
    GonInstance inst;
    for (auto& row : inst.lattice.basis)
      for (auto& v : row) v = uniform(-3, 3);
    std::int64_t det = 0;
    try {
      det = inst.lattice.covolume();
    } catch (const DomainError&) {
      continue;
    }
    if (det < 1 || det > 40) continue;
    const std::int64_t Rs[] = {1, 2, 4};
    const std::int64_t M = uniform(4, 64);
    inst.body = Body::cylinder(M, Rs[uniform(0, 2)]);
    out.push_back(inst);
  }
  return out;
}

}  // namespace hs
