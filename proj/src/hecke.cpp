#include "hecke_sphere/hecke.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/parallel.hpp"
#include "hecke_sphere/quat.hpp"

namespace hs {

namespace {

using i128 = __int128;

// Pivot coordinates of a harmonic polynomial are its coefficients on
// monomials with x1-exponent 0 or 1, so only the restrictions
//   P0 = f(m x)|_{x1=0}   and   P1 = d/dx1 f(m x)|_{x1=0}
// of each substituted monomial are ever needed. With l_i the i-th row of the
// left-multiplication matrix restricted to (x2,x3,x4) and a_i its x1 entry,
//   P0[beta] = prod l_i^beta_i,   P1[beta] = sum_i beta_i a_i l^(beta - e_i).
// Both are built level by level in |beta| as dense 3-variable coefficient rows.
struct RestrictionPlan {
  int n;
  std::vector<MonomialIndex4> idx4;  // degrees 0..n
  std::vector<MonomialIndex3> idx3;  // degrees 0..n
  // parent[d][beta] = {index of beta - e_var at degree d-1, var}, var the first nonzero slot.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint8_t>>> parent;
  // up3[d][mu * 3 + t] = index of mu + e_t at degree d+1.
  std::vector<std::vector<std::uint32_t>> up3;
  // up4[gamma * 4 + i] = index of gamma + e_i at degree n, gamma of degree n-1.
  std::vector<std::uint32_t> up4;

  explicit RestrictionPlan(int degree) : n(degree) {
    for (int d = 0; d <= n; ++d) {
      idx4.emplace_back(d);
      idx3.emplace_back(d);
    }
    parent.resize(static_cast<std::size_t>(n + 1));
    for (int d = 1; d <= n; ++d) {
      auto& par = parent[static_cast<std::size_t>(d)];
      for (const auto& b : idx4[static_cast<std::size_t>(d)].exponents()) {
        std::uint8_t var = 0;
        while (b[var] == 0) ++var;
        auto p = b;
        --p[var];
        par.emplace_back(static_cast<std::uint32_t>(idx4[static_cast<std::size_t>(d - 1)].index(p)), var);
      }
    }
    up3.resize(static_cast<std::size_t>(n + 1));
    for (int d = 0; d < n; ++d) {
      auto& up = up3[static_cast<std::size_t>(d)];
      for (const auto& mu : idx3[static_cast<std::size_t>(d)].exponents()) {
        for (int t = 0; t < 3; ++t) {
          auto e = mu;
          ++e[static_cast<std::size_t>(t)];
          up.push_back(static_cast<std::uint32_t>(idx3[static_cast<std::size_t>(d + 1)].index(e)));
        }
      }
    }
    if (n >= 1) {
      for (const auto& g : idx4[static_cast<std::size_t>(n - 1)].exponents()) {
        for (int i = 0; i < 4; ++i) {
          auto e = g;
          ++e[static_cast<std::size_t>(i)];
          up4.push_back(static_cast<std::uint32_t>(idx4[static_cast<std::size_t>(n)].index(e)));
        }
      }
    }
  }

  std::size_t cols() const { return idx4.back().size(); }
  std::size_t rows0() const { return idx3.back().size(); }
  std::size_t rows1() const { return n >= 1 ? idx3[static_cast<std::size_t>(n - 1)].size() : 0; }
};

template <class Int>
struct Restriction {
  std::vector<Int> p0;  // [beta][mu], mu of degree n
  std::vector<Int> p1;  // [beta][mu], mu of degree n-1

  Restriction(const RestrictionPlan& plan)
      : p0(plan.cols() * plan.rows0(), Int(0)), p1(plan.cols() * plan.rows1(), Int(0)) {}

  Restriction& operator+=(const Restriction& o) {
    for (std::size_t i = 0; i < p0.size(); ++i) p0[i] += o.p0[i];
    for (std::size_t i = 0; i < p1.size(); ++i) p1[i] += o.p1[i];
    return *this;
  }
};

template <class Int>
void add_restriction(const RestrictionPlan& plan, const IntMat4& L, Restriction<Int>& out, std::vector<Int>& prev,
                     std::vector<Int>& cur) {
  const int n = plan.n;
  if (n == 0) {
    out.p0[0] += Int(1);
    return;
  }
  prev.assign(1, Int(1));
  auto emit_p1 = [&](const std::vector<Int>& level) {
    // level has degree n-1
    const std::size_t s3 = plan.rows1();
    const auto& g4 = plan.idx4[static_cast<std::size_t>(n - 1)];
    for (std::size_t g = 0; g < g4.size(); ++g) {
      for (int i = 0; i < 4; ++i) {
        const std::int64_t a = L[static_cast<std::size_t>(i)][0];
        if (a == 0) continue;
        const Int coef = Int(a * (g4[g][static_cast<std::size_t>(i)] + 1));
        const std::size_t beta = plan.up4[g * 4 + static_cast<std::size_t>(i)];
        Int* dst = &out.p1[beta * s3];
        const Int* src = &level[g * s3];
        for (std::size_t mu = 0; mu < s3; ++mu)
          if (src[mu] != 0) dst[mu] += src[mu] * coef;
      }
    }
  };
  if (n == 1) emit_p1(prev);
  for (int d = 1; d <= n; ++d) {
    const std::size_t du = static_cast<std::size_t>(d);
    const std::size_t s_prev = plan.idx3[du - 1].size();
    const std::size_t s_cur = plan.idx3[du].size();
    const auto& par = plan.parent[du];
    const auto& up = plan.up3[du - 1];
    cur.assign(par.size() * s_cur, Int(0));
    for (std::size_t b = 0; b < par.size(); ++b) {
      const auto [pb, var] = par[b];
      const std::int64_t r[3] = {L[var][1], L[var][2], L[var][3]};
      const Int* src = &prev[pb * s_prev];
      Int* dst = &cur[b * s_cur];
      for (std::size_t mu = 0; mu < s_prev; ++mu) {
        const Int& v = src[mu];
        if (v == 0) continue;
        for (int t = 0; t < 3; ++t)
          if (r[t] != 0) dst[up[mu * 3 + static_cast<std::size_t>(t)]] += v * Int(r[t]);
      }
    }
    std::swap(prev, cur);
    if (d == n - 1) emit_p1(prev);
  }
  for (std::size_t i = 0; i < prev.size(); ++i) out.p0[i] += prev[i];
}

template <class Int>
Restriction<Int> restriction_sum(const RestrictionPlan& plan, const std::vector<Quaternion>& shell, unsigned threads) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, shell.size()))));
  std::vector<Restriction<Int>> partial(workers, Restriction<Int>(plan));
  const std::size_t chunk = (shell.size() + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::size_t w) {
    std::vector<Int> prev, cur;
    const std::size_t lo = w * chunk, hi = std::min(shell.size(), lo + chunk);
    for (std::size_t k = lo; k < hi; ++k) add_restriction(plan, left_mul_matrix(shell[k]), partial[w], prev, cur);
  });
  for (unsigned w = 1; w < workers; ++w) partial[0] += partial[w];
  return std::move(partial[0]);
}

// log2 of an upper bound on every intermediate and accumulated integer.
double restriction_bound_log2(int n, const std::vector<Quaternion>& shell) {
  long double total = 0;
  for (const auto& m : shell) {
    const IntMat4 L = left_mul_matrix(m);
    long double rho = 0, amax = 0;
    for (const auto& row : L) {
      rho = std::max<long double>(rho, std::llabs(row[1]) + std::llabs(row[2]) + std::llabs(row[3]));
      amax = std::max<long double>(amax, std::llabs(row[0]));
    }
    rho = std::max<long double>(rho, 1);
    total += std::pow(rho, n) + n * amax * std::pow(rho, std::max(0, n - 1));
  }
  return static_cast<double>(std::log2(std::max<long double>(total, 1)));
}

struct ScaledPoly {
  mpz_class denominator = 1;
  std::vector<std::pair<std::size_t, mpz_class>> terms;  // (degree-n MonomialIndex4 position, integer coefficient)
};

ScaledPoly scale_to_integer(const Poly4& p, const MonomialIndex4& idx) {
  ScaledPoly s;
  for (const auto& [e, c] : p.terms())
    mpz_lcm(s.denominator.get_mpz_t(), s.denominator.get_mpz_t(), c.get_den_mpz_t());
  for (const auto& [e, c] : p.terms()) s.terms.emplace_back(idx.index(e), c.get_num() * (s.denominator / c.get_den()));
  return s;
}

int bit_length(i128 v) {
  unsigned __int128 u = v < 0 ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  int bits = 0;
  while (u) {
    ++bits;
    u >>= 1;
  }
  return bits;
}

void set_mpz(mpz_class& z, i128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  const auto hi = static_cast<unsigned long>(u >> 64);
  const auto lo = static_cast<unsigned long>(u);
  mpz_set_ui(z.get_mpz_t(), hi);
  mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), 64);
  mpz_add_ui(z.get_mpz_t(), z.get_mpz_t(), lo);
  if (neg) mpz_neg(z.get_mpz_t(), z.get_mpz_t());
}

void set_mpz(mpz_class& z, std::int64_t v) { z = static_cast<long>(v); }

i128 to_i128(std::int64_t v) { return v; }
i128 to_i128(i128 v) { return v; }
i128 to_i128(const mpz_class&) { throw InvariantError("word-sized accumulation of a multiprecision restriction"); }
void set_mpz(mpz_class& z, const mpz_class& v) { z = v; }

// Row r of the combined restriction (P0 rows, then P1 rows) at column beta.
template <class Int>
const Int& restriction_at(const Restriction<Int>& r, const RestrictionPlan& plan, std::size_t beta, std::size_t row) {
  const std::size_t r0 = plan.rows0();
  return row < r0 ? r.p0[beta * r0 + row] : r.p1[beta * plan.rows1() + (row - r0)];
}

// A(i, j) = sum_beta P(i, beta) b_j[beta].
template <class Int>
QMatrix project_onto_basis(const Restriction<Int>& P, const RestrictionPlan& plan, const HarmonicBasis& basis,
                           unsigned threads) {
  const std::size_t dim = basis.dim();
  const std::size_t cols = plan.cols();
  const MonomialIndex4& idx = plan.idx4.back();
  std::vector<ScaledPoly> scaled(dim);
  for (std::size_t j = 0; j < dim; ++j) scaled[j] = scale_to_integer(basis.basis[j], idx);

  // users[beta] = basis elements with a nonzero coefficient at beta.
  std::vector<std::vector<std::pair<std::uint32_t, const mpz_class*>>> users(cols);
  int coef_bits = 0;
  std::size_t max_terms = 1;
  for (std::size_t j = 0; j < dim; ++j) {
    max_terms = std::max(max_terms, scaled[j].terms.size());
    for (const auto& [beta, c] : scaled[j].terms) {
      users[beta].emplace_back(static_cast<std::uint32_t>(j), &c);
      coef_bits = std::max(coef_bits, static_cast<int>(mpz_sizeinbase(c.get_mpz_t(), 2)));
    }
  }

  int p_bits = 0;
  bool fits_word = true;
  if constexpr (std::is_same_v<Int, mpz_class>) {
    fits_word = false;
  } else {
    for (const auto& v : P.p0) p_bits = std::max(p_bits, bit_length(to_i128(v)));
    for (const auto& v : P.p1) p_bits = std::max(p_bits, bit_length(to_i128(v)));
  }
  const int sum_bits = static_cast<int>(std::ceil(std::log2(static_cast<double>(max_terms) + 1)));
  fits_word = fits_word && coef_bits <= 62 && p_bits + coef_bits + sum_bits <= 125;

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(dim)));
  const std::size_t chunk = (dim + workers - 1) / workers;
  QMatrix A(dim, dim);

  parallel_for(workers, workers, [&](std::size_t w) {
    const std::size_t jlo = w * chunk, jhi = std::min(dim, jlo + chunk);
    if (jlo >= jhi) return;
    const std::size_t width = jhi - jlo;
    std::vector<mpz_class> exact;
    if (fits_word) {
      // Column-major accumulators: acc[(j - jlo) * dim + i].
      std::vector<i128> acc(width * dim, 0);
      std::vector<i128> col(dim);
      for (std::size_t beta = 0; beta < cols; ++beta) {
        bool loaded = false;
        for (const auto& [j, c] : users[beta]) {
          if (j < jlo || j >= jhi) continue;
          if (!loaded) {
            for (std::size_t i = 0; i < dim; ++i) col[i] = to_i128(restriction_at(P, plan, beta, i));
            loaded = true;
          }
          const i128 cv = static_cast<i128>(c->get_si());
          i128* dst = &acc[(j - jlo) * dim];
          for (std::size_t i = 0; i < dim; ++i) dst[i] += col[i] * cv;
        }
      }
      exact.resize(width * dim);
      for (std::size_t k = 0; k < acc.size(); ++k) set_mpz(exact[k], acc[k]);
    } else {
      exact.assign(width * dim, mpz_class(0));
      std::vector<mpz_class> col(dim);
      for (std::size_t beta = 0; beta < cols; ++beta) {
        bool loaded = false;
        for (const auto& [j, c] : users[beta]) {
          if (j < jlo || j >= jhi) continue;
          if (!loaded) {
            for (std::size_t i = 0; i < dim; ++i) set_mpz(col[i], restriction_at(P, plan, beta, i));
            loaded = true;
          }
          mpz_class* dst = &exact[(j - jlo) * dim];
          for (std::size_t i = 0; i < dim; ++i)
            if (col[i] != 0) mpz_addmul(dst[i].get_mpz_t(), col[i].get_mpz_t(), c->get_mpz_t());
        }
      }
    }
    for (std::size_t j = jlo; j < jhi; ++j) {
      for (std::size_t i = 0; i < dim; ++i) {
        mpq_class v(exact[(j - jlo) * dim + i], scaled[j].denominator);
        v.canonicalize();
        A(i, j) = std::move(v);
      }
    }
  });
  return A;
}

HeckeMatrix from_exact(int n, std::int64_t N, const QMatrix& a) {
  HeckeMatrix h;
  h.n = n;
  h.N = N;
  h.denominator = common_denominator(a);
  h.entries = to_integer(a, h.denominator);
  return h;
}

mpz_class power(std::int64_t base, unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
  return r;
}

void require_even(int n) {
  if (n < 0 || n % 2) throw DomainError("Hecke matrices require even n >= 0");
}

}  // namespace

QMatrix HeckeMatrix::exact() const {
  QMatrix q = to_rational(entries);
  if (denominator != 1) q *= mpq_class(1, denominator);
  return q;
}

mpq_class HeckeMatrix::scale() const {
  if (n % 2) throw DomainError("exact Hecke scale requires even n");
  return mpq_class(1, 8 * power(N, static_cast<unsigned long>(n / 2)));
}

double HeckeMatrix::scale_double() const { return 1.0 / (8.0 * std::pow(static_cast<double>(N), n / 2.0)); }

std::vector<double> HeckeMatrix::scaled_double() const {
  const std::size_t d = dim();
  std::vector<double> out(d * d);
  // Combine in exact arithmetic where the scale is rational, else in double.
  if (n % 2 == 0) {
    const mpq_class s = scale() / denominator;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] = mpq_class(entries(i, j) * s).get_d();
  } else {
    const double s = scale_double();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] = mpq_class(entries(i, j), denominator).get_d() * s;
  }
  return out;
}

HeckeMatrix hecke_sum_matrix(const HarmonicBasis& basis, std::int64_t N, unsigned threads) {
  if (N < 1) throw DomainError("Hecke index N must be positive");
  const int n = basis.n;
  const NormShell shell = enumerate_shell(N, Parity::integral);
  const RestrictionPlan plan(n);
  const double bits = restriction_bound_log2(n, shell.elements);
  QMatrix a;
  if (bits < 62) {
    a = project_onto_basis(restriction_sum<std::int64_t>(plan, shell.elements, threads), plan, basis, threads);
  } else if (bits < 125) {
    a = project_onto_basis(restriction_sum<i128>(plan, shell.elements, threads), plan, basis, threads);
  } else {
    a = project_onto_basis(restriction_sum<mpz_class>(plan, shell.elements, threads), plan, basis, threads);
  }
  return from_exact(n, N, a);
}

HeckeMatrix hecke_matrix(const HarmonicBasis& basis, std::int64_t N, unsigned threads) {
  require_even(basis.n);
  return hecke_sum_matrix(basis, N, threads);
}

HeckeMatrix hecke_matrix(int n, std::int64_t N, unsigned threads) {
  require_even(n);
  return hecke_sum_matrix(harmonic_basis_no_gram(n), N, threads);
}

bool RelationsReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const RelationResult& r) { return r.passed; });
}

bool product_relation(const HeckeMatrix& am, const HeckeMatrix& an, const HeckeMatrix& amn) {
  // Z_M Z_N d_MN = 8 d_M d_N Z_MN
  ZMatrix lhs = am.entries * an.entries;
  lhs *= amn.denominator;
  ZMatrix rhs = amn.entries;
  rhs *= mpz_class(8 * am.denominator * an.denominator);
  return lhs == rhs;
}

bool recurrence_relation(const HeckeMatrix& next, const HeckeMatrix& cur, const HeckeMatrix& ap,
                         const HeckeMatrix& prev, std::int64_t p) {
  // 8 A_next = A_cur A_p - 8 p^(n+1) A_prev, cleared of all four denominators.
  const mpz_class dn = next.denominator, dc = cur.denominator, dp = ap.denominator, dv = prev.denominator;
  ZMatrix lhs = next.entries;
  lhs *= mpz_class(8 * dc * dp * dv);
  ZMatrix prod = cur.entries * ap.entries;
  prod *= mpz_class(dn * dv);
  ZMatrix tail = prev.entries;
  tail *= mpz_class(8 * power(p, static_cast<unsigned long>(next.n + 1)) * dn * dc * dp);
  return lhs == prod - tail;
}

bool commutes(const HeckeMatrix& a, const HeckeMatrix& b) { return a.entries * b.entries == b.entries * a.entries; }

bool selfadjoint_check(const HarmonicBasis& basis, const HeckeMatrix& a) {
  if (basis.gram.rows() != a.dim()) throw DomainError("selfadjoint_check needs the basis Gram matrix");
  const QMatrix z = to_rational(a.entries);
  return basis.gram * z == z.transpose() * basis.gram;
}

bool selfadjoint_check(int n, std::int64_t N, unsigned threads) {
  require_even(n);
  const HarmonicBasis basis = harmonic_basis(n, threads);
  return selfadjoint_check(basis, hecke_matrix(basis, N, threads));
}

RelationsReport hecke_relations_check(const HarmonicBasis& basis, std::span<const std::int64_t> primes,
                                      int alpha_max, unsigned threads) {
  require_even(basis.n);
  if (alpha_max < 1) throw DomainError("alpha_max must be at least 1");
  std::vector<std::int64_t> ps(primes.begin(), primes.end());
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  for (auto p : ps) {
    if (p < 3 || p % 2 == 0) throw DomainError("Hecke relations use odd primes");
    for (std::int64_t q = 3; q * q <= p; q += 2)
      if (p % q == 0) throw DomainError("'" + std::to_string(p) + "' is not prime");
  }

  std::map<std::int64_t, HeckeMatrix> mats;
  auto get = [&](std::int64_t N) -> const HeckeMatrix& {
    auto it = mats.find(N);
    if (it == mats.end()) it = mats.emplace(N, hecke_matrix(basis, N, threads)).first;
    return it->second;
  };

  RelationsReport rep;
  rep.n = basis.n;
  get(1);
  for (auto p : ps) {
    std::int64_t pa = 1;
    for (int a = 1; a <= alpha_max; ++a) get(pa *= p);
  }
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      const auto p = ps[i], q = ps[j];
      rep.results.push_back({"product", p, q, product_relation(get(p), get(q), get(p * q))});
    }
  for (auto p : ps) {
    std::int64_t prev = 1, cur = p;
    for (int a = 1; a < alpha_max; ++a) {
      rep.results.push_back({"recurrence", p, cur * p, recurrence_relation(get(cur * p), get(cur), get(p), get(prev), p)});
      prev = cur;
      cur *= p;
    }
  }
  for (auto it = mats.begin(); it != mats.end(); ++it)
    for (auto jt = std::next(it); jt != mats.end(); ++jt)
      rep.results.push_back({"commutator", it->first, jt->first, commutes(it->second, jt->second)});
  for (const auto& [N, m] : mats) {
    rep.computed.push_back(N);
    rep.results.push_back({"selfadjoint", N, N, selfadjoint_check(basis, m)});
  }
  return rep;
}

RelationsReport hecke_relations_check(int n, std::span<const std::int64_t> primes, int alpha_max, unsigned threads) {
  require_even(n);
  return hecke_relations_check(harmonic_basis(n, threads), primes, alpha_max, threads);
}

bool t1_vanishing(int n) {
  if (n < 1 || n % 2 == 0) throw DomainError("t1_vanishing requires odd n");
  return hecke_sum_matrix(harmonic_basis_no_gram(n), 1).entries.is_zero();
}

}  // namespace hs
