#include "hecke_sphere/harmonic.hpp"

#include <map>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/parallel.hpp"

namespace hs {

namespace {

using Poly3 = std::map<Exponent3, mpz_class>;

Poly3 laplacian3(const Poly3& p) {
  Poly3 out;
  for (const auto& [e, c] : p) {
    for (int i = 0; i < 3; ++i) {
      if (e[i] < 2) continue;
      Exponent3 d = e;
      d[i] -= 2;
      mpz_class v = c * (e[i] * (e[i] - 1));
      auto [it, inserted] = out.try_emplace(d, v);
      if (!inserted) {
        it->second += v;
        if (it->second == 0) out.erase(it);
      }
    }
  }
  return out;
}

// h = sum_k x1^(eps+2k) g_k with g_eps = x'^rest and
// g_(k+2) = -Laplacian'(g_k) / ((k+1)(k+2)).
Poly4 harmonic_from_pivot(int eps, const Exponent3& rest) {
  const int n = eps + rest[0] + rest[1] + rest[2];
  Poly4 h(n);
  Poly3 g{{rest, mpz_class(1)}};
  mpq_class factor = 1;
  int power = eps;
  while (!g.empty()) {
    for (const auto& [e, c] : g) h.add_term({power, e[0], e[1], e[2]}, factor * c);
    g = laplacian3(g);
    factor /= -mpz_class((power + 1) * (power + 2));
    power += 2;
  }
  return h;
}

int class_of(const Exponent4& e) {
  return (e[0] & 1) | ((e[1] & 1) << 1) | ((e[2] & 1) << 2) | ((e[3] & 1) << 3);
}

struct ScaledPoly {
  mpz_class denominator;
  std::vector<std::pair<std::size_t, mpz_class>> terms;  // (MonomialIndex4 position, integer coefficient)
};

ScaledPoly scale_to_integer(const Poly4& p, const MonomialIndex4& idx) {
  ScaledPoly s{1, {}};
  for (const auto& [e, c] : p.terms())
    mpz_lcm(s.denominator.get_mpz_t(), s.denominator.get_mpz_t(), c.get_den_mpz_t());
  for (const auto& [e, c] : p.terms()) {
    mpz_class v = c.get_num() * (s.denominator / c.get_den());
    s.terms.emplace_back(idx.index(e), std::move(v));
  }
  return s;
}

void fill_gram(HarmonicBasis& hb, unsigned threads) {
  const int n = hb.n;
  const std::size_t dim = hb.dim();
  const MonomialIndex4 idx(n);
  hb.gram = QMatrix(dim, dim);

  // Moment numerators: for an even exponent d = 2h with |h| = n,
  // E[x^d] = prod (d_i - 1)!! / prod_{j<n} (4 + 2j).
  std::vector<mpz_class> odd_fact(static_cast<std::size_t>(2 * n + 1), 1);
  for (int e = 2; e <= 2 * n; e += 2) odd_fact[e] = odd_fact[e - 2] * (e - 1);
  std::vector<mpz_class> moment(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& h = idx[i];
    moment[i] = odd_fact[2 * h[0]] * odd_fact[2 * h[1]] * odd_fact[2 * h[2]] * odd_fact[2 * h[3]];
  }
  mpz_class moment_den = 1;
  for (int j = 0; j < n; ++j) moment_den *= 4 + 2 * j;

  std::vector<ScaledPoly> scaled(dim);
  for (std::size_t j = 0; j < dim; ++j) scaled[j] = scale_to_integer(hb.basis[j], idx);

  std::map<int, std::vector<std::size_t>> class_members;
  std::map<int, std::vector<std::size_t>> class_monomials;
  for (std::size_t j = 0; j < dim; ++j) class_members[hb.parity_class(j)].push_back(j);
  for (std::size_t i = 0; i < idx.size(); ++i) class_monomials[class_of(idx[i])].push_back(i);

  // Pairs in different parity classes integrate to zero.
  parallel_for(dim, threads, [&](std::size_t j) {
    const int cls = hb.parity_class(j);
    const auto& monos = class_monomials.at(cls);
    std::vector<mpz_class> v(idx.size());
    for (std::size_t beta : monos) {
      const auto& b = idx[beta];
      mpz_class acc = 0;
      for (const auto& [gamma, c] : scaled[j].terms) {
        const auto& g = idx[gamma];
        const Exponent4 half{(b[0] + g[0]) / 2, (b[1] + g[1]) / 2, (b[2] + g[2]) / 2,
                             (b[3] + g[3]) / 2};
        mpz_addmul(acc.get_mpz_t(), c.get_mpz_t(), moment[idx.index(half)].get_mpz_t());
      }
      v[beta] = std::move(acc);
    }
    for (std::size_t i : class_members.at(cls)) {
      if (i > j) continue;
      mpz_class acc = 0;
      for (const auto& [beta, c] : scaled[i].terms) mpz_addmul(acc.get_mpz_t(), c.get_mpz_t(), v[beta].get_mpz_t());
      mpq_class value(acc, scaled[i].denominator * scaled[j].denominator * moment_den);
      value.canonicalize();
      hb.gram(i, j) = value;
      hb.gram(j, i) = value;
    }
  });
}

}  // namespace

int HarmonicBasis::parity_class(std::size_t j) const { return class_of(pivots.at(j)); }

std::vector<mpq_class> HarmonicBasis::coordinates(const Poly4& h) const {
  if (!h.is_zero() && h.degree() != n) throw DomainError("coordinate extraction: degree mismatch");
  std::vector<mpq_class> out(pivots.size());
  for (std::size_t j = 0; j < pivots.size(); ++j) out[j] = h.coeff(pivots[j]);
  return out;
}

HarmonicBasis harmonic_basis_no_gram(int n) {
  if (n < 0) throw DomainError("harmonic_basis requires n >= 0");
  HarmonicBasis hb;
  hb.n = n;
  for (int eps = 0; eps <= 1 && eps <= n; ++eps) {
    const MonomialIndex3 rest(n - eps);
    for (const auto& r : rest.exponents()) {
      hb.pivots.push_back({eps, r[0], r[1], r[2]});
      hb.basis.push_back(harmonic_from_pivot(eps, r));
    }
  }
  return hb;
}

HarmonicBasis harmonic_basis(int n, unsigned threads) {
  HarmonicBasis hb = harmonic_basis_no_gram(n);
  fill_gram(hb, threads);
  return hb;
}

}  // namespace hs
