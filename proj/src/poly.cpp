#include "hecke_sphere/poly.hpp"

#include <numeric>

#include "hecke_sphere/error.hpp"

namespace hs {

namespace {

int total(const Exponent4& a) { return a[0] + a[1] + a[2] + a[3]; }

}  // namespace

Poly4::Poly4(int degree) : degree_(degree) {
  if (degree < 0) throw DomainError("negative polynomial degree");
}

Poly4 Poly4::monomial(const Exponent4& alpha, const mpq_class& coeff) {
  Poly4 p(total(alpha));
  p.add_term(alpha, coeff);
  return p;
}

void Poly4::add_term(const Exponent4& alpha, const mpq_class& c) {
  if (total(alpha) != degree_) throw DomainError("term degree does not match polynomial degree");
  for (int e : alpha)
    if (e < 0) throw DomainError("negative exponent");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

mpq_class Poly4::coeff(const Exponent4& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

Poly4& Poly4::operator+=(const Poly4& other) {
  if (other.degree_ != degree_ && !other.is_zero()) throw DomainError("degree mismatch in addition");
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Poly4& Poly4::operator-=(const Poly4& other) {
  if (other.degree_ != degree_ && !other.is_zero()) throw DomainError("degree mismatch in subtraction");
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Poly4& Poly4::operator*=(const mpq_class& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Poly4 operator*(const Poly4& a, const Poly4& b) {
  Poly4 out(a.degree_ + b.degree_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponent4 e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]};
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Poly4 Poly4::laplacian() const {
  Poly4 out(degree_ >= 2 ? degree_ - 2 : 0);
  for (const auto& [e, c] : terms_) {
    for (int i = 0; i < 4; ++i) {
      if (e[i] < 2) continue;
      Exponent4 d = e;
      d[i] -= 2;
      out.add_term(d, c * (e[i] * (e[i] - 1)));
    }
  }
  return out;
}

mpq_class Poly4::evaluate(std::span<const mpq_class, 4> p) const {
  mpq_class sum = 0;
  std::array<std::vector<mpq_class>, 4> powers;
  for (int i = 0; i < 4; ++i) {
    powers[i].resize(static_cast<std::size_t>(degree_ + 1));
    powers[i][0] = 1;
    for (int e = 1; e <= degree_; ++e) powers[i][e] = powers[i][e - 1] * p[i];
  }
  for (const auto& [e, c] : terms_)
    sum += c * powers[0][e[0]] * powers[1][e[1]] * powers[2][e[2]] * powers[3][e[3]];
  return sum;
}

double Poly4::evaluate(std::span<const double, 4> p) const {
  std::array<std::vector<double>, 4> powers;
  for (int i = 0; i < 4; ++i) {
    powers[i].resize(static_cast<std::size_t>(degree_ + 1));
    powers[i][0] = 1.0;
    for (int e = 1; e <= degree_; ++e) powers[i][e] = powers[i][e - 1] * p[i];
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms_)
    sum += c.get_d() * powers[0][e[0]] * powers[1][e[1]] * powers[2][e[2]] * powers[3][e[3]];
  return sum;
}

IntMat4 left_mul_matrix(const Quaternion& m) {
  const auto a = m.coord(0), b = m.coord(1), c = m.coord(2), d = m.coord(3);
  return IntMat4{{{a, -b, -c, -d}, {b, a, -d, c}, {c, d, a, -b}, {d, -c, b, a}}};
}

Poly4 substitute_linear(const Poly4& f, const IntMat4& L) {
  const int n = f.degree();
  // powers[i][e] = (row i of L applied to x)^e
  std::array<std::vector<Poly4>, 4> powers;
  for (int i = 0; i < 4; ++i) {
    Poly4 lin(1);
    for (int c = 0; c < 4; ++c) {
      Exponent4 e{0, 0, 0, 0};
      e[c] = 1;
      lin.add_term(e, mpq_class(static_cast<long>(L[i][c])));
    }
    powers[i].reserve(static_cast<std::size_t>(n + 1));
    powers[i].push_back(Poly4::monomial({0, 0, 0, 0}));
    for (int e = 1; e <= n; ++e) powers[i].push_back(powers[i].back() * lin);
  }
  Poly4 out(n);
  for (const auto& [e, c] : f.terms()) {
    Poly4 term = powers[0][e[0]] * powers[1][e[1]];
    term = term * powers[2][e[2]];
    term = term * powers[3][e[3]];
    term *= c;
    out += term;
  }
  return out;
}

Poly4 substitute_left_mul(const Poly4& f, const Quaternion& m) {
  if (m.parity() != Parity::integral) throw DomainError("substitution requires an integral quaternion");
  return substitute_linear(f, left_mul_matrix(m));
}

mpq_class monomial_sphere_integral(const Exponent4& alpha) {
  mpz_class num = 1;
  int half = 0;
  for (int e : alpha) {
    if (e < 0) throw DomainError("negative exponent");
    if (e % 2) return 0;
    for (int k = e - 1; k > 1; k -= 2) num *= k;
    half += e / 2;
  }
  mpz_class den = 1;
  for (int j = 0; j < half; ++j) den *= 4 + 2 * j;
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

mpq_class sphere_inner(const Poly4& f, const Poly4& g) {
  mpq_class sum = 0;
  for (const auto& [a, ca] : f.terms()) {
    for (const auto& [b, cb] : g.terms()) {
      Exponent4 e{a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
      if ((e[0] | e[1] | e[2] | e[3]) & 1) continue;
      sum += ca * cb * monomial_sphere_integral(e);
    }
  }
  return sum;
}

std::size_t monomial_count(int degree, int vars) {
  if (degree < 0) return 0;
  std::size_t num = 1, den = 1;
  for (int i = 1; i < vars; ++i) {
    num *= static_cast<std::size_t>(degree + i);
    den *= static_cast<std::size_t>(i);
  }
  return num / den;
}

template <std::size_t Vars>
MonomialIndex<Vars>::MonomialIndex(int degree) : degree_(degree) {
  if (degree < 0) throw DomainError("negative degree");
  const std::size_t side = static_cast<std::size_t>(degree + 1);
  std::size_t table = 1;
  for (std::size_t i = 0; i + 1 < Vars; ++i) table *= side;
  lookup_.assign(table, static_cast<std::size_t>(-1));
  Exponent e{};
  // Recursive descent over leading exponents, largest first.
  auto fill = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos + 1 == Vars) {
      e[pos] = remaining;
      std::size_t key = 0;
      for (std::size_t i = 0; i + 1 < Vars; ++i) key = key * side + static_cast<std::size_t>(e[i]);
      lookup_[key] = exps_.size();
      exps_.push_back(e);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      e[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  fill(fill, 0, degree);
}

template <std::size_t Vars>
std::size_t MonomialIndex<Vars>::index(const Exponent& e) const {
  const std::size_t side = static_cast<std::size_t>(degree_ + 1);
  std::size_t key = 0;
  int sum = 0;
  for (std::size_t i = 0; i < Vars; ++i) {
    if (e[i] < 0 || e[i] > degree_) throw DomainError("exponent outside monomial index");
    sum += e[i];
    if (i + 1 < Vars) key = key * side + static_cast<std::size_t>(e[i]);
  }
  if (sum != degree_) throw DomainError("exponent degree mismatch in monomial index");
  return lookup_[key];
}

template class MonomialIndex<3>;
template class MonomialIndex<4>;

}  // namespace hs
