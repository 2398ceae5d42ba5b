#include "hecke_sphere/quat.hpp"

#include <cmath>
#include <limits>

#include "hecke_sphere/error.hpp"

namespace hs {

std::string to_string(Parity p) { return p == Parity::integral ? "integral" : "coset"; }

Parity parity_from_string(const std::string& s) {
  if (s == "integral") return Parity::integral;
  if (s == "coset") return Parity::coset;
  throw DomainError("unknown parity '" + s + "' (expected integral or coset)");
}

std::int64_t isqrt(std::int64_t v) {
  if (v < 0) throw DomainError("isqrt of negative value");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

namespace {

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw CapacityError("quaternion coordinate exceeds 64-bit range");
  return static_cast<std::int64_t>(v);
}

}  // namespace

Quaternion Quaternion::from_doubled(Coord c1, Coord c2, Coord c3, Coord c4) {
  const int p = static_cast<int>(c1 & 1);
  if ((c2 & 1) != p || (c3 & 1) != p || (c4 & 1) != p)
    throw DomainError("doubled coordinates must be all even or all odd");
  Quaternion q;
  q.c_ = {c1, c2, c3, c4};
  return q;
}

Quaternion Quaternion::integral(Coord a, Coord b, Coord c, Coord d) {
  return from_doubled(narrow(__int128{a} * 2), narrow(__int128{b} * 2), narrow(__int128{c} * 2),
                      narrow(__int128{d} * 2));
}

Quaternion::Coord Quaternion::coord(int i) const {
  if (parity() != Parity::integral) throw DomainError("coset quaternion has half-integer coordinates");
  return c_[static_cast<std::size_t>(i)] / 2;
}

std::int64_t Quaternion::norm() const {
  __int128 s = 0;
  for (Coord c : c_) s += __int128{c} * c;
  return narrow(s / 4);
}

std::int64_t Quaternion::doubled_imag_square() const {
  __int128 s = 0;
  for (int i = 1; i < 4; ++i) s += __int128{c_[i]} * c_[i];
  return narrow(s);
}

Quaternion Quaternion::conjugate() const noexcept {
  Quaternion q;
  q.c_ = {c_[0], -c_[1], -c_[2], -c_[3]};
  return q;
}

Quaternion quat_mul(const Quaternion& x, const Quaternion& y) {
  const auto& a = x.doubled();
  const auto& b = y.doubled();
  using W = __int128;
  W r = W{a[0]} * b[0] - W{a[1]} * b[1] - W{a[2]} * b[2] - W{a[3]} * b[3];
  W i = W{a[0]} * b[1] + W{a[1]} * b[0] + W{a[2]} * b[3] - W{a[3]} * b[2];
  W j = W{a[0]} * b[2] - W{a[1]} * b[3] + W{a[2]} * b[0] + W{a[3]} * b[1];
  W k = W{a[0]} * b[3] + W{a[1]} * b[2] - W{a[2]} * b[1] + W{a[3]} * b[0];
  // Products of Hurwitz elements are Hurwitz, so halving is exact.
  return Quaternion::from_doubled(narrow(r / 2), narrow(i / 2), narrow(j / 2), narrow(k / 2));
}

QuatInvariants quat_invariants(const Quaternion& a) {
  return {a.conjugate(), a.norm(), a.trace()};
}

std::span<const Quaternion> lipschitz_units() {
  static const std::vector<Quaternion> units = [] {
    std::vector<Quaternion> u = enumerate_shell(1, Parity::integral).elements;
    return u;
  }();
  return units;
}

namespace {

// Visits doubled coordinates of the given parity with sum of squares 4k in
// lexicographic order.
template <class Visit>
void scan_shell(std::int64_t k, Parity parity, Visit&& visit) {
  const std::int64_t target = 4 * k;
  const std::int64_t first = parity == Parity::integral ? 0 : 1;
  auto start = [&](std::int64_t bound) {
    // Smallest value >= -bound with the right parity.
    std::int64_t v = -bound;
    if (((v % 2) + 2) % 2 != first) ++v;
    return v;
  };
  const std::int64_t b1 = isqrt(target);
  for (std::int64_t c1 = start(b1); c1 <= b1; c1 += 2) {
    const std::int64_t r1 = target - c1 * c1;
    const std::int64_t b2 = isqrt(r1);
    for (std::int64_t c2 = start(b2); c2 <= b2; c2 += 2) {
      const std::int64_t r2 = r1 - c2 * c2;
      const std::int64_t b3 = isqrt(r2);
      for (std::int64_t c3 = start(b3); c3 <= b3; c3 += 2) {
        const std::int64_t r3 = r2 - c3 * c3;
        const std::int64_t c4 = isqrt(r3);
        if (c4 * c4 != r3 || ((c4 % 2) != first)) continue;
        if (c4 == 0) {
          visit(c1, c2, c3, std::int64_t{0});
        } else {
          visit(c1, c2, c3, -c4);
          visit(c1, c2, c3, c4);
        }
      }
    }
  }
}

}  // namespace

NormShell enumerate_shell(std::int64_t k, Parity parity) {
  if (k < 1) throw DomainError("shell norm must be positive");
  NormShell shell{k, parity, {}};
  if (parity == Parity::coset && k % 2 == 0) return shell;
  scan_shell(k, parity, [&](auto c1, auto c2, auto c3, auto c4) {
    shell.elements.push_back(Quaternion::from_doubled(c1, c2, c3, c4));
  });
  return shell;
}

std::int64_t r4_count(std::int64_t k) {
  if (k < 1) throw DomainError("r4_count requires k >= 1");
  std::int64_t count = 0;
  scan_shell(k, Parity::integral, [&](auto, auto, auto, auto) { ++count; });
  return count;
}

std::vector<std::int64_t> three_square_counts(std::int64_t limit, Parity parity) {
  if (limit < 0) throw DomainError("negative limit");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(limit + 1), 0);
  const std::int64_t step = parity == Parity::integral ? 1 : 2;
  const std::int64_t lo = parity == Parity::integral ? 0 : 1;
  const std::int64_t b = isqrt(limit);
  // Count nonnegative triples and weight by sign multiplicity.
  for (std::int64_t a = lo; a <= b; a += step) {
    for (std::int64_t c = lo; a * a + c * c <= limit; c += step) {
      for (std::int64_t d = lo; a * a + c * c + d * d <= limit; d += step) {
        const std::int64_t w = (a ? 2 : 1) * (c ? 2 : 1) * (d ? 2 : 1);
        counts[static_cast<std::size_t>(a * a + c * c + d * d)] += w;
      }
    }
  }
  return counts;
}

}  // namespace hs
