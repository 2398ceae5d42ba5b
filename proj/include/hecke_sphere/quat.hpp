#pragma once

// Lipschitz quaternions B(Z) and the coset B(Z) + (1+i+j+k)/2, stored with
// doubled coordinates so that both classes use integer arithmetic.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hs {

enum class Parity { integral, coset };

std::string to_string(Parity p);
Parity parity_from_string(const std::string& s);

/// Quaternion with doubled coordinates: the true value is (c[0] + c[1] i + c[2] j + c[3] k) / 2.
///
/// Construction rejects mixed parities, so every instance lies in B(Z) (all
/// c even) or in B(Z) + xi (all c odd).
class Quaternion {
 public:
  using Coord = std::int64_t;

  constexpr Quaternion() = default;

  /// From doubled coordinates. Throws DomainError on mixed parity.
  static Quaternion from_doubled(Coord c1, Coord c2, Coord c3, Coord c4);
  /// From true integer coordinates a + b i + c j + d k.
  static Quaternion integral(Coord a, Coord b, Coord c, Coord d);

  const std::array<Coord, 4>& doubled() const noexcept { return c_; }
  Coord doubled(int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
  Parity parity() const noexcept { return (c_[0] & 1) ? Parity::coset : Parity::integral; }

  /// True coordinate i for integral quaternions (c_i / 2).
  Coord coord(int i) const;

  /// Reduced norm nr = (c1^2 + c2^2 + c3^2 + c4^2) / 4.
  std::int64_t norm() const;
  /// Reduced trace tr = 2 * (c1 / 2) = c1.
  Coord trace() const noexcept { return c_[0]; }
  Quaternion conjugate() const noexcept;

  /// Sum of squares of the doubled imaginary coordinates (4 (m2^2+m3^2+m4^2)).
  std::int64_t doubled_imag_square() const;

  friend bool operator==(const Quaternion&, const Quaternion&) = default;
  friend auto operator<=>(const Quaternion&, const Quaternion&) = default;

 private:
  std::array<Coord, 4> c_{0, 0, 0, 0};
};

/// Hamilton product. Throws CapacityError when a coordinate leaves int64.
Quaternion quat_mul(const Quaternion& a, const Quaternion& b);

struct QuatInvariants {
  Quaternion conjugate;
  std::int64_t norm;
  std::int64_t trace;
};
QuatInvariants quat_invariants(const Quaternion& a);

/// The eight units of B(Z) in lexicographic order.
std::span<const Quaternion> lipschitz_units();

/// All quaternions of the given parity and norm k, lexicographic in doubled coordinates.
struct NormShell {
  std::int64_t k = 0;
  Parity parity = Parity::integral;
  std::vector<Quaternion> elements;
};

NormShell enumerate_shell(std::int64_t k, Parity parity);

/// |{m in B(Z) : nr(m) = k}| without materialising the shell.
std::int64_t r4_count(std::int64_t k);

/// Counts of representations as sums of three squares.
///
/// `integral`: entry s is #{(a,b,c) in Z^3 : a^2+b^2+c^2 = s} for s <= limit.
/// `coset`: entry t is #{(a,b,c) odd : a^2+b^2+c^2 = t} for t <= limit.
std::vector<std::int64_t> three_square_counts(std::int64_t limit, Parity parity);

/// Exact floor(sqrt(v)) for v >= 0.
std::int64_t isqrt(std::int64_t v);

}  // namespace hs
