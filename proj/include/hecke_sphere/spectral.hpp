#pragma once

// Joint eigenspaces V_lambda of the Hecke operators on the degree-n harmonic
// space, in double or binary128 arithmetic.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "hecke_sphere/harmonic.hpp"
#include "hecke_sphere/hecke.hpp"
#include "hecke_sphere/linalg.hpp"
#include "hecke_sphere/real.hpp"

namespace hs {

template <class T>
struct EigenSpaceT {
  /// Eigenvalue of T_N for N = 1 and every generating prime.
  std::map<std::int64_t, double> lambda;
  /// Eigenvalue of T_1, which is a projection.
  int t1_flag = 0;
  /// Coordinates in the pivot basis, orthonormal for the Gram matrix.
  std::vector<std::vector<T>> vectors;
  /// Per-vector eigenvalues for every computed N, generators and extras alike.
  std::vector<std::map<std::int64_t, T>> vector_lambda;

  std::size_t dim() const noexcept { return vectors.size(); }
};

template <class T>
struct SpectralDecompositionT {
  int n = 0;
  std::vector<std::int64_t> primes;
  std::vector<std::int64_t> extras;
  std::uint64_t seed = 0;
  std::vector<EigenSpaceT<T>> spaces;
  /// Largest ||T_N v - lambda v|| / ||T_N||_F over all stored vectors and N.
  double max_residual = 0;

  std::size_t total_dim() const;
  /// phi_j(x) for every stored vector, spaces in order, from basis values b_i(x).
  std::vector<T> eigenfunction_values(std::span<const T> basis_values) const;
  /// Eigenvalue of T_N on every stored vector, in eigenfunction order.
  /// Throws DomainError if N was not computed.
  std::vector<T> eigenvalues(std::int64_t N) const;
};

using EigenSpace = EigenSpaceT<double>;
using SpectralDecomposition = SpectralDecompositionT<double>;
using SpectralDecompositionQ = SpectralDecompositionT<Quad>;

struct SpectralOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  /// Tables of normalised eigenvalues closer than this name the same space.
  double match_tolerance = 1e-7;
  /// Bound on ||T_N v - lambda v|| / ||T_N||_F.
  double residual_tolerance = 1e-9;
};

/// Splits the harmonic space of `basis` (which must carry its Gram matrix)
/// into joint eigenspaces of T_p, p in `primes`, then refines every space by
/// the operators in `extras` and records per-vector eigenvalues.
///
/// Throws DegeneracyError when a residual exceeds the tolerance; another seed
/// draws another random combination.
template <class T>
SpectralDecompositionT<T> joint_eigenspaces(const HarmonicBasis& basis, std::span<const std::int64_t> primes,
                                            std::span<const std::int64_t> extras, const SpectralOptions& options = {});

SpectralDecomposition joint_eigenspaces(int n, std::span<const std::int64_t> primes,
                                        std::span<const std::int64_t> extras, const SpectralOptions& options = {});

extern template SpectralDecompositionT<double> joint_eigenspaces<double>(const HarmonicBasis&,
                                                                         std::span<const std::int64_t>,
                                                                         std::span<const std::int64_t>,
                                                                         const SpectralOptions&);
extern template SpectralDecompositionT<Quad> joint_eigenspaces<Quad>(const HarmonicBasis&,
                                                                     std::span<const std::int64_t>,
                                                                     std::span<const std::int64_t>,
                                                                     const SpectralOptions&);
extern template struct SpectralDecompositionT<double>;
extern template struct SpectralDecompositionT<Quad>;

}  // namespace hs
