#include "hecke_sphere/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/parallel.hpp"

namespace hs {

namespace {

// G = R^T R blockwise over parity classes, with R = D^(1/2) L^T from the exact
// LDL^T of each block. R A R^(-1) is symmetric whenever A is G-self-adjoint.
template <class T>
struct Whitening {
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> block_of, pos;
  std::vector<SquareMatrix<T>> R, Rinv;

  explicit Whitening(const HarmonicBasis& basis) {
    const std::size_t dim = basis.dim();
    if (basis.gram.rows() != dim) throw DomainError("spectral decomposition needs the Gram matrix");
    std::map<int, std::size_t> slot;
    block_of.resize(dim);
    pos.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      auto [it, inserted] = slot.try_emplace(basis.parity_class(j), blocks.size());
      if (inserted) blocks.emplace_back();
      block_of[j] = it->second;
      pos[j] = blocks[it->second].size();
      blocks[it->second].push_back(j);
    }
    for (const auto& idx : blocks) {
      const std::size_t s = idx.size();
      QMatrix g(s, s);
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b) g(a, b) = basis.gram(idx[a], idx[b]);
      const LdlFactor f = ldl_decompose(g);
      const QMatrix linv = unit_lower_inverse(f.lower);
      std::vector<T> sq(s);
      for (std::size_t a = 0; a < s; ++a) {
        if (f.diagonal[a] <= 0) throw InvariantError("Gram matrix is not positive definite");
        sq[a] = real_sqrt(real_from<T>(f.diagonal[a]));
      }
      SquareMatrix<T> r(s), ri(s);
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = a; b < s; ++b) {
          r(a, b) = sq[a] * real_from<T>(f.lower(b, a));
          ri(a, b) = real_from<T>(linv(b, a)) / sq[b];
        }
      R.push_back(std::move(r));
      Rinv.push_back(std::move(ri));
    }
  }

  SquareMatrix<T> transform(const SquareMatrix<T>& a, unsigned threads) const {
    const std::size_t dim = a.n;
    SquareMatrix<T> m1(dim), out(dim);
    parallel_for(dim, threads, [&](std::size_t k) {
      for (std::size_t j = 0; j < dim; ++j) {
        const auto& blk = blocks[block_of[j]];
        const auto& ri = Rinv[block_of[j]];
        T s = 0;
        for (std::size_t l : blk) {
          if (pos[l] > pos[j]) break;
          s += a(k, l) * ri(pos[l], pos[j]);
        }
        m1(k, j) = s;
      }
    });
    parallel_for(dim, threads, [&](std::size_t i) {
      const auto& blk = blocks[block_of[i]];
      const auto& r = R[block_of[i]];
      for (std::size_t j = 0; j < dim; ++j) {
        T s = 0;
        for (std::size_t k : blk) {
          if (pos[k] < pos[i]) continue;
          s += r(pos[i], pos[k]) * m1(k, j);
        }
        out(i, j) = s;
      }
    });
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i + 1; j < dim; ++j) out(i, j) = out(j, i) = (out(i, j) + out(j, i)) / 2;
    return out;
  }

  std::vector<T> coordinates(const std::vector<T>& u) const {
    std::vector<T> c(u.size(), T(0));
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto& blk = blocks[block_of[i]];
      const auto& ri = Rinv[block_of[i]];
      T s = 0;
      for (std::size_t l : blk)
        if (pos[l] >= pos[i]) s += ri(pos[i], pos[l]) * u[l];
      c[i] = s;
    }
    return c;
  }
};

template <class T>
SquareMatrix<T> scaled_operator(const HeckeMatrix& h) {
  const std::size_t d = h.dim();
  const mpq_class s = h.scale() / h.denominator;
  SquareMatrix<T> out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (h.entries(i, j) != 0) out(i, j) = real_from<T>(mpq_class(h.entries(i, j) * s));
  return out;
}

template <class T>
std::vector<T> column(const SquareMatrix<T>& m, std::size_t k) {
  std::vector<T> v(m.n);
  for (std::size_t i = 0; i < m.n; ++i) v[i] = m(i, k);
  return v;
}

bool is_odd_prime(std::int64_t p) {
  if (p < 3 || p % 2 == 0) return false;
  for (std::int64_t q = 3; q * q <= p; q += 2)
    if (p % q == 0) return false;
  return true;
}

}  // namespace

template <class T>
std::size_t SpectralDecompositionT<T>::total_dim() const {
  std::size_t s = 0;
  for (const auto& sp : spaces) s += sp.dim();
  return s;
}

template <class T>
std::vector<T> SpectralDecompositionT<T>::eigenfunction_values(std::span<const T> basis_values) const {
  std::vector<T> out;
  out.reserve(total_dim());
  for (const auto& sp : spaces)
    for (const auto& v : sp.vectors) {
      if (v.size() != basis_values.size()) throw DomainError("basis value count mismatch");
      T s = 0;
      for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * basis_values[i];
      out.push_back(s);
    }
  return out;
}

template <class T>
std::vector<T> SpectralDecompositionT<T>::eigenvalues(std::int64_t N) const {
  std::vector<T> out;
  out.reserve(total_dim());
  for (const auto& sp : spaces)
    for (const auto& table : sp.vector_lambda) {
      auto it = table.find(N);
      if (it == table.end())
        throw DomainError("eigenvalue of T_" + std::to_string(N) + " not computed; add it to the extras");
      out.push_back(it->second);
    }
  return out;
}

template struct SpectralDecompositionT<double>;
template struct SpectralDecompositionT<Quad>;

template <class T>
SpectralDecompositionT<T> joint_eigenspaces(const HarmonicBasis& basis, std::span<const std::int64_t> primes,
                                            std::span<const std::int64_t> extras, const SpectralOptions& options) {
  if (basis.n % 2) throw DomainError("joint_eigenspaces requires even n");
  if (primes.empty()) throw DomainError("joint_eigenspaces needs at least one prime");
  SpectralDecompositionT<T> dec;
  dec.n = basis.n;
  dec.seed = options.seed;
  dec.primes.assign(primes.begin(), primes.end());
  std::sort(dec.primes.begin(), dec.primes.end());
  dec.primes.erase(std::unique(dec.primes.begin(), dec.primes.end()), dec.primes.end());
  for (auto p : dec.primes)
    if (!is_odd_prime(p)) throw DomainError("generator " + std::to_string(p) + " is not an odd prime");
  for (auto N : extras) {
    if (N < 1) throw DomainError("Hecke index must be positive");
    if (N != 1 && !std::binary_search(dec.primes.begin(), dec.primes.end(), N)) dec.extras.push_back(N);
  }
  std::sort(dec.extras.begin(), dec.extras.end());
  dec.extras.erase(std::unique(dec.extras.begin(), dec.extras.end()), dec.extras.end());

  const std::size_t dim = basis.dim();
  const Whitening<T> white(basis);
  std::vector<std::int64_t> labels{1};
  labels.insert(labels.end(), dec.primes.begin(), dec.primes.end());
  std::vector<std::int64_t> all = labels;
  all.insert(all.end(), dec.extras.begin(), dec.extras.end());

  std::map<std::int64_t, SquareMatrix<T>> ops;
  std::map<std::int64_t, T> norms;
  for (auto N : all) {
    ops[N] = white.transform(scaled_operator<T>(hecke_matrix(basis, N, options.threads)), options.threads);
    norms[N] = frobenius_norm(ops[N]);
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> coef(1, 1000);
  SquareMatrix<T> comb(dim);
  for (auto p : dec.primes) {
    const T c = coef(rng);
    for (std::size_t i = 0; i < comb.a.size(); ++i) comb.a[i] += c * ops[p].a[i];
  }
  const SymmetricEigen<T> eig = symmetric_eigen(comb);

  // Group eigenvectors by their eigenvalue tables on 1 and the generators.
  struct Group {
    std::vector<double> table;
    std::vector<std::vector<T>> members;
  };
  std::vector<Group> groups;
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<T> u = column(eig.vectors, k);
    std::vector<double> table;
    for (auto N : labels) table.push_back(static_cast<double>(dot(u, multiply(ops[N], u))));
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      for (std::size_t t = 0; t < table.size(); ++t)
        if (std::fabs(g.table[t] - table[t]) > options.match_tolerance) return false;
      return true;
    });
    if (it == groups.end()) groups.push_back({table, {std::move(u)}});
    else it->members.push_back(std::move(u));
  }

  std::uniform_int_distribution<int> extra_coef(1, 1000);
  std::vector<T> extra_weights;
  for (std::size_t e = 0; e < dec.extras.size(); ++e) extra_weights.push_back(extra_coef(rng));

  for (auto& g : groups) {
    const std::size_t s = g.members.size();
    if (s > 1 && !dec.extras.empty()) {
      // Diagonalise a random combination of the extras restricted to the group.
      SquareMatrix<T> b(s);
      for (std::size_t e = 0; e < dec.extras.size(); ++e) {
        const auto& A = ops[dec.extras[e]];
        for (std::size_t q = 0; q < s; ++q) {
          const std::vector<T> aq = multiply(A, g.members[q]);
          for (std::size_t p = 0; p < s; ++p) b(p, q) += extra_weights[e] * dot(g.members[p], aq);
        }
      }
      const SymmetricEigen<T> sub = symmetric_eigen(b);
      std::vector<std::vector<T>> rotated(s, std::vector<T>(dim, T(0)));
      for (std::size_t q = 0; q < s; ++q)
        for (std::size_t p = 0; p < s; ++p) {
          const T w = sub.vectors(p, q);
          for (std::size_t i = 0; i < dim; ++i) rotated[q][i] += w * g.members[p][i];
        }
      g.members = std::move(rotated);
    }

    EigenSpaceT<T> space;
    for (auto N : labels) space.lambda[N] = 0;
    for (const auto& u : g.members) {
      std::map<std::int64_t, T> table;
      for (auto N : all) {
        const std::vector<T> au = multiply(ops[N], u);
        const T lam = dot(u, au);
        T r2 = 0;
        for (std::size_t i = 0; i < dim; ++i) r2 += (au[i] - lam * u[i]) * (au[i] - lam * u[i]);
        const double rel = static_cast<double>(real_sqrt(r2) / std::max(norms[N], T(1e-300)));
        dec.max_residual = std::max(dec.max_residual, norms[N] > 0 ? rel : 0.0);
        if (norms[N] > 0 && rel > options.residual_tolerance)
          throw DegeneracyError("eigenvector residual " + std::to_string(rel) + " for T_" + std::to_string(N) +
                                " at n=" + std::to_string(dec.n) + "; retry with another seed");
        table[N] = lam;
      }
      for (auto N : labels) space.lambda[N] += static_cast<double>(table[N]) / static_cast<double>(s);
      space.vector_lambda.push_back(std::move(table));
      space.vectors.push_back(white.coordinates(u));
    }
    space.t1_flag = space.lambda[1] > 0.5 ? 1 : 0;
    dec.spaces.push_back(std::move(space));
  }
  return dec;
}

template SpectralDecompositionT<double> joint_eigenspaces<double>(const HarmonicBasis&, std::span<const std::int64_t>,
                                                                  std::span<const std::int64_t>,
                                                                  const SpectralOptions&);
template SpectralDecompositionT<Quad> joint_eigenspaces<Quad>(const HarmonicBasis&, std::span<const std::int64_t>,
                                                              std::span<const std::int64_t>, const SpectralOptions&);

SpectralDecomposition joint_eigenspaces(int n, std::span<const std::int64_t> primes,
                                        std::span<const std::int64_t> extras, const SpectralOptions& options) {
  if (n % 2) throw DomainError("joint_eigenspaces requires even n");
  return joint_eigenspaces<double>(harmonic_basis(n, options.threads), primes, extras, options);
}

}  // namespace hs
