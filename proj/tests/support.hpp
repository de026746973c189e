#pragma once

// Random generators and brute-force oracles shared by the test suites.

#include <cstdlib>
#include <random>

#include "k3lat/k3lat.hpp"

namespace k3lat::testing {

inline unsigned suite_seed() {
  if (const char* s = std::getenv("K3LAT_SEED")) return static_cast<unsigned>(std::strtoul(s, nullptr, 10));
  return 20240611u;
}

class Gen {
 public:
  explicit Gen(unsigned seed = suite_seed()) : rng_(seed) {}

  long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }

  IntVector vector(std::size_t n, long bound) {
    IntVector v(n);
    for (auto& c : v) c = uniform(-bound, bound);
    return v;
  }

  IntVector nonzero_vector(std::size_t n, long bound) {
    for (;;) {
      IntVector v = vector(n, bound);
      if (!is_zero(v)) return v;
    }
  }

  /// Sparse vector: `support` random coordinates filled, the rest zero.
  IntVector sparse(std::size_t n, std::size_t support, long bound) {
    IntVector v(n);
    for (std::size_t i = 0; i < support; ++i) v[uniform(0, static_cast<long>(n) - 1)] = uniform(-bound, bound);
    return v;
  }

  IntMatrix matrix(std::size_t r, std::size_t c, long bound) {
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = uniform(-bound, bound);
    return m;
  }

  /// A vector orthogonal to both vectors of the frame, zero on the frame.
  IntVector off_frame(const IntegralLattice& l, Frame fr, std::size_t support, long bound) {
    IntVector b = sparse(l.rank(), support, bound);
    b[fr.e] = b[fr.f] = 0;
    return b;
  }

  /// Random word of at most `len` integral generators over the hyperbolic
  /// frames of l. Reflections are taken in e + f, of square -2.
  Word word(const IntegralLattice& l, std::size_t len, long bound = 2) {
    auto frames = hyperbolic_frames(l);
    Word w;
    const std::size_t count = static_cast<std::size_t>(uniform(1, static_cast<long>(len)));
    for (std::size_t i = 0; i < count; ++i) {
      const Frame fr = frames[uniform(0, static_cast<long>(frames.size()) - 1)];
      switch (uniform(0, 5)) {
        case 0:
        case 1: w.push_back({GenKind::Exp, fr, to_rational(off_frame(l, fr, 3, bound))}); break;
        case 2:
        case 3: w.push_back({GenKind::Eichler, fr, to_rational(off_frame(l, fr, 3, bound))}); break;
        case 4: w.push_back({GenKind::Swap, fr, {}}); break;
        default: {
          IntVector u(l.rank());
          u[fr.e] = 1;
          u[fr.f] = 1;  // (e + f)^2 = -2
          w.push_back({GenKind::Reflection, {}, to_rational(u)});
        }
      }
    }
    return w;
  }

  /// v with v^2 = 2n - 2 and v primitive, moved by a random word.
  IntVector mukai_vector(const IntegralLattice& l, long n, std::size_t len = 6) {
    IntVector v(l.rank());
    v[0] = 1;
    v[1] = -(n - 1);
    return apply_word(l, word(l, len), v);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Index of the sublattice spanned by the columns, as the gcd of maximal
/// minors (columns assumed independent).
inline Integer minor_gcd(const IntMatrix& cols) {
  const std::size_t n = cols.rows(), k = cols.cols();
  Integer g = 0;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    IntMatrix sub(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub(i, j) = cols(idx[i], j);
    g = gcd(g, determinant(sub));
    std::size_t p = k;
    while (p > 0 && idx[p - 1] == n - k + p - 1) --p;
    if (p == 0) break;
    ++idx[p - 1];
    for (std::size_t i = p; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return abs(g);
}

/// Divisibility by brute force: gcd of pairings with every unit vector.
inline Integer brute_divisibility(const IntegralLattice& l, const IntVector& x) {
  Integer g = 0;
  for (std::size_t i = 0; i < l.rank(); ++i) g = gcd(g, l.inner(x, unit_vector(l.rank(), i)));
  return g;
}

}  // namespace k3lat::testing
