#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "k3lat/arith.hpp"

namespace k3lat {

/// Even nondegenerate integral lattice given by its Gram matrix. Copies share
/// the immutable Gram data.
class IntegralLattice {
 public:
  IntegralLattice() = default;

  IntegralLattice(IntMatrix gram, std::string label) {
    const std::size_t n = gram.rows();
    if (n == 0 || gram.cols() != n) throw LatticeError("Gram matrix must be square and non-empty");
    for (std::size_t i = 0; i < n; ++i) {
      if (!divides(2, gram(i, i))) throw LatticeError("lattice is not even");
      for (std::size_t j = 0; j < i; ++j)
        if (gram(i, j) != gram(j, i)) throw LatticeError("Gram matrix is not symmetric");
    }
    Integer det = determinant(gram);
    if (det == 0) throw LatticeError("Gram matrix is degenerate");
    data_ = std::make_shared<const Data>(Data{std::move(gram), std::move(label), det});
  }

  std::size_t rank() const { return data_ ? data_->gram.rows() : 0; }
  const IntMatrix& gram() const { return data_->gram; }
  const std::string& label() const { return data_->label; }
  const Integer& det() const { return data_->det; }
  bool valid() const { return static_cast<bool>(data_); }

  bool operator==(const IntegralLattice& o) const {
    return data_ == o.data_ || (data_ && o.data_ && data_->gram == o.data_->gram);
  }

  Integer inner(const IntVector& x, const IntVector& y) const {
    check_length(x.size());
    check_length(y.size());
    const IntMatrix& g = gram();
    Integer s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < y.size(); ++j)
        if (y[j] != 0 && g(i, j) != 0) s += x[i] * g(i, j) * y[j];
    }
    return s;
  }

  Rational inner(const RatVector& x, const RatVector& y) const {
    check_length(x.size());
    check_length(y.size());
    const IntMatrix& g = gram();
    Rational s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < y.size(); ++j)
        if (y[j] != 0 && g(i, j) != 0) s += x[i] * g(i, j) * y[j];
    }
    return s;
  }

  Rational inner(const RatVector& x, const IntVector& y) const { return inner(x, to_rational(y)); }
  Rational inner(const IntVector& x, const RatVector& y) const { return inner(to_rational(x), y); }

  Integer square(const IntVector& x) const { return inner(x, x); }
  Rational square(const RatVector& x) const { return inner(x, x); }

  /// G x, i.e. the functional y -> <x, y> in coordinates.
  IntVector gram_times(const IntVector& x) const {
    check_length(x.size());
    return gram() * x;
  }

  RatVector gram_times(const RatVector& x) const {
    check_length(x.size());
    return mul(gram(), x);
  }

 private:
  struct Data {
    IntMatrix gram;
    std::string label;
    Integer det;
  };

  void check_length(std::size_t n) const {
    if (n != rank()) throw LatticeError("vector length does not match lattice rank");
  }

  std::shared_ptr<const Data> data_;
};

/// A vector tied to its lattice; the scalar type selects integral or rational.
template <class Scalar>
struct BasicLatticeVector {
  IntegralLattice lattice;
  std::vector<Scalar> coords;

  BasicLatticeVector(IntegralLattice l, std::vector<Scalar> c) : lattice(std::move(l)), coords(std::move(c)) {
    if (coords.size() != lattice.rank()) throw LatticeError("coordinate count does not match lattice rank");
  }
};

using LatticeVector = BasicLatticeVector<Integer>;
using RationalVector = BasicLatticeVector<Rational>;

template <class A, class B>
auto inner(const BasicLatticeVector<A>& x, const BasicLatticeVector<B>& y) {
  if (!(x.lattice == y.lattice)) throw LatticeError("vectors belong to different lattices");
  return x.lattice.inner(x.coords, y.coords);
}

// ---------------------------------------------------------------------------
// Standard lattices. Basis orders are fixed: U is (e, f) with <e,f> = -1, and
// E8 follows the Bourbaki node numbering 1..8 (node 2 attached to node 4).

enum class StandardKind { U, E8Minus, K3, Mukai, K3n, RankOne };

inline IntMatrix block_diagonal(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, a.cols() + j) = b(i, j);
  return m;
}

inline IntMatrix hyperbolic_gram() {
  IntMatrix g(2, 2);
  g(0, 1) = g(1, 0) = -1;
  return g;
}

inline IntMatrix e8_gram() {
  static const int edges[7][2] = {{1, 3}, {3, 4}, {4, 2}, {4, 5}, {5, 6}, {6, 7}, {7, 8}};
  IntMatrix g(8, 8);
  for (std::size_t i = 0; i < 8; ++i) g(i, i) = 2;
  for (const auto& e : edges) g(e[0] - 1, e[1] - 1) = g(e[1] - 1, e[0] - 1) = -1;
  return g;
}

inline IntegralLattice direct_sum(const IntegralLattice& a, const IntegralLattice& b) {
  return IntegralLattice(block_diagonal(a.gram(), b.gram()), a.label() + "+" + b.label());
}

inline IntegralLattice rescale(const IntegralLattice& l, const Integer& c) {
  if (c == 0) throw LatticeError("rescaling factor must be non-zero");
  IntMatrix g = l.gram();
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) *= c;
  return IntegralLattice(std::move(g), l.label() + "(" + c.get_str() + ")");
}

/// param is n for K3n and the diagonal entry for RankOne; ignored otherwise.
inline IntegralLattice build_standard(StandardKind kind, long param = 0) {
  IntMatrix u = hyperbolic_gram();
  IntMatrix e8m = e8_gram();
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) e8m(i, j) = -e8m(i, j);
  auto k3_gram = [&] {
    IntMatrix g = block_diagonal(block_diagonal(u, u), u);
    return block_diagonal(block_diagonal(g, e8m), e8m);
  };
  switch (kind) {
    case StandardKind::U:
      return IntegralLattice(u, "U");
    case StandardKind::E8Minus:
      return IntegralLattice(e8m, "E8(-1)");
    case StandardKind::K3:
      return IntegralLattice(k3_gram(), "K3");
    case StandardKind::Mukai:
      return IntegralLattice(block_diagonal(u, k3_gram()), "Mukai");
    case StandardKind::K3n: {
      if (param < 2) throw LatticeError("K3n requires n >= 2");
      IntMatrix d(1, 1);
      d(0, 0) = 2 - 2 * param;
      return IntegralLattice(block_diagonal(k3_gram(), d), "K3n(" + std::to_string(param) + ")");
    }
    case StandardKind::RankOne: {
      IntMatrix d(1, 1);
      d(0, 0) = param;
      return IntegralLattice(d, "<" + std::to_string(param) + ">");
    }
  }
  throw LatticeError("unknown standard lattice");
}

inline IntegralLattice mukai_lattice() { return build_standard(StandardKind::Mukai); }
inline IntegralLattice k3_lattice() { return build_standard(StandardKind::K3); }
inline IntegralLattice k3n_lattice(long n) { return build_standard(StandardKind::K3n, n); }

// ---------------------------------------------------------------------------
// Divisibility and primitivity.

inline Integer divisibility(const IntegralLattice& l, const IntVector& x) {
  if (is_zero(x)) throw LatticeError("divisibility of the zero vector");
  return content(l.gram_times(x));
}

inline Integer divisibility(const LatticeVector& x) { return divisibility(x.lattice, x.coords); }

/// Divisibility of x (ambient coordinates) measured inside the sublattice S.
inline Integer divisibility(const IntegralLattice& l, const SublatticeBasis& s, const IntVector& x) {
  if (is_zero(x)) throw LatticeError("divisibility of the zero vector");
  s.coordinates(x);
  return content(s.basis.transpose() * l.gram_times(x));
}

inline bool is_primitive(const IntVector& x) { return content(x) == 1; }

/// Columns of the Gram matrix of a family of vectors.
inline IntMatrix gram_of(const IntegralLattice& l, const IntMatrix& basis) {
  return basis.transpose() * (l.gram() * basis);
}

inline IntMatrix columns(const std::vector<IntVector>& vs, std::size_t rows) {
  return IntMatrix::from_columns(vs, rows);
}

/// Primitive closure (Q-span intersected with Z^n) of the columns of gens.
inline SublatticeBasis saturate(const IntMatrix& gens) {
  SmithForm sf = smith_normal_form(gens);
  const std::size_t n = gens.rows(), k = sf.rank;
  SublatticeBasis out{IntMatrix(n, k), IntMatrix(k, n)};
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      out.basis(i, j) = sf.P_inv(i, j);
      out.left_inverse(j, i) = sf.P(j, i);
    }
  return out;
}

inline SublatticeBasis saturate(const std::vector<LatticeVector>& gens) {
  if (gens.empty()) throw LatticeError("saturate needs at least one generator");
  std::vector<IntVector> cols;
  for (const auto& g : gens) {
    if (!(g.lattice == gens.front().lattice)) throw LatticeError("generators lie in different lattices");
    cols.push_back(g.coords);
  }
  return saturate(columns(cols, gens.front().lattice.rank()));
}

/// Index of span(gens) in its saturation; 0 never occurs (rank is the span rank).
inline Integer saturation_index(const IntMatrix& gens) {
  SmithForm sf = smith_normal_form(gens);
  Integer idx = 1;
  for (std::size_t i = 0; i < sf.rank; ++i) idx *= sf.S(i, i);
  return idx;
}

inline bool is_primitive_sublattice(const IntMatrix& gens) { return saturation_index(gens) == 1; }

inline bool is_primitive_sublattice(const std::vector<IntVector>& gens) {
  if (gens.empty()) return true;
  return is_primitive_sublattice(columns(gens, gens.front().size()));
}

/// Orthogonal complement of the columns of gens inside l.
inline SublatticeBasis orthogonal_complement(const IntegralLattice& l, const IntMatrix& gens) {
  return integer_kernel(gens.transpose() * l.gram());
}

inline SublatticeBasis orthogonal_complement(const IntegralLattice& l, const IntVector& x) {
  return orthogonal_complement(l, IntMatrix::from_columns({x}, l.rank()));
}

/// Lattice structure induced on a sublattice, in the coordinates of its basis.
inline IntegralLattice sublattice(const IntegralLattice& l, const SublatticeBasis& s, std::string label) {
  return IntegralLattice(gram_of(l, s.basis), std::move(label));
}

// ---------------------------------------------------------------------------
// Discriminant group L^v / L.

struct FiniteAbelianGroup {
  std::vector<Integer> invariant_factors;
  std::vector<RatVector> generators;
  // Row i of coefficient_map, applied to G y, gives the i-th coefficient of y.
  IntMatrix coefficient_map;

  Integer order() const {
    Integer o = 1;
    for (const auto& f : invariant_factors) o *= f;
    return o;
  }

  bool trivial() const { return invariant_factors.empty(); }
};

inline FiniteAbelianGroup discriminant_group(const IntegralLattice& l) {
  SmithForm sf = smith_normal_form(l.gram());
  FiniteAbelianGroup g;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < sf.rank; ++i) {
    const Integer& s = sf.S(i, i);
    if (s == 1) continue;
    g.invariant_factors.push_back(s);
    RatVector x(l.rank());
    for (std::size_t r = 0; r < l.rank(); ++r) {
      Rational q(sf.Q(r, i), s);
      q.canonicalize();
      x[r] = q - Rational(floor_div(q.get_num(), q.get_den()));
    }
    g.generators.push_back(std::move(x));
    rows.push_back(i);
  }
  g.coefficient_map = IntMatrix(rows.size(), l.rank());
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t c = 0; c < l.rank(); ++c) g.coefficient_map(k, c) = sf.P(rows[k], c);
  return g;
}

/// Coefficients of a dual-lattice element y in the generators, each reduced
/// modulo its invariant factor. Throws if y is not in L^v.
inline std::vector<Integer> discriminant_coefficients(const IntegralLattice& l, const FiniteAbelianGroup& g,
                                                      const RatVector& y) {
  RatVector gy = l.gram_times(y);
  if (!is_integral(gy)) throw LatticeError("vector is not in the dual lattice");
  IntVector c = g.coefficient_map * to_integral(gy);
  for (std::size_t i = 0; i < c.size(); ++i) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), c[i].get_mpz_t(), g.invariant_factors[i].get_mpz_t());
    c[i] = r;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Signature by exact symmetric Gaussian elimination.

inline std::pair<std::size_t, std::size_t> signature(const IntMatrix& gram) {
  const std::size_t n = gram.rows();
  RatMatrix a = to_rational(gram);
  std::size_t pos = 0, neg = 0;
  auto add_row_col = [&](std::size_t i, std::size_t j) {  // x_i += x_j as congruence
    for (std::size_t c = 0; c < n; ++c) a(i, c) += a(j, c);
    for (std::size_t r = 0; r < n; ++r) a(r, i) += a(r, j);
  };
  auto swap_row_col = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < n; ++c) std::swap(a(i, c), a(j, c));
    for (std::size_t r = 0; r < n; ++r) std::swap(a(r, i), a(r, j));
  };
  for (std::size_t k = 0; k < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, p) == 0) ++p;
      if (p < n) {
        swap_row_col(k, p);
      } else {
        std::size_t q = k + 1;
        while (q < n && a(k, q) == 0) ++q;
        if (q == n) continue;  // null direction: contributes neither sign
        add_row_col(k, q);
      }
    }
    const Rational piv = a(k, k);
    (piv > 0 ? pos : neg)++;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      Rational f = a(i, k) / piv;
      for (std::size_t j = k + 1; j < n; ++j)
        if (a(k, j) != 0) a(i, j) -= f * a(k, j);
    }
    for (std::size_t i = k + 1; i < n; ++i) a(i, k) = a(k, i) = 0;
  }
  return {pos, neg};
}

inline std::pair<std::size_t, std::size_t> signature(const IntegralLattice& l) { return signature(l.gram()); }

}  // namespace k3lat
