#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "k3lat/lattice.hpp"

namespace k3lat {

/// A hyperbolic frame: coordinates (e, f) with e^2 = f^2 = 0, <e,f> = -1,
/// orthogonal to every other basis vector.
struct Frame {
  std::size_t e = 0;
  std::size_t f = 1;
  bool operator==(const Frame&) const = default;
};

inline bool is_hyperbolic_frame(const IntegralLattice& l, const Frame& fr) {
  const IntMatrix& g = l.gram();
  if (fr.e >= l.rank() || fr.f >= l.rank() || fr.e == fr.f) return false;
  if (g(fr.e, fr.e) != 0 || g(fr.f, fr.f) != 0 || g(fr.e, fr.f) != -1) return false;
  for (std::size_t j = 0; j < l.rank(); ++j) {
    if (j == fr.e || j == fr.f) continue;
    if (g(fr.e, j) != 0 || g(fr.f, j) != 0) return false;
  }
  return true;
}

/// All frames (i, i+1) in basis order, non-overlapping.
inline std::vector<Frame> hyperbolic_frames(const IntegralLattice& l) {
  std::vector<Frame> out;
  for (std::size_t i = 0; i + 1 < l.rank();) {
    if (is_hyperbolic_frame(l, {i, i + 1})) {
      out.push_back({i, i + 1});
      i += 2;
    } else {
      ++i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generator tags. A word is a list of tags; word[0] acts first.

enum class GenKind { Exp, Eichler, Swap, Reflection, Negate };

struct GeneratorTag {
  GenKind kind = GenKind::Negate;
  Frame frame{};
  RatVector vec;  // B for Exp, b for Eichler, u for Reflection

  bool operator==(const GeneratorTag&) const = default;
};

using Word = std::vector<GeneratorTag>;

inline GeneratorTag inverse(const GeneratorTag& t) {
  GeneratorTag r = t;
  if (t.kind == GenKind::Exp || t.kind == GenKind::Eichler) r.vec = negated(t.vec);
  return r;
}

inline Word inverse(const Word& w) {
  Word r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(inverse(*it));
  return r;
}

inline Word concat(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline std::string to_string(const GeneratorTag& t) {
  std::ostringstream os;
  switch (t.kind) {
    case GenKind::Exp: os << "exp"; break;
    case GenKind::Eichler: os << "eichler"; break;
    case GenKind::Swap: os << "swap"; break;
    case GenKind::Reflection: os << "refl"; break;
    case GenKind::Negate: os << "neg"; break;
  }
  if (t.kind == GenKind::Exp || t.kind == GenKind::Eichler || t.kind == GenKind::Swap)
    os << ':' << t.frame.e << ',' << t.frame.f;
  if (t.kind == GenKind::Exp || t.kind == GenKind::Eichler || t.kind == GenKind::Reflection) {
    os << ':';
    for (std::size_t i = 0; i < t.vec.size(); ++i) os << (i ? "," : "") << t.vec[i].get_str();
  }
  return os.str();
}

inline GeneratorTag parse_tag(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty()) throw LatticeError("empty generator tag");
  auto split_commas = [](const std::string& x) {
    std::vector<std::string> out;
    std::stringstream in(x);
    for (std::string p; std::getline(in, p, ',');) out.push_back(p);
    return out;
  };
  auto parse_frame = [&](const std::string& x) {
    auto f = split_commas(x);
    if (f.size() != 2) throw LatticeError("malformed frame in tag: " + s);
    return Frame{std::stoul(f[0]), std::stoul(f[1])};
  };
  auto parse_vec = [&](const std::string& x) {
    RatVector v;
    for (const auto& c : split_commas(x)) {
      Rational q;
      if (q.set_str(c, 10) != 0) throw LatticeError("malformed rational in tag: " + s);
      q.canonicalize();
      v.push_back(q);
    }
    return v;
  };
  GeneratorTag t;
  const std::string& k = parts[0];
  if (k == "exp" || k == "eichler") {
    if (parts.size() != 3) throw LatticeError("malformed tag: " + s);
    t.kind = k == "exp" ? GenKind::Exp : GenKind::Eichler;
    t.frame = parse_frame(parts[1]);
    t.vec = parse_vec(parts[2]);
  } else if (k == "swap") {
    if (parts.size() != 2) throw LatticeError("malformed tag: " + s);
    t.kind = GenKind::Swap;
    t.frame = parse_frame(parts[1]);
  } else if (k == "refl") {
    if (parts.size() != 2) throw LatticeError("malformed tag: " + s);
    t.kind = GenKind::Reflection;
    t.vec = parse_vec(parts[1]);
  } else if (k == "neg") {
    if (parts.size() != 1) throw LatticeError("malformed tag: " + s);
    t.kind = GenKind::Negate;
  } else {
    throw LatticeError("unknown generator kind: " + k);
  }
  return t;
}

/// Checks that a tag makes sense on l (frame shape, vector orthogonal to the frame).
inline void validate_tag(const IntegralLattice& l, const GeneratorTag& t) {
  if (t.kind == GenKind::Negate) return;
  if (t.kind != GenKind::Reflection && !is_hyperbolic_frame(l, t.frame))
    throw LatticeError("tag frame is not a hyperbolic frame: " + to_string(t));
  if (t.kind == GenKind::Swap) return;
  if (t.vec.size() != l.rank()) throw LatticeError("tag vector has wrong length");
  if (t.kind == GenKind::Reflection) {
    if (l.square(t.vec) == 0) throw LatticeError("reflection in an isotropic vector");
    return;
  }
  if (t.vec[t.frame.e] != 0 || t.vec[t.frame.f] != 0)
    throw LatticeError("B-field must not touch the frame coordinates");
  if (t.kind == GenKind::Eichler && !is_integral(t.vec))
    throw LatticeError("Eichler transvection needs an integral vector");
}

/// Action of a single generator on a rational vector.
inline RatVector apply_tag(const IntegralLattice& l, const GeneratorTag& t, RatVector x) {
  const std::size_t ei = t.frame.e, fi = t.frame.f;
  switch (t.kind) {
    case GenKind::Exp: {
      const Rational r = x[ei], s = x[fi];
      const Rational cb = l.inner(x, t.vec);
      for (std::size_t i = 0; i < x.size(); ++i)
        if (t.vec[i] != 0) x[i] += r * t.vec[i];
      x[fi] = r * l.square(t.vec) / 2 + s + cb;
      return x;
    }
    case GenKind::Eichler: {
      const Rational r = x[ei], s = x[fi];
      const Rational bc = l.inner(x, t.vec);
      for (std::size_t i = 0; i < x.size(); ++i)
        if (t.vec[i] != 0) x[i] -= s * t.vec[i];
      x[ei] = r - bc + s * l.square(t.vec) / 2;
      return x;
    }
    case GenKind::Swap:
      std::swap(x[ei], x[fi]);
      return x;
    case GenKind::Reflection: {
      const Rational c = 2 * l.inner(x, t.vec) / l.square(t.vec);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * t.vec[i];
      return x;
    }
    case GenKind::Negate:
      for (auto& c : x) c = -c;
      return x;
  }
  return x;
}

inline RatVector apply_word(const IntegralLattice& l, const Word& w, RatVector x) {
  for (const auto& t : w) x = apply_tag(l, t, std::move(x));
  return x;
}

inline IntVector apply_word(const IntegralLattice& l, const Word& w, const IntVector& x) {
  return to_integral(apply_word(l, w, to_rational(x)));
}

// ---------------------------------------------------------------------------

/// Linear map num/den between lattices, acting on column vectors.
struct Isometry {
  IntegralLattice domain;
  IntegralLattice codomain;
  IntMatrix num;
  Integer den = 1;
  std::optional<Word> word;

  bool integral() const { return den == 1; }

  RatMatrix matrix() const {
    RatMatrix m(num.rows(), num.cols());
    for (std::size_t i = 0; i < num.rows(); ++i)
      for (std::size_t j = 0; j < num.cols(); ++j) {
        m(i, j) = Rational(num(i, j), den);
        m(i, j).canonicalize();
      }
    return m;
  }

  RatVector operator()(const RatVector& x) const {
    RatVector y = mul(num, x);
    for (auto& c : y) c /= den;
    return y;
  }

  RatVector operator()(const IntVector& x) const { return (*this)(to_rational(x)); }

  /// Image of an integral vector, which must be integral.
  IntVector apply_int(const IntVector& x) const { return to_integral((*this)(x)); }
};

inline void normalize(Isometry& g) {
  if (g.den < 0) {
    g.den = -g.den;
    for (std::size_t i = 0; i < g.num.rows(); ++i)
      for (std::size_t j = 0; j < g.num.cols(); ++j) g.num(i, j) = -g.num(i, j);
  }
  Integer c = g.den;
  for (std::size_t i = 0; i < g.num.rows() && c != 1; ++i)
    for (std::size_t j = 0; j < g.num.cols(); ++j) c = gcd(c, g.num(i, j));
  if (c > 1) {
    g.den /= c;
    for (std::size_t i = 0; i < g.num.rows(); ++i)
      for (std::size_t j = 0; j < g.num.cols(); ++j) mpz_divexact(g.num(i, j).get_mpz_t(), g.num(i, j).get_mpz_t(), c.get_mpz_t());
  }
}

inline Isometry from_rational(IntegralLattice dom, IntegralLattice cod, const RatMatrix& m,
                              std::optional<Word> word = std::nullopt) {
  Integer den = 1;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) den = lcm(den, m(i, j).get_den());
  IntMatrix num(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Rational q = m(i, j) * den;
      num(i, j) = q.get_num();
    }
  Isometry g{std::move(dom), std::move(cod), std::move(num), den, std::move(word)};
  normalize(g);
  return g;
}

inline Isometry identity(const IntegralLattice& l) {
  return Isometry{l, l, IntMatrix::identity(l.rank()), 1, Word{}};
}

/// Exact check of num^T G_cod num = den^2 G_dom.
inline bool verify(const Isometry& g) {
  if (g.num.rows() != g.codomain.rank() || g.num.cols() != g.domain.rank())
    throw LatticeError("isometry matrix has the wrong shape");
  IntMatrix lhs = g.num.transpose() * (g.codomain.gram() * g.num);
  const Integer d2 = g.den * g.den;
  for (std::size_t i = 0; i < lhs.rows(); ++i)
    for (std::size_t j = 0; j < lhs.cols(); ++j)
      if (lhs(i, j) != d2 * g.domain.gram()(i, j)) return false;
  return true;
}

/// g after h.
inline Isometry compose(const Isometry& g, const Isometry& h) {
  if (!(h.codomain == g.domain)) throw LatticeError("compose: codomain/domain mismatch");
  std::optional<Word> w;
  if (g.word && h.word) w = concat(*h.word, *g.word);
  Isometry c{h.domain, g.codomain, g.num * h.num, g.den * h.den, std::move(w)};
  normalize(c);
  return c;
}

inline Isometry inverse(const Isometry& g) {
  // For an isometry M^{-1} = G_dom^{-1} M^T G_cod.
  RatMatrix gi = inverse(to_rational(g.domain.gram()));
  RatMatrix m = gi * to_rational(g.num.transpose() * g.codomain.gram());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) /= g.den;
  std::optional<Word> w;
  if (g.word) w = inverse(*g.word);
  return from_rational(g.codomain, g.domain, m, std::move(w));
}

inline Isometry from_word(const IntegralLattice& l, const Word& w) {
  for (const auto& t : w) validate_tag(l, t);
  RatMatrix m(l.rank(), l.rank());
  for (std::size_t j = 0; j < l.rank(); ++j) {
    RatVector col = apply_word(l, w, to_rational(unit_vector(l.rank(), j)));
    for (std::size_t i = 0; i < l.rank(); ++i) m(i, j) = col[i];
  }
  return from_rational(l, l, m, w);
}

inline Isometry generator(const IntegralLattice& l, const GeneratorTag& t) { return from_word(l, Word{t}); }

inline Isometry exp_map(const IntegralLattice& l, Frame fr, const RatVector& b) {
  return generator(l, {GenKind::Exp, fr, b});
}

inline Isometry eichler(const IntegralLattice& l, Frame fr, const IntVector& b) {
  return generator(l, {GenKind::Eichler, fr, to_rational(b)});
}

inline Isometry swap_map(const IntegralLattice& l, Frame fr) { return generator(l, {GenKind::Swap, fr, {}}); }

inline Isometry reflection(const IntegralLattice& l, const IntVector& u) {
  return generator(l, {GenKind::Reflection, {}, to_rational(u)});
}

inline Isometry reflection(const LatticeVector& u) { return reflection(u.lattice, u.coords); }

inline Isometry negation(const IntegralLattice& l) { return generator(l, {GenKind::Negate, {}, {}}); }

/// Re-derives the matrix from the stored word and compares.
inline bool replay_matches(const Isometry& g) {
  if (!g.word || !(g.domain == g.codomain)) return false;
  Isometry r = from_word(g.domain, *g.word);
  return r.num == g.num && r.den == g.den;
}

// ---------------------------------------------------------------------------
// Orientation.

struct OrientationDatum {
  IntegralLattice lattice;
  std::vector<RatVector> basis;
};

inline RatMatrix gram_of(const IntegralLattice& l, const std::vector<RatVector>& vs) {
  RatMatrix g(vs.size(), vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) g(i, j) = g(j, i) = l.inner(vs[i], vs[j]);
  return g;
}

inline bool is_positive_definite(const RatMatrix& g) {
  // Leading principal minors (Sylvester).
  for (std::size_t k = 1; k <= g.rows(); ++k) {
    RatMatrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m(i, j) = g(i, j);
    if (determinant(m) <= 0) return false;
  }
  return true;
}

inline bool valid(const OrientationDatum& d) {
  return d.basis.size() == signature(d.lattice).first && is_positive_definite(gram_of(d.lattice, d.basis));
}

/// Greedy Gram-Schmidt: walks the candidates in order and keeps the residual
/// of each one whose residual has positive square, until `want` are kept.
/// `start` vectors are taken as already accepted (they must be orthogonal).
inline std::vector<RatVector> greedy_positive(const IntegralLattice& l, const std::vector<RatVector>& candidates,
                                              std::vector<RatVector> start, std::size_t want) {
  std::vector<RatVector> acc = std::move(start);
  std::vector<Rational> sq;
  for (const auto& a : acc) sq.push_back(l.square(a));
  for (const auto& c : candidates) {
    if (acc.size() >= want) break;
    RatVector r = c;
    for (std::size_t k = 0; k < acc.size(); ++k) {
      Rational coef = l.inner(c, acc[k]) / sq[k];
      if (coef == 0) continue;
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= coef * acc[k][i];
    }
    Rational q = l.square(r);
    if (q > 0) {
      acc.push_back(std::move(r));
      sq.push_back(q);
    }
  }
  return acc;
}

/// Standard candidates: e_i - f_i for each hyperbolic frame, then basis
/// vectors, then e_j + e_k and e_j - e_k.
inline std::vector<RatVector> orientation_candidates(const IntegralLattice& l) {
  const std::size_t n = l.rank();
  std::vector<RatVector> c;
  for (const auto& fr : hyperbolic_frames(l)) {
    RatVector x(n);
    x[fr.e] = 1;
    x[fr.f] = -1;
    c.push_back(std::move(x));
  }
  for (std::size_t i = 0; i < n; ++i) c.push_back(to_rational(unit_vector(n, i)));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k)
      for (int sgn : {1, -1}) {
        RatVector x(n);
        x[j] = 1;
        x[k] = sgn;
        c.push_back(std::move(x));
      }
  return c;
}

/// Positive-pivot columns of a congruence diagonalization; always spans a
/// maximal positive subspace.
inline std::vector<RatVector> positive_diagonal_basis(const IntegralLattice& l) {
  const std::size_t n = l.rank();
  std::vector<RatVector> out;
  std::vector<RatVector> done;
  std::vector<Rational> sq;
  // Gram-Schmidt over the basis and pairwise sums, keeping non-isotropic residuals.
  for (const auto& c : orientation_candidates(l)) {
    RatVector r = c;
    for (std::size_t k = 0; k < done.size(); ++k) {
      Rational coef = l.inner(c, done[k]) / sq[k];
      for (std::size_t i = 0; i < n; ++i) r[i] -= coef * done[k][i];
    }
    Rational q = l.square(r);
    if (q == 0) continue;
    done.push_back(r);
    sq.push_back(q);
    if (q > 0) out.push_back(r);
    if (done.size() == n) break;
  }
  return out;
}

inline OrientationDatum canonical_orientation(const IntegralLattice& l) {
  const std::size_t p = signature(l).first;
  auto basis = greedy_positive(l, orientation_candidates(l), {}, p);
  if (basis.size() < p) basis = positive_diagonal_basis(l);
  if (basis.size() != p) throw LatticeError("could not construct a positive orientation datum");
  return {l, std::move(basis)};
}

/// Sign of det <dcod_i, g(ddom_j)>; equals the sign of the projected map.
inline int orientation_sign(const Isometry& g, const OrientationDatum& dom, const OrientationDatum& cod) {
  if (!(dom.lattice == g.domain) || !(cod.lattice == g.codomain))
    throw LatticeError("orientation data do not match the isometry");
  if (dom.basis.size() != cod.basis.size()) throw LatticeError("orientation data differ in dimension");
  if (!is_positive_definite(gram_of(cod.lattice, cod.basis)) || !is_positive_definite(gram_of(dom.lattice, dom.basis)))
    throw LatticeError("orientation datum is not positive definite");
  const std::size_t p = dom.basis.size();
  std::vector<RatVector> images;
  for (const auto& x : dom.basis) images.push_back(g(x));
  RatMatrix m(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) m(i, j) = g.codomain.inner(cod.basis[i], images[j]);
  Rational d = determinant(m);
  if (d == 0) throw LatticeError("degenerate orientation comparison");
  return d > 0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Discriminant action.

struct DiscriminantAction {
  FiniteAbelianGroup group;
  // Column i: coefficients of the image of generator i.
  std::vector<std::vector<Integer>> images;

  bool trivial() const {
    for (std::size_t i = 0; i < images.size(); ++i)
      for (std::size_t j = 0; j < images[i].size(); ++j)
        if (images[i][j] != (i == j ? 1 : 0)) return false;
    return true;
  }
};

inline DiscriminantAction discriminant_action(const Isometry& g) {
  if (!g.integral()) throw LatticeError("discriminant action needs an integral isometry");
  if (!(g.domain == g.codomain)) throw LatticeError("discriminant action needs an endomorphism");
  DiscriminantAction a{discriminant_group(g.domain), {}};
  for (const auto& x : a.group.generators) a.images.push_back(discriminant_coefficients(g.domain, a.group, g(x)));
  return a;
}

inline bool is_discriminant_trivial(const Isometry& g) { return discriminant_action(g).trivial(); }

}  // namespace k3lat
