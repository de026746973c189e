#pragma once

#include <optional>
#include <string>
#include <vector>

#include "k3lat/isometry.hpp"

namespace k3lat {

/// A lattice with a marked hyperbolic frame (e, f); the base is the
/// orthogonal complement of the frame, in the remaining coordinates.
struct ExtendedLattice {
  IntegralLattice full;
  Frame frame;
  IntegralLattice base;
  std::vector<std::size_t> base_index;  // full coordinate of each base coordinate

  std::size_t e() const { return frame.e; }
  std::size_t f() const { return frame.f; }

  RatVector embed(const RatVector& c) const {
    RatVector x(full.rank());
    for (std::size_t i = 0; i < base_index.size(); ++i) x[base_index[i]] = c[i];
    return x;
  }
  IntVector embed(const IntVector& c) const { return to_integral(embed(to_rational(c))); }

  /// Base component of a full vector (drops the frame coordinates).
  template <class T>
  std::vector<T> base_part(const std::vector<T>& x) const {
    std::vector<T> c(base_index.size());
    for (std::size_t i = 0; i < base_index.size(); ++i) c[i] = x[base_index[i]];
    return c;
  }

  IntVector e_vec() const { return unit_vector(full.rank(), frame.e); }
  IntVector f_vec() const { return unit_vector(full.rank(), frame.f); }
};

inline ExtendedLattice make_extended(const IntegralLattice& full, Frame fr) {
  if (!is_hyperbolic_frame(full, fr)) throw LatticeError("marked generators do not span an orthogonal U summand");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < full.rank(); ++i)
    if (i != fr.e && i != fr.f) idx.push_back(i);
  IntMatrix g(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) g(i, j) = full.gram()(idx[i], idx[j]);
  return {full, fr, IntegralLattice(g, full.label() + "-base"), idx};
}

/// base + U with e, f as the last two coordinates.
inline ExtendedLattice extend(const IntegralLattice& base) {
  const std::size_t n = base.rank();
  IntegralLattice full(block_diagonal(base.gram(), hyperbolic_gram()), base.label() + "+U");
  return make_extended(full, {n, n + 1});
}

/// A rational class b in the base, stored in full coordinates.
struct BField {
  RatVector b;
  Integer denominator() const { return common_denominator(b); }
  bool integral() const { return denominator() == 1; }
};

inline Isometry exp_B(const ExtendedLattice& E, const BField& B) {
  if (B.b.size() != E.full.rank()) throw LatticeError("B-field has the wrong length");
  if (B.b[E.e()] != 0 || B.b[E.f()] != 0) throw LatticeError("B-field touches the hyperbolic generators");
  return exp_map(E.full, E.frame, B.b);
}

inline Isometry eichler_transvection(const ExtendedLattice& E, const IntVector& b) {
  if (b.size() != E.full.rank()) throw LatticeError("transvection vector has the wrong length");
  if (b[E.e()] != 0 || b[E.f()] != 0) throw LatticeError("transvection vector touches the hyperbolic generators");
  return eichler(E.full, E.frame, b);
}

inline Isometry swap_ef(const ExtendedLattice& E) { return swap_map(E.full, E.frame); }

// ---------------------------------------------------------------------------

struct PsiProfile {
  Integer r, m, s, m_prime, s_prime;
  IntVector beta;   // codomain, full coordinates, zero on the frame
  IntVector alpha;  // domain, full coordinates, zero on the frame
};

namespace detail {

inline void split_hyperbolic(const ExtendedLattice& E, const IntVector& x, Integer& r, Integer& m, IntVector& dir,
                             Integer& s) {
  r = x[E.e()];
  s = x[E.f()];
  dir = x;
  dir[E.e()] = dir[E.f()] = 0;
  m = content(dir);
  if (m != 0)
    for (auto& c : dir) c /= m;
}

}  // namespace detail

/// Decomposes psi(f) = r e + m beta + s f and psi^{-1}(f) = r e + m' alpha + s' f
/// with beta, alpha primitive and m, m' >= 0 (beta = 0 when m = 0).
inline PsiProfile profile(const Isometry& psi, const ExtendedLattice& dom, const ExtendedLattice& cod) {
  if (!(psi.domain == dom.full) || !(psi.codomain == cod.full)) throw LatticeError("profile: lattice mismatch");
  RatVector pf = psi(dom.f_vec());
  RatVector qf = inverse(psi)(cod.f_vec());
  if (!is_integral(pf) || !is_integral(qf)) throw LatticeError("profile: psi(f) or psi^{-1}(f) is not integral");
  PsiProfile p;
  Integer r2;
  detail::split_hyperbolic(cod, to_integral(pf), p.r, p.m, p.beta, p.s);
  detail::split_hyperbolic(dom, to_integral(qf), r2, p.m_prime, p.alpha, p.s_prime);
  if (r2 != p.r) throw LatticeError("profile: the two e-coefficients disagree");
  if (p.r != -cod.full.inner(to_integral(pf), cod.f_vec())) throw LatticeError("profile: r mismatch");
  return p;
}

/// F + rho on (base + U), with rho given by its 2x2 matrix on (e, f).
inline Isometry block_sum(const Isometry& F, const RatMatrix& u_block, const ExtendedLattice& dom,
                          const ExtendedLattice& cod) {
  RatMatrix m(cod.full.rank(), dom.full.rank());
  RatMatrix fm = F.matrix();
  for (std::size_t i = 0; i < cod.base_index.size(); ++i)
    for (std::size_t j = 0; j < dom.base_index.size(); ++j) m(cod.base_index[i], dom.base_index[j]) = fm(i, j);
  const std::size_t ci[2] = {cod.e(), cod.f()}, di[2] = {dom.e(), dom.f()};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(ci[i], di[j]) = u_block(i, j);
  return from_rational(dom.full, cod.full, m);
}

inline RatMatrix u_identity() { return RatMatrix::identity(2); }

/// Matrix of the reflection in f - r e on (e, f): e -> f/r, f -> r e.
inline RatMatrix u_reflection(const Integer& r) {
  RatMatrix m(2, 2);
  m(1, 0) = Rational(1) / Rational(r);
  m(0, 1) = r;
  return m;
}

struct Diagonalization {
  Isometry F;         // base block, possibly rational
  Isometry residual;  // the reflection in f - r e on U
  Isometry conjugated;
};

inline Diagonalization diagonalize(const Isometry& psi, const PsiProfile& p, const ExtendedLattice& dom,
                                   const ExtendedLattice& cod) {
  if (p.r == 0) throw LatticeError("diagonalize: r(psi) = 0");
  BField left{scaled(to_rational(p.beta), Rational(-p.m) / Rational(p.r))};
  BField right{scaled(to_rational(p.alpha), Rational(p.m_prime) / Rational(p.r))};
  for (auto& q : left.b) q.canonicalize();
  for (auto& q : right.b) q.canonicalize();
  Isometry conj = compose(exp_B(cod, left), compose(psi, exp_B(dom, right)));

  RatMatrix cm = conj.matrix();
  RatMatrix fm(cod.base_index.size(), dom.base_index.size());
  for (std::size_t i = 0; i < cod.base_index.size(); ++i)
    for (std::size_t j = 0; j < dom.base_index.size(); ++j) fm(i, j) = cm(cod.base_index[i], dom.base_index[j]);
  Isometry F = from_rational(dom.base, cod.base, fm);
  RatMatrix ub = u_reflection(p.r);
  Isometry rebuilt = block_sum(F, ub, dom, cod);
  if (!(rebuilt.num == conj.num && rebuilt.den == conj.den))
    throw LatticeError("diagonalize: conjugated map is not block diagonal");
  if (!verify(F)) throw LatticeError("diagonalize: base block is not an isometry");
  IntegralLattice ul(hyperbolic_gram(), "U");
  Isometry res = from_rational(ul, ul, ub);
  return {std::move(F), std::move(res), std::move(conj)};
}

// ---------------------------------------------------------------------------

/// f^perp / f identified with the base through the section c -> c.
struct HyperbolicQuotient {
  SublatticeBasis fperp;  // basis of f^perp in full coordinates
  IntegralLattice induced;
};

inline HyperbolicQuotient hyperbolic_quotient(const ExtendedLattice& E) {
  SublatticeBasis fp = orthogonal_complement(E.full, E.f_vec());
  // f^perp / Z f: project every basis vector to the base.
  IntMatrix proj(E.base.rank(), fp.rank());
  for (std::size_t j = 0; j < fp.rank(); ++j) {
    IntVector c = E.base_part(fp.basis.column(j));
    for (std::size_t i = 0; i < c.size(); ++i) proj(i, j) = c[i];
  }
  SublatticeBasis img = saturate(proj);
  if (img.rank() != E.base.rank()) throw LatticeError("hyperbolic_quotient: unexpected rank");
  IntMatrix g = gram_of(E.base, img.basis);
  return {fp, IntegralLattice(g, E.base.label() + "-quotient")};
}

/// Map induced on base = f^perp/f by an isometry with psi(f) = f.
inline Isometry induced_on_quotient(const Isometry& psi, const ExtendedLattice& dom, const ExtendedLattice& cod) {
  RatVector pf = psi(dom.f_vec());
  if (pf != to_rational(cod.f_vec())) throw LatticeError("induced_on_quotient: psi(f) != f");
  RatMatrix m(cod.base.rank(), dom.base.rank());
  for (std::size_t j = 0; j < dom.base.rank(); ++j) {
    RatVector img = psi(dom.embed(unit_vector(dom.base.rank(), j)));
    if (img[cod.e()] != 0) throw LatticeError("induced_on_quotient: image leaves f^perp");
    RatVector c = cod.base_part(img);
    for (std::size_t i = 0; i < c.size(); ++i) m(i, j) = c[i];
  }
  return from_rational(dom.base, cod.base, m);
}

struct ExceptionalData {
  Integer ell, r0, m0, t;
  IntVector u;       // codomain, u^2 = -2
  int sign = 1;      // rho_u psi(f) = sign * f
  Isometry phi;      // induced base isometry
  IntVector shift;   // L in base coordinates of the domain
  Isometry psi_pp;   // sign * rho_u * psi = (phi + id) e^L
};

inline std::optional<ExceptionalData> exceptional_case(const Isometry& psi, const PsiProfile& p,
                                                       const ExtendedLattice& dom, const ExtendedLattice& cod) {
  if (p.r == 0) return std::nullopt;
  ExceptionalData x;
  x.ell = gcd(p.r, p.m);
  x.r0 = p.r / x.ell;
  x.m0 = p.m / x.ell;
  const Integer b2 = cod.full.square(p.beta);
  const Integer num = x.m0 * x.m0 * b2;  // m0^2 beta^2, even
  if (!divides(x.r0, num / 2 + 1)) return std::nullopt;
  if (!divides(2 * x.r0, num + 2)) return std::nullopt;
  x.t = (num + 2) / (2 * x.r0);
  x.u = scaled(p.beta, x.m0);
  x.u[cod.e()] = x.r0;
  x.u[cod.f()] = x.t;
  if (cod.full.square(x.u) != -2) throw LatticeError("exceptional_case: u^2 != -2");

  Isometry rho = reflection(cod.full, x.u);
  Isometry rp = compose(rho, psi);
  RatVector img = rp(dom.f_vec());
  RatVector fv = to_rational(cod.f_vec());
  if (img == fv) {
    x.sign = 1;
  } else if (img == negated(fv)) {
    x.sign = -1;
  } else {
    throw LatticeError("exceptional_case: rho_u psi(f) is not +-f");
  }
  x.psi_pp = x.sign == 1 ? rp : compose(negation(cod.full), rp);
  x.phi = induced_on_quotient(x.psi_pp, dom, cod);

  RatVector pe = x.psi_pp(dom.e_vec());
  if (pe[cod.e()] != 1) throw LatticeError("exceptional_case: psi''(e) has e-coefficient != 1");
  RatVector lam = cod.base_part(pe);
  RatVector shift = inverse(x.phi)(lam);
  x.shift = to_integral(shift);
  Isometry rebuilt = compose(block_sum(x.phi, u_identity(), dom, cod), exp_B(dom, BField{dom.embed(to_rational(x.shift))}));
  if (!(rebuilt.num == x.psi_pp.num && rebuilt.den == x.psi_pp.den))
    throw LatticeError("exceptional_case: psi'' does not factor as (phi + id) e^L");
  return x;
}

}  // namespace k3lat
