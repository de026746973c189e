#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "k3lat/extended.hpp"
#include "k3lat/transport.hpp"

namespace k3lat {

/// Rational stand-in for (Re sigma, Im sigma, h): an ordered positive 2-plane
/// in v^perp and a positive class orthogonal to it.
struct PeriodSurrogate {
  std::array<RatVector, 2> plane;
  std::optional<RatVector> kahler;
};

/// (L, v) with H^2 = v^perp computed once by saturation.
struct MukaiModel {
  IntegralLattice L;
  IntVector v;
  long n = 0;
  SublatticeBasis vperp;        // basis of v^perp in L coordinates
  IntegralLattice vperp_lattice;
  OrientationDatum orientation; // positive 3-plane of v^perp followed by v
  std::optional<PeriodSurrogate> period;
  std::optional<IntMatrix> algebraic;  // columns spanning the algebraic sublattice of L

  Integer modulus() const { return Integer(2 * n - 2); }

  /// The positive 3-plane of v^perp part of the orientation datum.
  std::vector<RatVector> positive_plane() const {
    return {orientation.basis.begin(), orientation.basis.end() - 1};
  }
};

inline std::vector<RatVector> concat_vectors(std::vector<RatVector> a, const std::vector<RatVector>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline RatVector project_away(const IntegralLattice& l, const RatVector& x, const IntVector& v) {
  Rational c = l.inner(x, v) / Rational(l.square(v));
  RatVector y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= c * v[i];
  return y;
}

/// Positive (p-1)-plane in v^perp: plane vectors first (if any), then the
/// greedy choice over the standard candidates projected to v^perp. The
/// projection is unchanged by v -> -v, so the full datum (plane, v) flips.
inline std::vector<RatVector> vperp_positive_plane(const IntegralLattice& l, const IntVector& v,
                                                   const std::vector<RatVector>& first) {
  const std::size_t want = signature(l).first - 1;
  std::vector<RatVector> cands = first;
  for (const auto& c : orientation_candidates(l)) cands.push_back(project_away(l, c, v));
  auto plane = greedy_positive(l, cands, {}, want);
  if (plane.size() == want) return plane;
  // Fall back to a full diagonalization of v^perp, after the given vectors.
  SublatticeBasis vp = orthogonal_complement(l, v);
  IntegralLattice sub = sublattice(l, vp, "vperp");
  std::vector<RatVector> extra;
  for (const auto& x : positive_diagonal_basis(sub)) extra.push_back(vp.embed(x));
  plane = greedy_positive(l, concat_vectors(first, extra), {}, want);
  if (plane.size() != want) throw LatticeError("could not find a positive plane in v^perp");
  return plane;
}

inline void set_orientation(MukaiModel& m, std::vector<RatVector> plane) {
  plane.push_back(to_rational(m.v));
  m.orientation = OrientationDatum{m.L, std::move(plane)};
  if (!is_positive_definite(gram_of(m.L, m.orientation.basis)))
    throw LatticeError("orientation datum is not positive definite");
}

inline MukaiModel make_model(const IntegralLattice& L, const IntVector& v,
                             std::optional<PeriodSurrogate> period = std::nullopt,
                             std::optional<IntMatrix> algebraic = std::nullopt) {
  if (v.size() != L.rank()) throw LatticeError("v has the wrong length");
  if (!is_primitive(v)) throw LatticeError("v is not primitive");
  const Integer v2 = L.square(v);
  if (v2 < 2) throw LatticeError("v^2 must be 2n-2 with n >= 2");
  MukaiModel m;
  m.L = L;
  m.v = v;
  m.n = Integer(v2 / 2 + 1).get_si();
  m.vperp = orthogonal_complement(L, v);
  m.vperp_lattice = sublattice(L, m.vperp, L.label() + "-vperp");
  auto [p, q] = signature(L);
  auto [pp, qq] = signature(m.vperp_lattice);
  if (pp + 1 != p || qq != q) throw LatticeError("v^perp has the wrong signature");

  std::vector<RatVector> first;
  if (period) {
    for (const auto& x : period->plane)
      if (L.inner(x, v) != 0) throw LatticeError("period plane is not orthogonal to v");
    RatMatrix g = gram_of(L, std::vector<RatVector>{period->plane[0], period->plane[1]});
    if (!is_positive_definite(g)) throw LatticeError("period plane is not positive definite");
    if (period->kahler) {
      const RatVector& h = *period->kahler;
      if (L.square(h) <= 0 || L.inner(h, v) != 0 || L.inner(h, period->plane[0]) != 0 ||
          L.inner(h, period->plane[1]) != 0)
        throw LatticeError("Kahler surrogate must be positive and orthogonal to v and the plane");
      first = {period->plane[0], period->plane[1], h};
    } else {
      first = {period->plane[0], period->plane[1]};
    }
    if (!algebraic) {
      IntMatrix rows(2, L.rank());
      for (int i = 0; i < 2; ++i) {
        RatVector gx = L.gram_times(period->plane[i]);
        Integer d = common_denominator(gx);
        for (std::size_t j = 0; j < L.rank(); ++j) rows(i, j) = Rational(gx[j] * d).get_num();
      }
      algebraic = integer_kernel(rows).basis;
    }
  }
  m.period = std::move(period);
  m.algebraic = std::move(algebraic);
  set_orientation(m, vperp_positive_plane(L, v, first));
  return m;
}

inline MukaiModel negate_v(const MukaiModel& m) {
  MukaiModel out = m;
  out.v = negated(m.v);
  set_orientation(out, m.positive_plane());
  return out;
}

// ---------------------------------------------------------------------------
// Delta classes.

struct DeltaClass {
  IntVector delta;
  std::string method;  // "canonical", "constrained", "enumeration", "given"
};

struct DeltaCheck {
  bool in_vperp = false, square = false, divisibility = false, integrality = false;
  bool ok() const { return in_vperp && square && divisibility && integrality; }
  std::string first_failure() const {
    if (!in_vperp) return "delta is not orthogonal to v";
    if (!square) return "delta^2 != 2-2n";
    if (!divisibility) return "div(delta) in v^perp != 2n-2";
    if (!integrality) return "(delta - v)/(2n-2) is not integral";
    return "";
  }
};

inline DeltaCheck check_delta(const MukaiModel& m, const IntVector& d) {
  DeltaCheck c;
  const Integer mod = m.modulus();
  c.in_vperp = m.L.inner(d, m.v) == 0;
  if (!c.in_vperp) return c;
  c.square = m.L.square(d) == -mod;
  c.divisibility = !is_zero(d) && divisibility(m.L, m.vperp, d) == mod;
  IntVector diff = subtracted(d, m.v);
  c.integrality = std::all_of(diff.begin(), diff.end(), [&](const Integer& x) { return divides(mod, x); });
  return c;
}

struct DeltaConstraint {
  Isometry phi;  // L -> L
  IntVector w;   // <phi(delta), w> = -r with r = (phi(v) - w)^2 / 2
};

struct DeltaConfig {
  long box = 8;
  TransportConfig transport{};
  long max_candidates = 50000000;
};

namespace detail {

inline bool satisfies_constraint(const MukaiModel& m, const DeltaConstraint& c, const IntVector& d) {
  IntVector pv = c.phi.apply_int(m.v);
  IntVector diff = subtracted(pv, c.w);
  const Integer r = m.L.square(diff) / 2;
  return m.L.inner(c.phi.apply_int(d), c.w) == -r;
}

inline std::optional<IntVector> enumerate_delta(const MukaiModel& m, const std::optional<DeltaConstraint>& c,
                                                const DeltaConfig& cfg) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < m.v.size(); ++i)
    if (m.v[i] != 0) support.push_back(i);
  for (std::size_t i = 0; i < 4 && i < m.v.size(); ++i)
    if (std::find(support.begin(), support.end(), i) == support.end()) support.push_back(i);
  std::sort(support.begin(), support.end());
  const std::size_t k = support.size();
  if (k > 8) return std::nullopt;
  long tried = 0;
  // Shells of increasing sup-norm keep small witnesses first.
  for (long radius = 1; radius <= cfg.box; ++radius) {
    std::vector<long> cur(k, -radius);
    for (;;) {
      bool on_shell = false;
      for (long x : cur) on_shell |= (x == radius || x == -radius);
      if (on_shell) {
        if (++tried > cfg.max_candidates) return std::nullopt;
        IntVector d(m.v.size());
        for (std::size_t i = 0; i < k; ++i) d[support[i]] = cur[i];
        if (check_delta(m, d).ok() && (!c || satisfies_constraint(m, *c, d))) return d;
      }
      std::size_t i = 0;
      while (i < k && cur[i] == radius) cur[i++] = -radius;
      if (i == k) break;
      ++cur[i];
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// The transport constructions run before the bounded box enumeration. Every
/// returned class is re-checked against the delta invariants.
inline DeltaClass find_delta(const MukaiModel& m, const std::optional<DeltaConstraint>& constraint = std::nullopt,
                             const DeltaConfig& cfg = {}) {
  const long n = m.n;
  auto accept = [&](IntVector d, const char* how) -> std::optional<DeltaClass> {
    if (!check_delta(m, d).ok()) return std::nullopt;
    if (constraint && !detail::satisfies_constraint(m, *constraint, d)) return std::nullopt;
    return DeltaClass{std::move(d), how};
  };
  auto frames = hyperbolic_frames(m.L);
  IntVector target(m.L.rank());
  if (!frames.empty()) {
    target[frames[0].e] = 1;
    target[frames[0].f] = n - 1;
  }

  if (!constraint && frames.size() >= 2) {
    Reduction red = eichler_reduce(m.L, m.v, frames[0], frames[1]);
    IntVector expect(m.L.rank());
    expect[frames[0].e] = 1;
    expect[frames[0].f] = -(n - 1);
    if (red.canonical == expect)
      if (auto d = accept(apply_word(m.L, inverse(red.word), target), "canonical")) return *d;
  }

  if (constraint && frames.size() >= 2) {
    const Isometry& phi = constraint->phi;
    if (!phi.integral() || !verify(phi)) throw LatticeError("constraint isometry is not an integral isometry");
    IntVector pv = phi.apply_int(m.v);
    const IntVector& w = constraint->w;
    if (m.L.square(w) != m.L.square(m.v)) throw LatticeError("constraint: w^2 != v^2");
    const Integer r = m.L.square(subtracted(pv, w)) / 2;
    IntVector p1(m.L.rank()), p2(m.L.rank());
    p1[frames[0].e] = 1;
    p1[frames[0].f] = -(n - 1);
    p2[frames[0].e] = 1;
    p2[frames[0].f] = -(n - 1) + r;
    p2[frames[1].e] = -1;
    p2[frames[1].f] = r;
    if (is_primitive_sublattice(std::vector<IntVector>{pv, w})) {
      TransportResult t = transport_pair(m.L, pv, p1, w, p2, cfg.transport);
      if (t.ok) {
        RatVector d = inverse(phi)(inverse(*t.map)(target));
        if (is_integral(d))
          if (auto dc = accept(to_integral(d), "constrained")) return *dc;
      }
    }
  }

  if (auto d = detail::enumerate_delta(m, constraint, cfg))
    if (auto dc = accept(*d, "enumeration")) return *dc;
  throw SearchExhausted("find_delta: no delta class found within the configured bounds");
}

// ---------------------------------------------------------------------------
// theta_v: delta modulo (2n-2) v^perp, in the fixed v^perp basis.

struct TorsionClass {
  IntVector coords;  // reduced into [0, modulus)
  Integer modulus;
  bool operator==(const TorsionClass&) const = default;
};

inline TorsionClass reduce_torsion(IntVector c, const Integer& mod) {
  for (auto& x : c) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
    x = r;
  }
  return {std::move(c), mod};
}

inline TorsionClass theta(const MukaiModel& m, const DeltaClass& d) {
  return reduce_torsion(m.vperp.coordinates(d.delta), m.modulus());
}

inline TorsionClass negate(const TorsionClass& t) { return reduce_torsion(negated(t.coords), t.modulus); }

/// Order of a torsion class: least k > 0 with k * coords in modulus * Z^rank.
inline Integer torsion_order(const TorsionClass& t) {
  const std::size_t n = t.coords.size();
  IntMatrix gens = IntMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) gens(i, i) = t.modulus;
  for (Integer k = 1; k <= t.modulus; ++k)
    if (in_lattice(gens, scaled(t.coords, k))) return k;
  throw LatticeError("torsion order exceeds the modulus");
}

// ---------------------------------------------------------------------------
// Brauer classes: rational classes of v^perp modulo Pic (x) Q + v^perp.

struct BrauerRep {
  RatVector bfield;  // L coordinates, inside v^perp (x) Q
  Integer denominator;
};

inline BrauerRep brauer_class(const MukaiModel& m, const RatVector& b) {
  if (!m.algebraic) throw LatticeError("brauer_class: no algebraic sublattice designated");
  if (m.L.inner(b, m.v) != 0) throw LatticeError("brauer_class: B-field is not orthogonal to v");
  return {b, common_denominator(b)};
}

/// Basis of Pic = algebraic cap v^perp, in v^perp coordinates.
inline IntMatrix picard_in_vperp(const MukaiModel& m) {
  if (!m.algebraic) throw LatticeError("no algebraic sublattice designated");
  const IntMatrix& a = *m.algebraic;
  // Kernel of a -> <., v> inside the span of a.
  IntMatrix row(1, a.cols());
  IntVector gv = m.L.gram_times(m.v);
  for (std::size_t j = 0; j < a.cols(); ++j) row(0, j) = dot(a.column(j), gv);
  SublatticeBasis k = integer_kernel(row);
  IntMatrix pic = a * k.basis;
  IntMatrix out(m.vperp.rank(), pic.cols());
  for (std::size_t j = 0; j < pic.cols(); ++j) {
    IntVector c = m.vperp.coordinates(pic.column(j));
    for (std::size_t i = 0; i < c.size(); ++i) out(i, j) = c[i];
  }
  return out;
}

/// d B in Pic + d v^perp, decided by Smith form membership.
inline bool brauer_trivial(const MukaiModel& m, const BrauerRep& rep) {
  const Integer d = rep.denominator;
  RatVector coords = m.vperp.coordinates(rep.bfield);
  IntVector beta = to_integral(scaled(coords, Rational(d)));
  IntMatrix pic = picard_in_vperp(m);
  const std::size_t r = m.vperp.rank();
  IntMatrix gens(r, pic.cols() + r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < pic.cols(); ++j) gens(i, j) = pic(i, j);
    gens(i, pic.cols() + i) = d;
  }
  return in_lattice(gens, beta);
}

inline bool brauer_eq(const MukaiModel& m, const BrauerRep& a, const BrauerRep& b) {
  return brauer_trivial(m, brauer_class(m, subtracted(a.bfield, b.bfield)));
}

inline BrauerRep theta_brauer(const MukaiModel& m, const DeltaClass& d, long multiple = 1) {
  RatVector b = scaled(to_rational(d.delta), Rational(multiple) / Rational(m.modulus()));
  for (auto& x : b) x.canonicalize();
  return brauer_class(m, b);
}

/// Divisibility of v inside the algebraic sublattice.
inline Integer algebraic_divisibility(const MukaiModel& m) {
  if (!m.algebraic) throw LatticeError("no algebraic sublattice designated");
  IntVector gv = m.L.gram_times(m.v);
  Integer g = 0;
  for (std::size_t j = 0; j < m.algebraic->cols(); ++j) g = gcd(g, dot(m.algebraic->column(j), gv));
  return g;
}

}  // namespace k3lat
