#pragma once

// The isometry of L + U attached to phi and two delta classes, its restriction
// to v^perp + U, and the parallel-transport test for maps v^perp -> w^perp.

#include <string>
#include <vector>

#include "k3lat/hk_model.hpp"

namespace k3lat {

/// Extends a word on L to L + U (the two new coordinates are zero).
inline Word pad_word(const Word& w, std::size_t extra) {
  Word out = w;
  for (auto& t : out)
    if (!t.vec.empty()) t.vec.resize(t.vec.size() + extra);
  return out;
}

inline RatVector pad(const RatVector& x, std::size_t extra) {
  RatVector y = x;
  y.resize(x.size() + extra);
  return y;
}

inline IntVector pad(const IntVector& x, std::size_t extra) {
  IntVector y = x;
  y.resize(x.size() + extra);
  return y;
}

struct PsiTilde {
  ExtendedLattice LU;  // L + U, frame at the last two coordinates
  Isometry map;
  Integer r;           // (phi(v) - w)^2 / 2
};

/// phi + id_U as a map of L + U.
inline Isometry extend_by_identity(const Isometry& phi, const ExtendedLattice& LU) {
  Isometry out = block_sum(phi, u_identity(), LU, LU);
  if (phi.word) out.word = pad_word(*phi.word, 2);
  return out;
}

inline PsiTilde build_psi_tilde(const MukaiModel& X, const MukaiModel& Y, const Isometry& phi, const DeltaClass& dv,
                                const DeltaClass& dw) {
  if (!(X.L == Y.L) || !(phi.domain == X.L) || !(phi.codomain == Y.L))
    throw LatticeError("build_psi_tilde: lattice mismatch");
  if (!phi.integral() || !verify(phi)) throw LatticeError("build_psi_tilde: phi is not an integral isometry");
  if (X.L.square(X.v) != Y.L.square(Y.v)) throw LatticeError("build_psi_tilde: v^2 != w^2");
  if (!check_delta(X, dv.delta).ok()) throw LatticeError("build_psi_tilde: " + check_delta(X, dv.delta).first_failure());
  if (!check_delta(Y, dw.delta).ok()) throw LatticeError("build_psi_tilde: " + check_delta(Y, dw.delta).first_failure());

  const IntegralLattice& L = X.L;
  PsiTilde out{extend(L), {}, 0};
  const Integer mod = X.modulus();
  IntVector pv = phi.apply_int(X.v);
  IntVector b = subtracted(pv, Y.v);
  const Integer b2 = L.square(b);
  if (L.inner(pv, b) * 2 != b2) throw LatticeError("build_psi_tilde: <phi(v), phi(v)-w> != (phi(v)-w)^2/2");
  out.r = b2 / 2;

  auto bfield = [&](const IntVector& x) {
    RatVector q = pad(to_rational(x), 2);
    for (auto& c : q) {
      c /= mod;
      c.canonicalize();
    }
    return BField{q};
  };
  Isometry right = exp_B(out.LU, bfield(subtracted(X.v, dv.delta)));
  Isometry left = exp_B(out.LU, bfield(subtracted(dw.delta, Y.v)));
  Isometry tv = eichler_transvection(out.LU, pad(b, 2));
  Isometry phit = extend_by_identity(phi, out.LU);
  out.map = compose(left, compose(tv, compose(phit, right)));
  if (!out.map.integral()) throw LatticeError("build_psi_tilde: result is not integral");
  if (out.map.apply_int(pad(X.v, 2)) != pad(Y.v, 2)) throw LatticeError("build_psi_tilde: psi(v) != w");
  return out;
}

// ---------------------------------------------------------------------------

/// v^perp + U for a model, with the U frame last.
inline ExtendedLattice vperp_extended(const MukaiModel& m) { return extend(m.vperp_lattice); }

/// Orientation datum of v^perp + U: the positive plane of v^perp, then e - f.
inline OrientationDatum vperp_extended_orientation(const MukaiModel& m, const ExtendedLattice& E) {
  std::vector<RatVector> basis;
  for (const auto& x : m.positive_plane()) basis.push_back(E.embed(m.vperp.coordinates(x)));
  RatVector ef(E.full.rank());
  ef[E.e()] = 1;
  ef[E.f()] = -1;
  basis.push_back(ef);
  return {E.full, std::move(basis)};
}

/// Orientation datum of v^perp alone (the positive plane).
inline OrientationDatum vperp_orientation(const MukaiModel& m) {
  std::vector<RatVector> basis;
  for (const auto& x : m.positive_plane()) basis.push_back(m.vperp.coordinates(x));
  return {m.vperp_lattice, std::move(basis)};
}

struct Restriction {
  ExtendedLattice dom, cod;
  Isometry map;
};

inline Restriction restrict_to_vperp(const PsiTilde& pt, const MukaiModel& X, const MukaiModel& Y) {
  if (pt.map.apply_int(pad(X.v, 2)) != pad(Y.v, 2)) throw LatticeError("restrict_to_vperp: psi(v) != w");
  Restriction out{vperp_extended(X), vperp_extended(Y), {}};
  const std::size_t kx = X.vperp.rank(), ky = Y.vperp.rank(), n = X.L.rank();
  IntMatrix m(ky + 2, kx + 2);
  for (std::size_t j = 0; j < kx + 2; ++j) {
    IntVector src(n + 2);
    if (j < kx) {
      IntVector col = X.vperp.basis.column(j);
      std::copy(col.begin(), col.end(), src.begin());
    } else {
      src[n + (j - kx)] = 1;
    }
    IntVector img = pt.map.apply_int(src);
    IntVector lpart(img.begin(), img.begin() + static_cast<long>(n));
    IntVector c = Y.vperp.coordinates(lpart);
    for (std::size_t i = 0; i < ky; ++i) m(i, j) = c[i];
    m(ky, j) = img[n];
    m(ky + 1, j) = img[n + 1];
  }
  out.map = Isometry{out.dom.full, out.cod.full, std::move(m), 1, std::nullopt};
  if (!verify(out.map)) throw LatticeError("restrict_to_vperp: restriction is not an isometry");
  return out;
}

/// psi~(p + <delta_v, p>/(2n-2) f) == phi(p) + <phi(p), delta_w>/(2n-2) f for
/// each vector p of the period plane of X.
inline bool twisted_period_relation(const PsiTilde& pt, const MukaiModel& X, const MukaiModel& Y, const Isometry& phi,
                                    const DeltaClass& dv, const DeltaClass& dw) {
  if (!X.period) throw LatticeError("twisted_period_relation: no period plane on the domain model");
  const std::size_t n = X.L.rank();
  const Rational mod(X.modulus());
  for (const auto& p : X.period->plane) {
    RatVector src = pad(p, 2);
    src[n + 1] = X.L.inner(to_rational(dv.delta), p) / mod;
    RatVector pp = phi(p);
    RatVector expect = pad(pp, 2);
    expect[n + 1] = Y.L.inner(pp, to_rational(dw.delta)) / mod;
    if (pt.map(src) != expect) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

struct ParallelTransport {
  bool accepted = false;
  int lift_sign = 0;             // rho lifts to L with v -> lift_sign * w
  bool delta_route = false;      // rho(delta_v) is a delta class for lift_sign * w
  bool integral_route = false;   // the rational lift to L is integral
  bool literal_equal = false;    // rho(delta_v) == lift_sign * delta_w as vectors
  bool theta_congruent = false;  // same, modulo (2n-2) w^perp
  std::string diagnostic;
};

namespace detail {

inline bool lift_is_integral(const Isometry& rho, const MukaiModel& X, const MukaiModel& Y) {
  // Lift: [Bw rho | w] [Bv | v]^{-1}.
  const std::size_t n = X.L.rank(), k = X.vperp.rank();
  RatMatrix src(n, n), dst(n, n);
  IntMatrix rm = Y.vperp.basis * rho.num;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      src(i, j) = X.vperp.basis(i, j);
      dst(i, j) = rm(i, j);
    }
  for (std::size_t i = 0; i < n; ++i) {
    src(i, k) = X.v[i];
    dst(i, k) = Y.v[i];
  }
  RatMatrix lift = dst * inverse(src);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (lift(i, j).get_den() != 1) return false;
  return true;
}

}  // namespace detail

/// rho: v^perp -> w^perp in the saturated bases of the two models. A lift
/// may send v to w or to -w; the first sign that works is reported.
inline ParallelTransport parallel_transport_check(const Isometry& rho, const MukaiModel& X, const MukaiModel& Y,
                                                  const DeltaClass& dv, const DeltaClass& dw) {
  if (!(rho.domain == X.vperp_lattice) || !(rho.codomain == Y.vperp_lattice))
    throw LatticeError("parallel_transport_check: rho must map v^perp to w^perp");
  if (!rho.integral() || !verify(rho)) throw LatticeError("parallel_transport_check: rho is not an integral isometry");
  if (orientation_sign(rho, vperp_orientation(X), vperp_orientation(Y)) != 1)
    throw LatticeError("parallel_transport_check: rho is not orientation preserving");

  IntVector img = Y.vperp.embed(rho.apply_int(X.vperp.coordinates(dv.delta)));
  ParallelTransport out;
  for (int sign : {1, -1}) {
    MukaiModel Ys = sign == 1 ? Y : negate_v(Y);
    DeltaClass ds{sign == 1 ? dw.delta : negated(dw.delta), "signed"};
    ParallelTransport cur;
    cur.lift_sign = sign;
    cur.literal_equal = img == ds.delta;
    cur.delta_route = check_delta(Ys, img).ok();
    cur.theta_congruent = cur.delta_route && theta(Ys, DeltaClass{img, "image"}) == theta(Ys, ds);
    cur.integral_route = detail::lift_is_integral(rho, X, Ys);
    if (cur.delta_route != cur.integral_route) {
      cur.diagnostic = "the delta-class route and the integrality route disagree";
      throw LatticeError("parallel_transport_check: " + cur.diagnostic);
    }
    cur.accepted = cur.delta_route;
    if (cur.accepted) return cur;
    if (sign == 1) out = cur;
  }
  out.lift_sign = 0;
  out.diagnostic = "rho(delta_v) is not a delta class for w or -w";
  return out;
}

}  // namespace k3lat
