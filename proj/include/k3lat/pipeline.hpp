#pragma once

// Decision engine for pairs of Mukai vectors on a K3 surface with Pic = ZH.
//
// Everything lives in the Mukai lattice U^4 + E8(-1)^2. The surface part is
// A = span(e1, f1, H) with H = e4 - d f4, and (r, k, s) is r e1 + k H + s f1.
// The transcendental period is surrogated by the plane (e2 - f2, e3 - f3).

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "k3lat/criteria.hpp"
#include "k3lat/psi_tilde.hpp"

namespace k3lat {

class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Triple = std::array<Integer, 3>;

struct K3Input {
  Integer d;
  std::optional<IntMatrix> picard_gram;
  Triple v;  // (r1, k1, s1), rank one
  Triple w;  // (r, k, s)
};

struct DecideConfig {
  long bound_t = 1000000;
  long bound_k = 100000;
  DeltaConfig delta{};
};

inline Integer norm_of(const Triple& x, const Integer& d) { return x[1] * x[1] * d - x[0] * x[2]; }

inline Triple negated(const Triple& x) { return {-x[0], -x[1], -x[2]}; }

/// Validates the input; throws InvalidInput with the first violated condition.
inline long validate(const K3Input& in) {
  if (in.d <= 0) throw InvalidInput("d must be positive");
  if (in.picard_gram) {
    const IntMatrix& g = *in.picard_gram;
    if (g.rows() != 1 || g.cols() != 1 || g(0, 0) != 2 * in.d)
      throw InvalidInput("picard_gram must be [[2d]] (Picard rank one)");
  }
  for (const Triple* x : {&in.v, &in.w})
    if (gcd(gcd((*x)[0], (*x)[1]), (*x)[2]) != 1) throw InvalidInput("Mukai vectors must be primitive");
  const Integer nw = norm_of(in.w, in.d);
  if (nw <= 0) throw InvalidInput("k^2 d - r s must be positive");
  if (norm_of(in.v, in.d) != nw) throw InvalidInput("v and w must have the same square");
  if (in.v[0] != 1) throw InvalidInput("v must have rank r1 = 1");
  if (!nw.fits_slong_p() || nw > 1000000) throw InvalidInput("n is too large");
  return nw.get_si() + 1;
}

// ---------------------------------------------------------------------------

struct SurfaceSetup {
  IntegralLattice L;
  Integer d;
  IntVector e1, f1, H;
  IntMatrix algebraic;  // columns e1, H, f1
  std::array<RatVector, 2> plane;

  IntVector embed(const Triple& x) const {
    return added(added(scaled(e1, x[0]), scaled(H, x[1])), scaled(f1, x[2]));
  }
  Frame frame() const { return Frame{0, 1}; }
};

inline SurfaceSetup surface_setup(const Integer& d) {
  SurfaceSetup s{mukai_lattice(), d, {}, {}, {}, {}, {}};
  const std::size_t n = s.L.rank();
  s.e1 = unit_vector(n, 0);
  s.f1 = unit_vector(n, 1);
  s.H = unit_vector(n, 6);
  s.H[7] = -d;
  s.algebraic = columns({s.e1, s.H, s.f1}, n);
  for (int i = 0; i < 2; ++i) {
    RatVector p(n);
    p[2 + 2 * i] = 1;
    p[3 + 2 * i] = -1;
    s.plane[i] = p;
  }
  return s;
}

/// Sign of the first nonzero entry of (r, k, s).
inline int sigma(const Triple& x) {
  for (const auto& c : x)
    if (c != 0) return sgn(c);
  return 0;
}

/// h in A cap x^perp with h^2 > 0, signed so that (h, sigma(x) x) and
/// (e1 - f1, H) induce the same orientation on the positive part of A.
inline IntVector kahler_class(const SurfaceSetup& S, const Triple& t) {
  const IntegralLattice& L = S.L;
  IntVector x = S.embed(t);
  IntMatrix row(1, 3);
  IntVector gx = L.gram_times(x);
  for (std::size_t j = 0; j < 3; ++j) row(0, j) = dot(S.algebraic.column(j), gx);
  SublatticeBasis ker = integer_kernel(row);
  if (ker.rank() != 2) throw LatticeError("kahler_class: unexpected kernel rank");
  IntVector b1 = S.algebraic * ker.basis.column(0), b2 = S.algebraic * ker.basis.column(1);
  std::optional<IntVector> h;
  for (long rad = 1; rad <= 64 && !h; ++rad)
    for (long i = -rad; i <= rad && !h; ++i)
      for (long j = -rad; j <= rad && !h; ++j) {
        if (std::max(std::labs(i), std::labs(j)) != rad) continue;
        IntVector c = added(scaled(b1, Integer(i)), scaled(b2, Integer(j)));
        if (L.square(c) > 0 && is_primitive(c)) h = c;
      }
  if (!h) throw LatticeError("kahler_class: no positive class found");
  IntVector e_minus_f = subtracted(S.e1, S.f1);
  IntVector sx = scaled(x, Integer(sigma(t)));
  Integer det = L.inner(e_minus_f, *h) * L.inner(S.H, sx) - L.inner(e_minus_f, sx) * L.inner(S.H, *h);
  if (det == 0) throw LatticeError("kahler_class: degenerate orientation pairing");
  if (det < 0) *h = negated(*h);
  return *h;
}

inline MukaiModel surface_model(const SurfaceSetup& S, const Triple& t) {
  PeriodSurrogate p{S.plane, to_rational(kahler_class(S, t))};
  return make_model(S.L, S.embed(t), p, S.algebraic);
}

// ---------------------------------------------------------------------------

enum class Verdict { Birational, Case1, Case2, Case3, Failure };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Birational: return "birational";
    case Verdict::Case1: return "criterion-case-1";
    case Verdict::Case2: return "criterion-case-2";
    case Verdict::Case3: return "criterion-case-3";
    case Verdict::Failure: return "failure";
  }
  return "failure";
}

inline Verdict parse_verdict(const std::string& s) {
  for (Verdict v : {Verdict::Birational, Verdict::Case1, Verdict::Case2, Verdict::Case3, Verdict::Failure})
    if (to_string(v) == s) return v;
  throw InvalidInput("unknown verdict '" + s + "'");
}

/// Witnesses of the case analysis. Vectors of v^perp are in the saturated
/// v^perp basis of the respective model.
struct CaseWitness {
  PsiProfile profile;
  std::optional<Isometry> F;   // case 1: diagonal block; case 3: quotient isometry
  int F_sign = 0;              // orientation sign of F on the positive planes
  std::optional<IntVector> gamma;
  std::optional<Integer> k, s_k;
  std::optional<ExceptionalData> exceptional;
};

struct BrauerRecord {
  BrauerRep rep;
  bool trivial = false;
};

struct EquivalenceCertificate {
  int schema = 1;
  K3Input input;
  long n = 0;
  Verdict verdict = Verdict::Failure;
  std::string route;
  std::string diagnostic;
  int epsilon = 0;
  std::optional<Integer> t;
  Word phi_word;
  Triple target{};  // +-v
  IntVector delta_dom, delta_cod;
  std::optional<Isometry> psi_tilde;
  std::optional<Integer> r_psi;
  std::optional<CaseWitness> witness;
  std::optional<BrauerRecord> brauer_left, brauer_right;
  std::map<std::string, bool> flags;
  std::vector<std::string> replay_log;
};

inline Word phi_word_for(const SurfaceSetup& S, const Integer& t) {
  return Word{GeneratorTag{GenKind::Exp, S.frame(), to_rational(scaled(S.H, t))}};
}

/// Brauer records for [n delta_dom / (2n-2)] and [eps n delta_cod / (2n-2)].
inline std::pair<BrauerRecord, BrauerRecord> brauer_records(const MukaiModel& X, const MukaiModel& Y,
                                                            const IntVector& ddom, const IntVector& dcod, int eps) {
  BrauerRep l = theta_brauer(X, DeltaClass{ddom, "given"}, X.n);
  BrauerRep r = theta_brauer(Y, DeltaClass{dcod, "given"}, eps * Y.n);
  return {BrauerRecord{l, brauer_trivial(X, l)}, BrauerRecord{r, brauer_trivial(Y, r)}};
}

inline bool fine_moduli_hypothesis(const MukaiModel& X, const MukaiModel& Y) {
  return X.n == 2 || (algebraic_divisibility(X) == 1 && algebraic_divisibility(Y) == 1);
}

namespace detail {

inline IntVector vperp_coords(const MukaiModel& m, const IntVector& x) { return m.vperp.coordinates(x); }

/// Case analysis on the restriction of psi~ to v^perp + U.
inline void run_cases(EquivalenceCertificate& c, const MukaiModel& X, const MukaiModel& Y, const Restriction& R,
                      const DeltaClass& dv, const DeltaClass& dw, const DecideConfig& cfg) {
  CaseWitness wit;
  wit.profile = profile(R.map, R.dom, R.cod);
  const PsiProfile& p = wit.profile;
  c.flags["r_matches_norm"] = p.r == *c.r_psi;
  {
    IntVector src = pad(vperp_coords(X, dv.delta), 2), dst = pad(vperp_coords(Y, dw.delta), 2);
    c.flags["psi_delta_v_is_delta_w"] = R.map.apply_int(src) == dst;
  }
  if (p.r == 0) throw LatticeError("r(psi) = 0 after the sign choice");

  if (abs(p.r) == 1) {
    c.verdict = Verdict::Case1;
    Diagonalization dg = diagonalize(R.map, p, R.dom, R.cod);
    c.flags["F_integral"] = dg.F.integral();
    if (!dg.F.integral()) throw LatticeError("case 1: F is not integral");
    wit.F_sign = orientation_sign(dg.F, vperp_orientation(X), vperp_orientation(Y));
    if (wit.F_sign == -1) {
      // The U block reflects in f - r e of square 2r; for r = 1 it reverses
      // U, so F carries the opposite sign. -psi has r = -1 and F(-psi) = -F.
      Isometry neg = compose(negation(R.cod.full), R.map);
      PsiProfile q = profile(neg, R.dom, R.cod);
      Diagonalization dn = diagonalize(neg, q, R.dom, R.cod);
      bool minus = dn.F.den == dg.F.den;
      for (std::size_t i = 0; i < dg.F.num.rows() && minus; ++i)
        for (std::size_t j = 0; j < dg.F.num.cols(); ++j) minus = minus && dn.F.num(i, j) == -dg.F.num(i, j);
      c.flags["negated_psi_gives_minus_F"] = minus;
      c.replay_log.push_back("case 1: F reverses orientation, using -psi with r = " + q.r.get_str());
      dg = std::move(dn);
      wit.F_sign = orientation_sign(dg.F, vperp_orientation(X), vperp_orientation(Y));
    }
    c.flags["F_orientation_preserving"] = wit.F_sign == 1;
    if (wit.F_sign == 1) {
      ParallelTransport pt = parallel_transport_check(dg.F, X, Y, dv, dw);
      c.flags["parallel_transport"] = pt.accepted;
      c.flags["theta_congruent"] = pt.theta_congruent;
      c.replay_log.push_back("case 1: parallel transport lift sign " + std::to_string(pt.lift_sign));
    }
    wit.F = dg.F;
  } else if (auto ex = exceptional_case(R.map, p, R.dom, R.cod)) {
    c.verdict = Verdict::Case3;
    c.flags["quotient_integral"] = ex->phi.integral();
    if (!ex->phi.integral()) throw LatticeError("case 3: quotient isometry is not integral");
    IntVector img = ex->phi.apply_int(vperp_coords(X, dv.delta));
    c.flags["phi_A_equals_B"] = img == vperp_coords(Y, dw.delta);
    wit.F_sign = orientation_sign(ex->phi, vperp_orientation(X), vperp_orientation(Y));
    c.flags["F_orientation_preserving"] = wit.F_sign == 1;
    if (wit.F_sign == 1) {
      ParallelTransport pt = parallel_transport_check(ex->phi, X, Y, dv, dw);
      c.flags["parallel_transport"] = pt.accepted;
    }
    c.replay_log.push_back("case 3: reflection in u with u^2 = -2, sign " + std::to_string(ex->sign));
    wit.F = ex->phi;
    wit.exceptional = std::move(*ex);
  } else {
    c.verdict = Verdict::Case2;
    const int sg = sgn(p.r);
    const Integer r = abs(p.r), s = sg * p.s;
    IntVector beta = scaled(R.cod.base_part(p.beta), Integer(sg));
    IntVector dcod = vperp_coords(Y, dw.delta);
    SublatticeBasis lam = orthogonal_complement(Y.vperp_lattice, dcod);
    IntVector gamma = select_gamma(Y.vperp_lattice, lam, beta);
    const Integer g2 = Y.vperp_lattice.square(gamma);
    auto k = select_k(r, p.m, s, g2, cfg.bound_k);
    if (!k) throw SearchExhausted("case 2: no k with gcd(r, s_k) = 1 within the bound");
    wit.gamma = gamma;
    wit.k = *k;
    wit.s_k = s + *k * p.m + r * *k * *k * (g2 / 2);
    const Integer ell = gcd(r, p.m), r0 = r / ell, m0 = p.m / ell;
    const Integer b2 = Y.vperp_lattice.square(beta);
    c.flags["gcd_r_sk"] = gcd(r, *wit.s_k) == 1;
    c.flags["vb_condition"] = !divides(r0, m0 * m0 * b2 / 2 + 1);
    IntVector hk = added(scaled(beta, m0), scaled(gamma, r0 * *k));
    c.flags["vb_condition_shifted"] = !divides(r0, Y.vperp_lattice.square(hk) / 2 + 1);
    c.replay_log.push_back("case 2: gamma selected, k = " + k->get_str() + ", s_k = " + wit.s_k->get_str());
  }
  c.witness = std::move(wit);
}

}  // namespace detail

inline EquivalenceCertificate decide(const K3Input& in, const DecideConfig& cfg = {}) {
  EquivalenceCertificate c;
  c.input = in;
  c.n = validate(in);
  const SurfaceSetup S = surface_setup(in.d);
  const Triple& w = in.w;
  const Integer& r = w[0];
  const Integer& k = w[1];
  const Integer& s = w[2];
  try {
    MukaiModel X = surface_model(S, w);
    MukaiModel V = surface_model(S, in.v);
    c.flags["fine_moduli_hypothesis"] = fine_moduli_hypothesis(X, V);

    if (abs(r) == 1) {
      c.route = "birational";
      c.target = r == 1 ? in.v : negated(in.v);
      c.t = r == 1 ? Integer(in.v[1] - k) : Integer(k + in.v[1]);
    } else {
      c.route = "primitive-embedding";
      FindTResult ft = find_t(r, k, s, in.d, cfg.bound_t);
      c.replay_log.push_back("find_t scanned " + std::to_string(ft.scanned) + " values");
      if (!ft.t) throw SearchExhausted(ft.diagnostic);
      c.t = *ft.t;
      c.target = in.v;
    }
    c.phi_word = phi_word_for(S, *c.t);
    Isometry phi = from_word(S.L, c.phi_word);
    IntVector pw = phi.apply_int(X.v);
    c.replay_log.push_back("phi = exp(t H) with t = " + c.t->get_str());

    if (c.route == "primitive-embedding") {
      auto sh = shift_triple(w, *c.t, in.d);
      c.flags["gcd_criterion"] = gcd_criterion(sh[0], sh[1], sh[2]);
      c.flags["primitive_span"] = is_primitive_sublattice(std::vector<IntVector>{pw, V.v});
      if (!c.flags["primitive_span"])
        throw SearchExhausted("Span(phi(w), v) is not primitive: outside theorem hypotheses");
      if (S.L.square(subtracted(pw, V.v)) == 0) c.target = negated(in.v);
    }
    MukaiModel Y = surface_model(S, c.target);
    c.epsilon = orientation_sign(phi, X.orientation, V.orientation);

    if (c.route == "birational") {
      if (pw != Y.v) throw LatticeError("birational branch: phi(w) != +-v");
      DeltaClass dv = find_delta(X, std::nullopt, cfg.delta);
      c.delta_dom = dv.delta;
      c.delta_cod = phi.apply_int(dv.delta);
      c.flags["delta_cod_valid"] = check_delta(Y, c.delta_cod).ok();
      c.verdict = Verdict::Birational;
    } else {
      DeltaClass dv = find_delta(X, DeltaConstraint{phi, Y.v}, cfg.delta);
      DeltaClass dw{added(subtracted(phi.apply_int(dv.delta), pw), Y.v), "transported"};
      c.delta_dom = dv.delta;
      c.delta_cod = dw.delta;
      c.replay_log.push_back("delta_dom found by " + dv.method);
      PsiTilde pt = build_psi_tilde(X, Y, phi, dv, dw);
      c.r_psi = pt.r;
      c.psi_tilde = pt.map;
      c.flags["twisted_period_relation"] = twisted_period_relation(pt, X, Y, phi, dv, dw);
      Restriction R = restrict_to_vperp(pt, X, Y);
      detail::run_cases(c, X, Y, R, dv, dw, cfg);
    }
    auto [bl, br] = brauer_records(X, Y, c.delta_dom, c.delta_cod, c.epsilon);
    c.brauer_left = bl;
    c.brauer_right = br;
  } catch (const SearchExhausted& e) {
    c.verdict = Verdict::Failure;
    c.diagnostic = e.what();
  } catch (const LatticeError& e) {
    c.verdict = Verdict::Failure;
    c.diagnostic = e.what();
  }
  if (c.verdict == Verdict::Failure) {
    c.psi_tilde.reset();
    c.witness.reset();
    c.brauer_left.reset();
    c.brauer_right.reset();
  }
  return c;
}

}  // namespace k3lat
