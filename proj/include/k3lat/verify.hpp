#pragma once

// Independent re-check of an EquivalenceCertificate. Isometries are rebuilt
// from their words and compared with the stored matrices; the case analysis is
// recomputed and compared field by field.

#include <string>

#include "k3lat/pipeline.hpp"

namespace k3lat {

struct VerifyResult {
  bool ok = true;
  std::string failure;  // first failing check
  long checks = 0;

  explicit operator bool() const { return ok; }
};

namespace detail {

class Checker {
 public:
  VerifyResult result;

  bool operator()(bool cond, const std::string& what) {
    ++result.checks;
    if (!cond && result.ok) {
      result.ok = false;
      result.failure = what;
    }
    return cond;
  }
};

inline bool same(const Isometry& a, const Isometry& b) {
  return a.domain == b.domain && a.codomain == b.codomain && a.num == b.num && a.den == b.den;
}

inline bool same(const PsiProfile& a, const PsiProfile& b) {
  return a.r == b.r && a.m == b.m && a.s == b.s && a.m_prime == b.m_prime && a.s_prime == b.s_prime &&
         a.beta == b.beta && a.alpha == b.alpha;
}

inline bool same(const CaseWitness& a, const CaseWitness& b) {
  if (!same(a.profile, b.profile) || a.F_sign != b.F_sign) return false;
  if (a.F.has_value() != b.F.has_value() || (a.F && !same(*a.F, *b.F))) return false;
  if (a.gamma != b.gamma || a.k != b.k || a.s_k != b.s_k) return false;
  if (a.exceptional.has_value() != b.exceptional.has_value()) return false;
  if (a.exceptional) {
    const auto &x = *a.exceptional, &y = *b.exceptional;
    if (x.ell != y.ell || x.r0 != y.r0 || x.m0 != y.m0 || x.t != y.t || x.u != y.u || x.sign != y.sign ||
        x.shift != y.shift)
      return false;
  }
  return true;
}

inline bool same(const BrauerRecord& a, const BrauerRecord& b) {
  return a.rep.bfield == b.rep.bfield && a.rep.denominator == b.rep.denominator && a.trivial == b.trivial;
}

}  // namespace detail

inline VerifyResult verify_certificate(const EquivalenceCertificate& c) {
  detail::Checker check;
  auto done = [&] { return check.result; };
  try {
    if (!check(c.schema == 1, "schema version is not 1")) return done();
    long n = 0;
    try {
      n = validate(c.input);
    } catch (const InvalidInput& e) {
      check(false, std::string("input: ") + e.what());
      return done();
    }
    if (!check(c.n == n, "n does not match the input")) return done();
    if (c.verdict == Verdict::Failure) {
      check(!c.diagnostic.empty(), "failure certificate without a diagnostic");
      check(!c.psi_tilde && !c.witness && !c.brauer_left && !c.brauer_right,
            "failure certificate carries witnesses");
      return done();
    }

    const SurfaceSetup S = surface_setup(c.input.d);
    const Triple& w = c.input.w;
    MukaiModel X = surface_model(S, w);
    MukaiModel V = surface_model(S, c.input.v);
    if (!check(c.target == c.input.v || c.target == negated(c.input.v), "target is not +-v")) return done();
    MukaiModel Y = surface_model(S, c.target);
    std::map<std::string, bool> flags;
    flags["fine_moduli_hypothesis"] = fine_moduli_hypothesis(X, V);

    // phi = exp(t H), rebuilt from its word.
    if (!check(c.t.has_value(), "missing t")) return done();
    if (!check(c.phi_word == phi_word_for(S, *c.t), "phi word is not exp(t H)")) return done();
    Isometry phi = from_word(S.L, c.phi_word);
    if (!check(phi.integral() && verify(phi), "phi is not an integral isometry")) return done();
    check(orientation_sign(phi, X.orientation, V.orientation) == c.epsilon, "orientation sign epsilon");
    IntVector pw = phi.apply_int(X.v);

    check(check_delta(X, c.delta_dom).ok(), "delta_dom: " + check_delta(X, c.delta_dom).first_failure());
    check(check_delta(Y, c.delta_cod).ok(), "delta_cod: " + check_delta(Y, c.delta_cod).first_failure());

    if (c.verdict == Verdict::Birational) {
      check(abs(w[0]) == 1, "birational verdict needs r = +-1");
      check(c.route == "birational", "route");
      check(pw == Y.v, "phi(w) != target");
      check(c.delta_cod == phi.apply_int(c.delta_dom), "delta_cod != phi(delta_dom)");
      flags["delta_cod_valid"] = check_delta(Y, c.delta_cod).ok();
      check(!c.psi_tilde && !c.witness, "birational certificate carries case witnesses");
    } else {
      check(abs(w[0]) != 1, "criterion verdict with r = +-1");
      check(c.route == "primitive-embedding", "route");
      check(t_condition(w[0], w[1], w[2], c.input.d, *c.t), "gcd condition at t");
      auto sh = shift_triple(w, *c.t, c.input.d);
      check(S.embed(sh) == pw, "phi(w) != (r, k + r t, s + 2 k t d + r t^2 d)");
      flags["gcd_criterion"] = gcd_criterion(sh[0], sh[1], sh[2]);
      flags["primitive_span"] = is_primitive_sublattice(std::vector<IntVector>{pw, V.v});
      const bool minus = S.L.square(subtracted(pw, V.v)) == 0;
      check(c.target == (minus ? negated(c.input.v) : c.input.v), "target sign rule");
      const Integer r = S.L.square(subtracted(pw, Y.v)) / 2;
      if (!check(c.r_psi && *c.r_psi == r, "r(psi) != (phi(w) - target)^2 / 2")) return done();
      check(S.L.inner(phi.apply_int(c.delta_dom), Y.v) == -r, "<phi(delta_dom), target> != -r");
      check(c.delta_cod == added(subtracted(phi.apply_int(c.delta_dom), pw), Y.v), "delta_cod formula");
      if (!check(c.psi_tilde.has_value() && c.psi_tilde->word.has_value(), "missing psi~ or its word"))
        return done();
      if (!check(check.result.ok, "preconditions")) return done();

      DeltaClass dv{c.delta_dom, "given"}, dw{c.delta_cod, "given"};
      PsiTilde pt = build_psi_tilde(X, Y, phi, dv, dw);
      check(detail::same(pt.map, *c.psi_tilde), "psi~ matrix does not match the rebuilt map");
      Isometry replay = from_word(pt.LU.full, *c.psi_tilde->word);
      check(replay.num == c.psi_tilde->num && replay.den == c.psi_tilde->den, "psi~ word replay");
      check(c.psi_tilde->integral() && verify(*c.psi_tilde), "psi~ is not an integral isometry");
      flags["twisted_period_relation"] = twisted_period_relation(pt, X, Y, phi, dv, dw);
      if (!check(check.result.ok, "psi~")) return done();

      Restriction R = restrict_to_vperp(pt, X, Y);
      EquivalenceCertificate scratch;
      scratch.r_psi = r;
      detail::run_cases(scratch, X, Y, R, dv, dw, DecideConfig{});
      check(scratch.verdict == c.verdict, "case verdict");
      if (!check(c.witness.has_value(), "missing case witness")) return done();
      check(detail::same(*scratch.witness, *c.witness), "case witness does not match the recomputation");
      for (const auto& [key, val] : scratch.flags) flags[key] = val;

      const CaseWitness& cw = *c.witness;
      if (c.verdict == Verdict::Case2) {
        const int sg = sgn(cw.profile.r);
        IntVector beta = scaled(R.cod.base_part(cw.profile.beta), Integer(sg));
        IntVector dcod = Y.vperp.coordinates(c.delta_cod);
        const IntegralLattice& lam = Y.vperp_lattice;
        check(cw.gamma && lam.inner(*cw.gamma, dcod) == 0, "gamma is not orthogonal to delta_w");
        check(cw.gamma && lam.inner(beta, *cw.gamma) == 1, "<beta, gamma> != 1");
        if (cw.gamma && cw.k && cw.s_k) {
          const Integer rr = abs(cw.profile.r), s = sg * cw.profile.s, g2 = lam.square(*cw.gamma);
          check(*cw.s_k == s + *cw.k * cw.profile.m + rr * *cw.k * *cw.k * (g2 / 2), "s_k formula");
          check(gcd(rr, *cw.s_k) == 1, "gcd(r, s_k) != 1");
        }
      } else if (c.verdict == Verdict::Case3 && cw.exceptional) {
        const ExceptionalData& ex = *cw.exceptional;
        check(R.cod.full.square(ex.u) == -2, "u^2 != -2");
        RatVector img = compose(reflection(R.cod.full, ex.u), R.map)(R.dom.f_vec());
        check(img == scaled(to_rational(R.cod.f_vec()), Rational(ex.sign)), "rho_u psi(f) != sign f");
      }
      const char* required[] = {"twisted_period_relation", "r_matches_norm", "gcd_criterion", "primitive_span"};
      for (const char* key : required) check(flags[key], std::string("obligation ") + key);
      if (c.verdict == Verdict::Case1) check(flags["F_integral"] && flags["parallel_transport"], "case 1 obligations");
      if (c.verdict == Verdict::Case2) check(flags["gcd_r_sk"] && flags["vb_condition"], "case 2 obligations");
      if (c.verdict == Verdict::Case3) check(flags["quotient_integral"] && flags["phi_A_equals_B"], "case 3 obligations");
    }

    auto [bl, br] = brauer_records(X, Y, c.delta_dom, c.delta_cod, c.epsilon);
    check(c.brauer_left && detail::same(bl, *c.brauer_left), "brauer_left");
    check(c.brauer_right && detail::same(br, *c.brauer_right), "brauer_right");
    check(flags == c.flags, "flag set does not match the recomputation");
  } catch (const std::exception& e) {
    check(false, std::string("exception during verification: ") + e.what());
  }
  return done();
}

}  // namespace k3lat
