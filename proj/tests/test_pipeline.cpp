#include <gtest/gtest.h>

#include "k3lat/json_io.hpp"
#include "support.hpp"

using namespace k3lat;
using k3lat::testing::Gen;

namespace {

Triple hilbert(long n) { return {1, 0, 1 - n}; }

// Index of Span(v, w) in the Mukai lattice of the degree-2d surface, from the
// maximal minors of the two embedded vectors.
Integer span_index(const SurfaceSetup& S, const Triple& v, const Triple& w) {
  return k3lat::testing::minor_gcd(columns({S.embed(v), S.embed(w)}, S.L.rank()));
}

}  // namespace

TEST(GcdCriterion, Examples) {
  SurfaceSetup S = surface_setup(3);
  EXPECT_TRUE(gcd_criterion(2, 1, 1));
  EXPECT_EQ(span_index(S, hilbert(2), {2, 1, 1}), 1);
  for (long r = -5; r <= 5; ++r)
    for (long s = -5; s <= 5; ++s) EXPECT_TRUE(gcd_criterion(r, 1, s));
  // gcd((9 - 1) * 1, 2) = 2.
  EXPECT_FALSE(gcd_criterion(3, 2, 1));
  SurfaceSetup S2 = surface_setup(2);
  const long n = (4 * 2 - 3) + 1;
  EXPECT_EQ(span_index(S2, hilbert(n), {3, 2, 1}), 2);
  EXPECT_FALSE(is_primitive_sublattice(std::vector<IntVector>{S2.embed(hilbert(n)), S2.embed({3, 2, 1})}));
}

TEST(GcdCriterion, SufficientOnTheFullParameterBox) {
  long instances = 0, passes = 0, necessary_misses = 0;
  for (long d = 1; d <= 4; ++d) {
    SurfaceSetup S = surface_setup(d);
    for (long r = -6; r <= 6; ++r) {
      if (std::labs(r) < 2) continue;
      for (long k = 1; k <= 6; ++k)
        for (long s = -6; s <= 6; ++s) {
          const long n1 = k * k * d - r * s;
          if (n1 < 1) continue;
          ++instances;
          const bool crit = gcd_criterion(r, k, s);
          const Integer idx = span_index(S, hilbert(n1 + 1), {r, k, s});
          const bool prim = is_primitive_sublattice(std::vector<IntVector>{S.embed(hilbert(n1 + 1)), S.embed({r, k, s})});
          EXPECT_EQ(prim, idx == 1);
          if (crit) {
            ++passes;
            EXPECT_TRUE(prim) << r << " " << k << " " << s << " d=" << d;
          } else if (prim) {
            ++necessary_misses;
          }
        }
    }
  }
  RecordProperty("instances", static_cast<int>(instances));
  RecordProperty("criterion_true", static_cast<int>(passes));
  RecordProperty("primitive_but_criterion_false", static_cast<int>(necessary_misses));
  EXPECT_GT(instances, 1000);
}

TEST(FindT, ExampleNeedsANonzeroShift) {
  EXPECT_FALSE(t_condition(3, 2, 1, 2, 0));
  FindTResult ft = find_t(3, 2, 1, 2, 100);
  ASSERT_TRUE(ft.t.has_value());
  EXPECT_LE(abs(*ft.t), 2);
  auto [r, k, s] = shift_triple({3, 2, 1}, *ft.t, 2);
  EXPECT_EQ(gcd((r * r - 1) * s, k), 1);
}

TEST(FindT, ZeroWhenTheUnshiftedCriterionHolds) {
  for (long r = 2; r <= 6; ++r)
    for (long s = -4; s <= 4; ++s)
      if (gcd_criterion(r, 1, s) && 3 - r * s > 0) {
        EXPECT_EQ(*find_t(r, 1, s, 3, 10).t, 0);
      }
}

TEST(FindT, ShiftMatchesTheExponentialOfH) {
  Gen g;
  for (int trial = 0; trial < 100; ++trial) {
    const long d = g.uniform(1, 5);
    SurfaceSetup S = surface_setup(d);
    Triple w{g.uniform(-6, 6), g.uniform(-6, 6), g.uniform(-6, 6)};
    const long t = g.uniform(-4, 4);
    Isometry phi = from_word(S.L, phi_word_for(S, t));
    EXPECT_EQ(phi.apply_int(S.embed(w)), S.embed(shift_triple(w, t, d)));
  }
}

TEST(FindT, SampledInputsGetWitnessesAndPrimitiveSpans) {
  Gen g;
  int done = 0;
  while (done < 100) {
    const long d = g.uniform(1, 6);
    Triple w{g.uniform(-9, 9), g.uniform(-9, 9), g.uniform(-9, 9)};
    if (abs(w[0]) == 1 || gcd(gcd(w[0], w[1]), w[2]) != 1) continue;
    const Integer n1 = norm_of(w, d);
    if (n1 < 1) continue;
    ++done;
    FindTResult ft = find_t(w[0], w[1], w[2], d, 10000);
    ASSERT_TRUE(ft.t.has_value());
    Triple sh = shift_triple(w, *ft.t, d);
    EXPECT_TRUE(gcd_criterion(sh[0], sh[1], sh[2]));
    SurfaceSetup S = surface_setup(d);
    EXPECT_EQ(span_index(S, hilbert(n1.get_si() + 1), sh), 1);
  }
}

TEST(FindT, RejectsOutOfRangeInputsAndReportsExhaustion) {
  EXPECT_THROW(find_t(1, 2, 1, 2, 10), LatticeError);
  EXPECT_THROW(find_t(2, 1, 5, 1, 10), LatticeError);
  FindTResult ft = find_t(3, 2, 1, 2, 0);
  EXPECT_FALSE(ft.t.has_value());
  EXPECT_FALSE(ft.diagnostic.empty());
  EXPECT_EQ(ft.scanned, 1);
}

TEST(SelectGamma, HyperbolicPlaneAndErrors) {
  IntegralLattice U = build_standard(StandardKind::U);
  EXPECT_EQ(select_gamma(U, IntVector{1, 0}), (IntVector{0, -1}));
  EXPECT_THROW(select_gamma(U, IntVector{2, 0}), LatticeError);
  Gen g;
  IntegralLattice L = mukai_lattice();
  for (int trial = 0; trial < 50; ++trial) {
    IntVector b = g.nonzero_vector(L.rank(), 4);
    if (divisibility(L, b) != 1) continue;
    EXPECT_EQ(L.inner(b, select_gamma(L, b)), 1);
  }
}

TEST(SelectK, Examples) {
  EXPECT_EQ(*select_k(2, 1, 1, 0), 0);
  EXPECT_THROW(select_k(2, 2, 2, 0), LatticeError);
  EXPECT_EQ(*select_k(4, 1, 2, 0), 1);
  EXPECT_EQ(*select_k(4, 1, 2, -2), 1);
  EXPECT_THROW(select_k(4, 1, 2, 1), LatticeError);
  Gen g;
  for (int trial = 0; trial < 200; ++trial) {
    const long r = g.uniform(2, 12), m = g.uniform(0, 12), s = g.uniform(-12, 12), g2 = 2 * g.uniform(-5, 5);
    if (gcd(gcd(Integer(r), Integer(m)), Integer(s)) != 1) continue;
    auto k = select_k(r, m, s, g2);
    ASSERT_TRUE(k.has_value());
    EXPECT_EQ(gcd(Integer(r), s + *k * m + r * *k * *k * (g2 / 2)), 1);
  }
}

// ---------------------------------------------------------------------------
// decide / verify.

TEST(Validate, RejectsMalformedInputs) {
  K3Input ok{3, std::nullopt, hilbert(2), {2, 1, 1}};
  EXPECT_EQ(validate(ok), 2);
  auto bad = [&](auto mutate) {
    K3Input in = ok;
    mutate(in);
    EXPECT_THROW(validate(in), InvalidInput);
  };
  bad([](K3Input& in) { in.d = 0; });
  bad([](K3Input& in) { in.w = {4, 2, 2}; });
  bad([](K3Input& in) { in.w = {2, 1, -1}; });
  bad([](K3Input& in) { in.v = {2, 1, 1}; });
  bad([](K3Input& in) { in.picard_gram = IntMatrix::from_rows({{4}}); });
  bad([](K3Input& in) { in.picard_gram = IntMatrix::from_rows({{6, 0}, {0, 2}}); });
  K3Input with_gram = ok;
  with_gram.picard_gram = IntMatrix::from_rows({{6}});
  EXPECT_EQ(validate(with_gram), 2);
}

TEST(Decide, HilbertSelfCaseIsBirationalWithTrivialShift) {
  for (long n = 2; n <= 6; ++n)
    for (long d = 1; d <= 3; ++d) {
      K3Input in{d, std::nullopt, hilbert(n), hilbert(n)};
      EquivalenceCertificate c = decide(in);
      EXPECT_EQ(c.verdict, Verdict::Birational);
      EXPECT_EQ(c.epsilon, 1);
      EXPECT_EQ(*c.t, 0);
      ASSERT_TRUE(c.brauer_left && c.brauer_right);
      EXPECT_TRUE(c.brauer_left->trivial);
      EXPECT_TRUE(c.brauer_right->trivial);
      VerifyResult v = verify_certificate(c);
      EXPECT_TRUE(v.ok) << v.failure;
    }
}

TEST(Decide, RankTwoDegreeSixReportsTheFineModuliFlag) {
  K3Input in{3, IntMatrix::from_rows({{6}}), hilbert(2), {2, 1, 1}};
  EquivalenceCertificate c = decide(in);
  EXPECT_EQ(c.n, 2);
  EXPECT_NE(c.verdict, Verdict::Failure) << c.diagnostic;
  EXPECT_EQ(c.route, "primitive-embedding");
  EXPECT_TRUE(c.flags.at("fine_moduli_hypothesis"));
  EXPECT_TRUE(c.flags.at("gcd_criterion"));
  EXPECT_TRUE(c.flags.at("primitive_span"));
  EXPECT_EQ(c.verdict, Verdict::Case1);
  EXPECT_EQ(abs(*c.r_psi), 1);
  VerifyResult v = verify_certificate(c);
  EXPECT_TRUE(v.ok) << v.failure;
}

TEST(Decide, ConstructedImagesTakeTheBirationalPath) {
  Gen g;
  for (int trial = 0; trial < 20; ++trial) {
    const long d = g.uniform(1, 4), n = g.uniform(2, 6), t = g.uniform(-3, 3);
    Triple w = shift_triple(hilbert(n), t, d);
    EquivalenceCertificate c = decide({d, std::nullopt, hilbert(n), w});
    ASSERT_EQ(c.verdict, Verdict::Birational) << c.diagnostic;
    SurfaceSetup S = surface_setup(d);
    Isometry phi = from_word(S.L, c.phi_word);
    EXPECT_EQ(phi.apply_int(S.embed(w)), S.embed(hilbert(n)));
    EXPECT_TRUE(verify_certificate(c).ok);
  }
}

TEST(Decide, EpsilonFlipsWhenWIsNegated) {
  Gen g;
  int compared = 0;
  for (int trial = 0; trial < 200 && compared < 25; ++trial) {
    const long d = g.uniform(1, 3);
    Triple w{g.uniform(-4, 4), g.uniform(-3, 3), g.uniform(-4, 4)};
    if (gcd(gcd(w[0], w[1]), w[2]) != 1 || norm_of(w, d) < 1) continue;
    Triple v = hilbert(norm_of(w, d).get_si() + 1);
    EquivalenceCertificate a = decide({d, std::nullopt, v, w}), b = decide({d, std::nullopt, v, negated(w)});
    if (a.verdict == Verdict::Failure || b.verdict == Verdict::Failure) continue;
    ++compared;
    EXPECT_EQ(a.epsilon, -b.epsilon) << w[0] << " " << w[1] << " " << w[2] << " d=" << d;
  }
  EXPECT_GE(compared, 10);
}

TEST(Decide, FailureCertificatesAreHonestAndVerifiable) {
  DecideConfig cfg;
  cfg.bound_t = 0;
  K3Input in{2, std::nullopt, hilbert(6), {3, 2, 1}};
  EquivalenceCertificate c = decide(in, cfg);
  EXPECT_EQ(c.verdict, Verdict::Failure);
  EXPECT_FALSE(c.diagnostic.empty());
  EXPECT_FALSE(c.witness.has_value());
  EXPECT_FALSE(c.psi_tilde.has_value());
  EXPECT_TRUE(verify_certificate(c).ok);
  EXPECT_NE(decide(in).verdict, Verdict::Failure);
}

TEST(Decide, EveryEmittedCertificateVerifies) {
  Gen g;
  std::map<Verdict, int> seen;
  int done = 0;
  while (done < 60) {
    const long d = g.uniform(1, 3);
    Triple w{g.uniform(-5, 5), g.uniform(-3, 3), g.uniform(-5, 5)};
    if (gcd(gcd(w[0], w[1]), w[2]) != 1 || norm_of(w, d) < 1 || norm_of(w, d) > 40) continue;
    ++done;
    EquivalenceCertificate c = decide({d, std::nullopt, hilbert(norm_of(w, d).get_si() + 1), w});
    ++seen[c.verdict];
    VerifyResult v = verify_certificate(c);
    EXPECT_TRUE(v.ok) << to_string(c.verdict) << ": " << v.failure;
    if (c.verdict != Verdict::Failure) {
      EXPECT_TRUE(c.flags.count("fine_moduli_hypothesis"));
      for (const auto& [name, value] : c.flags) {
        if (name != "fine_moduli_hypothesis" && name != "negated_psi_gives_minus_F" &&
            name != "vb_condition" && name != "vb_condition_shifted") {
          EXPECT_TRUE(value) << name;
        }
      }
    }
  }
  EXPECT_GT(seen[Verdict::Birational], 0);
  EXPECT_GT(seen[Verdict::Case2], 0);
}

// ---------------------------------------------------------------------------
// Serialization and tampering.

namespace {

EquivalenceCertificate sample_certificate() {
  return decide({3, IntMatrix::from_rows({{6}}), hilbert(2), {2, 1, 1}});
}

EquivalenceCertificate round_trip(const EquivalenceCertificate& c) {
  return io::certificate_from(io::json::parse(io::to_json(c).dump()));
}

}  // namespace

TEST(Certificate, RoundTripsThroughJsonBitExactly) {
  for (const auto& c : {sample_certificate(), decide({2, std::nullopt, hilbert(3), hilbert(3)}),
                        decide({1, std::nullopt, hilbert(5), {3, 1, -1}})}) {
    const std::string once = io::to_json(c).dump();
    EquivalenceCertificate back = round_trip(c);
    EXPECT_EQ(io::to_json(back).dump(), once);
    EXPECT_TRUE(verify_certificate(back).ok);
  }
}

TEST(Certificate, TamperedFieldsAreRejected) {
  const EquivalenceCertificate good = sample_certificate();
  ASSERT_TRUE(verify_certificate(good).ok);
  auto rejects = [&](const char* what, auto mutate) {
    EquivalenceCertificate c = good;
    mutate(c);
    VerifyResult v = verify_certificate(c);
    EXPECT_FALSE(v.ok) << what;
    EXPECT_FALSE(v.failure.empty()) << what;
  };
  rejects("psi matrix", [](auto& c) { c.psi_tilde->num(0, 0) += 1; });
  rejects("epsilon", [](auto& c) { c.epsilon = -c.epsilon; });
  rejects("verdict", [](auto& c) { c.verdict = Verdict::Case3; });
  rejects("t", [](auto& c) { *c.t += 1; });
  rejects("delta", [](auto& c) { c.delta_dom[0] += 2; });
  rejects("flag", [](auto& c) { c.flags["gcd_criterion"] = false; });
  rejects("extra flag", [](auto& c) { c.flags["invented"] = true; });
  rejects("brauer", [](auto& c) { c.brauer_right->trivial = !c.brauer_right->trivial; });
  rejects("schema", [](auto& c) { c.schema = 2; });
  rejects("failure with witness", [](auto& c) {
    c.verdict = Verdict::Failure;
    c.diagnostic = "claimed";
  });
}

TEST(Certificate, MalformedJsonIsInvalidInput) {
  io::json j = io::to_json(sample_certificate());
  j.erase("verdict");
  EXPECT_THROW(io::certificate_from(j), InvalidInput);
  io::json k = io::to_json(sample_certificate());
  k["input"]["v"] = "not a vector";
  EXPECT_THROW(io::certificate_from(k), InvalidInput);
}
