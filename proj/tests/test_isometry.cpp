#include <gtest/gtest.h>

#include "support.hpp"

using namespace k3lat;
using k3lat::testing::Gen;

namespace {

bool same_map(const Isometry& a, const Isometry& b) { return a.num == b.num && a.den == b.den; }

}  // namespace

TEST(Generators, TransvectionsMatchTheirDefiningFormulas) {
  Gen g;
  IntegralLattice L = mukai_lattice();
  const Frame fr{0, 1};
  for (int trial = 0; trial < 200; ++trial) {
    IntVector b = g.off_frame(L, fr, 4, 3);
    IntVector x = g.vector(L.rank(), 4);
    const Integer r = x[0], s = x[1];
    IntVector c = x;
    c[0] = c[1] = 0;
    // exp(B): (r, c, s) -> (r, c + r B, s + r B^2/2 + <c, B>)
    IntVector want = added(c, scaled(b, r));
    want[0] = r;
    want[1] = s + r * L.square(b) / 2 + L.inner(c, b);
    EXPECT_EQ(exp_map(L, fr, to_rational(b)).apply_int(x), want);
    // E_b: (r, c, s) -> (r - <b, c> + s b^2/2, c - s b, s)
    IntVector want2 = subtracted(c, scaled(b, s));
    want2[0] = r - L.inner(b, c) + s * L.square(b) / 2;
    want2[1] = s;
    EXPECT_EQ(eichler(L, fr, b).apply_int(x), want2);
  }
}

TEST(Generators, TransvectionGroupLaws) {
  Gen g;
  IntegralLattice L = mukai_lattice();
  const Frame fr{2, 3};
  Isometry eta = swap_map(L, fr);
  for (int trial = 0; trial < 100; ++trial) {
    IntVector b1 = g.off_frame(L, fr, 5, 3), b2 = g.off_frame(L, fr, 5, 3);
    Isometry e1 = exp_map(L, fr, to_rational(b1)), e2 = exp_map(L, fr, to_rational(b2));
    EXPECT_TRUE(same_map(compose(e1, e2), exp_map(L, fr, to_rational(added(b1, b2)))));
    Isometry E = eichler(L, fr, b1);
    EXPECT_TRUE(same_map(inverse(E), eichler(L, fr, negated(b1))));
    EXPECT_TRUE(same_map(E, compose(eta, compose(exp_map(L, fr, to_rational(negated(b1))), eta))));
  }
}

TEST(Generators, IntegralTransvectionsPreserveOrientationAndDiscriminant) {
  Gen g;
  IntegralLattice L = build_standard(StandardKind::K3n, 3);
  OrientationDatum o = canonical_orientation(L);
  ASSERT_TRUE(valid(o));
  for (const Frame& fr : hyperbolic_frames(L)) {
    for (int trial = 0; trial < 5; ++trial) {
      IntVector b = g.off_frame(L, fr, 4, 2);
      for (const Isometry& m : {exp_map(L, fr, to_rational(b)), eichler(L, fr, b)}) {
        EXPECT_TRUE(m.integral());
        EXPECT_TRUE(verify(m));
        EXPECT_TRUE(is_discriminant_trivial(m));
        EXPECT_EQ(orientation_sign(m, o, o), 1);
      }
    }
  }
}

TEST(Generators, ReflectionSignsFollowTheSquareOfTheMirror) {
  IntegralLattice L = mukai_lattice();
  OrientationDatum o = canonical_orientation(L);
  IntVector neg(L.rank()), pos(L.rank());
  neg[0] = neg[1] = 1;   // square -2
  pos[0] = 1;
  pos[1] = -1;           // square +2
  EXPECT_EQ(orientation_sign(reflection(L, neg), o, o), 1);
  EXPECT_EQ(orientation_sign(reflection(L, pos), o, o), -1);
  // -id on four positive directions preserves the orientation.
  EXPECT_EQ(orientation_sign(negation(L), o, o), 1);
  // ... and reverses it on three.
  IntegralLattice K = k3n_lattice(3);
  OrientationDatum ok = canonical_orientation(K);
  EXPECT_EQ(orientation_sign(negation(K), ok, ok), -1);
  EXPECT_FALSE(is_discriminant_trivial(negation(K)));
  EXPECT_TRUE(is_discriminant_trivial(negation(k3n_lattice(2))));
}

TEST(Generators, OrientationSignIsMultiplicative) {
  Gen g;
  IntegralLattice L = mukai_lattice();
  OrientationDatum o = canonical_orientation(L);
  for (int trial = 0; trial < 100; ++trial) {
    Isometry a = from_word(L, g.word(L, 5)), b = from_word(L, g.word(L, 5));
    EXPECT_EQ(orientation_sign(compose(a, b), o, o), orientation_sign(a, o, o) * orientation_sign(b, o, o));
  }
}

// With <e,f> = +1 the Eichler transvection attached to an
// isotropic u and a class a orthogonal to u is
//   v -> v - <a,v> u + <u,v> a - (a^2/2) <u,v> u.
// Flipping f to -f identifies the two conventions. Under that flip exp(B) on
// frame (e, f) becomes the positive-convention map for (f', B) and E_b becomes the one for (e', b).
TEST(Generators, TranslateToThePositiveHyperbolicConvention) {
  Gen g;
  IntegralLattice L = mukai_lattice();
  const Frame fr{0, 1};
  IntMatrix gp = L.gram();
  gp(0, 1) = gp(1, 0) = 1;
  IntegralLattice Lp(gp, "mukai, <e,f> = +1");
  auto tau = [](IntVector x) {
    x[1] = -x[1];
    return x;
  };
  for (int trial = 0; trial < 200; ++trial) {
    IntVector x = g.vector(L.rank(), 4);
    IntVector y = g.vector(L.rank(), 4);
    EXPECT_EQ(Lp.inner(tau(x), tau(y)), L.inner(x, y));
  }
  auto positive_eichler = [&](const IntVector& u, const IntVector& a, const IntVector& v) {
    const Integer uv = Lp.inner(u, v);
    IntVector out = subtracted(v, scaled(u, Lp.inner(a, v)));
    out = added(out, scaled(a, uv));
    return subtracted(out, scaled(u, Lp.square(a) / 2 * uv));
  };
  const IntVector ep = unit_vector(L.rank(), 0), fp = unit_vector(L.rank(), 1);
  for (int trial = 0; trial < 200; ++trial) {
    IntVector b = g.off_frame(L, fr, 4, 3);
    IntVector x = g.vector(L.rank(), 4);
    EXPECT_EQ(tau(exp_map(L, fr, to_rational(b)).apply_int(x)), positive_eichler(fp, b, tau(x)));
    EXPECT_EQ(tau(eichler(L, fr, b).apply_int(x)), positive_eichler(ep, b, tau(x)));
  }
}

// ---------------------------------------------------------------------------

TEST(Words, TagsRoundTripThroughStrings) {
  Gen g;
  IntegralLattice L = mukai_lattice();
  for (int trial = 0; trial < 100; ++trial)
    for (const auto& t : g.word(L, 8)) EXPECT_EQ(parse_tag(to_string(t)), t);
  GeneratorTag q{GenKind::Exp, {0, 1}, RatVector(L.rank())};
  q.vec[4] = Rational(3, 7);
  EXPECT_EQ(parse_tag(to_string(q)), q);
  EXPECT_THROW(parse_tag("bogus:1"), LatticeError);
}

TEST(Words, ReplayMatchesMatrixAndInverseWord) {
  Gen g;
  IntegralLattice L = mukai_lattice();
  for (int trial = 0; trial < 100; ++trial) {
    Word w = g.word(L, 12);
    Isometry m = from_word(L, w);
    EXPECT_TRUE(verify(m));
    EXPECT_TRUE(replay_matches(m));
    IntVector x = g.vector(L.rank(), 5);
    EXPECT_EQ(m.apply_int(x), apply_word(L, w, x));
    EXPECT_TRUE(same_map(inverse(m), from_word(L, inverse(w))));
    EXPECT_TRUE(same_map(compose(m, inverse(m)), identity(L)));
  }
}

TEST(Words, ComposeAppliesTheRightFactorFirst) {
  IntegralLattice L = mukai_lattice();
  IntVector b(L.rank());
  b[4] = 1;
  Isometry g = exp_map(L, {0, 1}, to_rational(b)), h = swap_map(L, {0, 1});
  IntVector x = unit_vector(L.rank(), 0);
  EXPECT_EQ(compose(g, h).apply_int(x), g.apply_int(h.apply_int(x)));
  ASSERT_TRUE(compose(g, h).word.has_value());
  EXPECT_EQ(compose(g, h).word->front().kind, GenKind::Swap);
}

// ---------------------------------------------------------------------------

TEST(EichlerReduce, ReachesTheCanonicalFormOfTheSameSquareAndDivisibility) {
  Gen g;
  IntegralLattice L = mukai_lattice();
  for (int trial = 0; trial < 200; ++trial) {
    IntVector x = g.nonzero_vector(L.rank(), 6);
    Reduction red = eichler_reduce(L, x);
    EXPECT_EQ(apply_word(L, red.word, x), red.canonical);
    EXPECT_EQ(L.square(red.canonical), L.square(x));
    EXPECT_EQ(red.div, content(x));
    // Canonical vectors live in the first frame plus the second frame's e.
    for (std::size_t i = 4; i < L.rank(); ++i) EXPECT_EQ(red.canonical[i], 0);
    if (red.div == 1) {
      EXPECT_EQ(red.canonical[0], 1);
      EXPECT_EQ(red.canonical[1], -L.square(x) / 2);
    }
  }
}

TEST(EichlerReduce, EqualInvariantsGiveEqualCanonicalForms) {
  Gen g;
  IntegralLattice L = mukai_lattice();
  for (int trial = 0; trial < 100; ++trial) {
    IntVector x = g.nonzero_vector(L.rank(), 3);
    IntVector y = apply_word(L, g.word(L, 10), x);
    EXPECT_EQ(eichler_reduce(L, x).canonical, eichler_reduce(L, y).canonical);
  }
}

TEST(Transport, MovesPairsRelatedByAnIsometry) {
  Gen g;
  IntegralLattice L = mukai_lattice();
  int found = 0;
  for (int trial = 0; trial < 40; ++trial) {
    IntVector x1 = g.mukai_vector(L, g.uniform(2, 5));
    IntVector x2 = g.sparse(L.rank(), 3, 2);
    if (!is_primitive_sublattice(std::vector<IntVector>{x1, x2})) continue;
    Word w = g.word(L, 8);
    IntVector y1 = apply_word(L, w, x1), y2 = apply_word(L, w, x2);
    TransportResult t = transport_pair(L, x1, y1, x2, y2);
    if (!t.ok) continue;
    ++found;
    EXPECT_TRUE(verify(*t.map));
    EXPECT_EQ(t.map->apply_int(x1), y1);
    EXPECT_EQ(t.map->apply_int(x2), y2);
  }
  EXPECT_GE(found, 30);
}

TEST(Transport, RejectsPairsWithDifferentGramMatrices) {
  IntegralLattice L = mukai_lattice();
  IntVector x1 = unit_vector(L.rank(), 0), x2 = unit_vector(L.rank(), 1);
  IntVector y1 = unit_vector(L.rank(), 0), y2 = unit_vector(L.rank(), 2);
  EXPECT_THROW(transport_pair(L, x1, y1, x2, y2), LatticeError);
}

TEST(Transport, ExhaustedBudgetIsReportedNotGuessed) {
  IntegralLattice L = mukai_lattice();
  Gen g;
  IntVector x1 = g.mukai_vector(L, 3), x2 = unit_vector(L.rank(), 10);
  if (!is_primitive_sublattice(std::vector<IntVector>{x1, x2})) GTEST_SKIP();
  TransportConfig tiny{1};
  TransportResult t = transport_pair(L, x1, x1, x2, x2, tiny);
  if (!t.ok) {
    EXPECT_FALSE(t.diagnostic.empty());
  } else {
    EXPECT_EQ(t.map->apply_int(x1), x1);
    EXPECT_EQ(t.map->apply_int(x2), x2);
  }
}
