#include <gtest/gtest.h>

#include "support.hpp"

using namespace k3lat;
using k3lat::testing::Gen;

TEST(Arith, BezoutCoefficientsReproduceGcd) {
  Gen g;
  for (int trial = 0; trial < 500; ++trial) {
    IntVector a = g.vector(g.uniform(1, 6), 50);
    IntVector c = bezout(a);
    EXPECT_EQ(dot(a, c), content(a));
  }
}

TEST(Arith, FloorDivisionMatchesDefinition) {
  for (long a = -20; a <= 20; ++a)
    for (long b : {-7L, -3L, -1L, 1L, 2L, 5L}) {
      Integer q = floor_div(Integer(a), Integer(b));
      Integer r = Integer(a) - q * b;
      // 0 <= r < |b| when b > 0, and b < r <= 0 when b < 0.
      if (b > 0) {
        EXPECT_TRUE(r >= 0 && r < b);
      } else {
        EXPECT_TRUE(r <= 0 && r > b);
      }
    }
}

TEST(Arith, SmithFormFactorsAndDivisibilityChain) {
  Gen g;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = g.uniform(1, 5), c = g.uniform(1, 5);
    IntMatrix a = g.matrix(r, c, 6);
    SmithForm sf = smith_normal_form(a);
    EXPECT_EQ(sf.P * a * sf.Q, sf.S);
    EXPECT_EQ(sf.P * sf.P_inv, IntMatrix::identity(r));
    EXPECT_EQ(sf.Q * sf.Q_inv, IntMatrix::identity(c));
    for (std::size_t i = 0; i < std::min(r, c); ++i) {
      for (std::size_t j = 0; j < std::min(r, c); ++j)
        if (i != j) {
          EXPECT_EQ(sf.S(i, j), 0);
        }
      EXPECT_GE(sf.S(i, i), 0);
      if (i + 1 < std::min(r, c) && sf.S(i + 1, i + 1) != 0) {
        EXPECT_TRUE(divides(sf.S(i, i), sf.S(i + 1, i + 1)));
      }
    }
  }
}

TEST(Arith, BareissDeterminantAgreesWithRationalElimination) {
  Gen g;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = g.uniform(1, 6);
    IntMatrix a = g.matrix(n, n, 9);
    RatMatrix q(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q(i, j) = a(i, j);
    EXPECT_EQ(Rational(determinant(a)), determinant(q));
  }
}

TEST(Arith, IntegerKernelIsSaturatedAndAnnihilated) {
  Gen g;
  for (int trial = 0; trial < 100; ++trial) {
    IntMatrix a = g.matrix(g.uniform(1, 3), g.uniform(3, 6), 5);
    SublatticeBasis k = integer_kernel(a);
    for (std::size_t j = 0; j < k.rank(); ++j) EXPECT_TRUE(is_zero(a * k.basis.column(j)));
    if (k.rank() > 0) {
      EXPECT_TRUE(is_primitive_sublattice(k.basis));
    }
  }
}

// ---------------------------------------------------------------------------

TEST(StandardLattices, MukaiLatticeIsEvenUnimodularOfSignature4_20) {
  IntegralLattice m = mukai_lattice();
  EXPECT_EQ(m.rank(), 24u);
  EXPECT_EQ(signature(m), std::make_pair(std::size_t{4}, std::size_t{20}));
  EXPECT_EQ(abs(m.det()), 1);
  EXPECT_TRUE(discriminant_group(m).invariant_factors.empty());
}

TEST(StandardLattices, HyperbolicPlaneUsesMinusOnePairing) {
  IntegralLattice u = build_standard(StandardKind::U);
  EXPECT_EQ(u.inner(unit_vector(2, 0), unit_vector(2, 1)), -1);
  EXPECT_EQ(u.det(), -1);
}

TEST(StandardLattices, E8MinusIsNegativeDefiniteUnimodular) {
  IntegralLattice e = build_standard(StandardKind::E8Minus);
  EXPECT_EQ(signature(e), std::make_pair(std::size_t{0}, std::size_t{8}));
  EXPECT_EQ(e.det(), 1);
}

TEST(StandardLattices, K3nDiscriminantIsCyclicOfOrder2nMinus2) {
  for (long n = 2; n <= 10; ++n) {
    IntegralLattice l = k3n_lattice(n);
    EXPECT_EQ(signature(l), std::make_pair(std::size_t{3}, std::size_t{20})) << n;
    FiniteAbelianGroup g = discriminant_group(l);
    ASSERT_EQ(g.invariant_factors.size(), 1u) << n;
    EXPECT_EQ(g.invariant_factors[0], 2 * n - 2) << n;
    // The generator of <2-2n> has divisibility 2n - 2.
    EXPECT_EQ(divisibility(l, unit_vector(l.rank(), l.rank() - 1)), 2 * n - 2);
  }
}

TEST(StandardLattices, RejectsOddOrDegenerateGram) {
  EXPECT_THROW(IntegralLattice(IntMatrix::from_rows({{1}}), "odd"), LatticeError);
  EXPECT_THROW(IntegralLattice(IntMatrix::from_rows({{0, 0}, {0, 0}}), "zero"), LatticeError);
  EXPECT_THROW(IntegralLattice(IntMatrix::from_rows({{2, 1}, {0, 2}}), "asym"), LatticeError);
}

TEST(StandardLattices, SignatureIsInvariantUnderUnimodularChangeOfBasis) {
  Gen g;
  IntegralLattice k3 = k3_lattice();
  for (int trial = 0; trial < 20; ++trial) {
    // Random unimodular P as a product of elementary column operations.
    IntMatrix p = IntMatrix::identity(k3.rank());
    for (int s = 0; s < 30; ++s) {
      std::size_t i = g.uniform(0, 21), j = g.uniform(0, 21);
      if (i == j) continue;
      long k = g.uniform(-2, 2);
      for (std::size_t r = 0; r < 22; ++r) p(r, j) += k * p(r, i);
    }
    IntMatrix gram = p.transpose() * k3.gram() * p;
    EXPECT_EQ(signature(gram), std::make_pair(std::size_t{3}, std::size_t{19}));
  }
}

// ---------------------------------------------------------------------------

TEST(Divisibility, MatchesBruteForcePairings) {
  Gen g;
  IntegralLattice l = k3n_lattice(4);
  for (int trial = 0; trial < 300; ++trial) {
    IntVector x = g.nonzero_vector(l.rank(), 4);
    EXPECT_EQ(divisibility(l, x), k3lat::testing::brute_divisibility(l, x));
  }
}

TEST(Saturation, HyperbolicExamples) {
  IntVector e{1, 0}, f{0, 1};
  EXPECT_TRUE(is_primitive_sublattice(std::vector<IntVector>{e, f}));
  IntVector a{1, 1}, b{1, -1};
  EXPECT_FALSE(is_primitive_sublattice(std::vector<IntVector>{a, b}));
  EXPECT_EQ(saturation_index(columns({a, b}, 2)), 2);
}

TEST(Saturation, IndexEqualsGcdOfMaximalMinors) {
  Gen g;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = g.uniform(2, 5), k = g.uniform(1, n);
    IntMatrix cols = g.matrix(n, k, 5);
    Integer oracle = k3lat::testing::minor_gcd(cols);
    if (oracle == 0) continue;  // dependent columns
    EXPECT_EQ(saturation_index(cols), oracle);
    SublatticeBasis s = saturate(cols);
    EXPECT_EQ(k3lat::testing::minor_gcd(s.basis), 1);
    for (std::size_t j = 0; j < k; ++j) EXPECT_NO_THROW(s.coordinates(to_rational(cols.column(j))));
  }
}

TEST(OrthogonalComplement, IsOrthogonalPrimitiveAndOfComplementaryRank) {
  Gen g;
  IntegralLattice l = mukai_lattice();
  for (int trial = 0; trial < 50; ++trial) {
    IntVector v = g.nonzero_vector(l.rank(), 3);
    SublatticeBasis c = orthogonal_complement(l, v);
    EXPECT_EQ(c.rank(), l.rank() - 1);
    for (std::size_t j = 0; j < c.rank(); ++j) EXPECT_EQ(l.inner(v, c.basis.column(j)), 0);
    EXPECT_TRUE(is_primitive_sublattice(c.basis));
  }
}

TEST(DiscriminantGroup, OrderEqualsAbsoluteDeterminant) {
  Gen g;
  for (int trial = 0; trial < 60; ++trial) {
    // Block sums of rescaled hyperbolic planes and <2k>.
    IntegralLattice l = rescale(build_standard(StandardKind::U), g.uniform(1, 4));
    IntegralLattice r = build_standard(StandardKind::RankOne, 2 * g.uniform(1, 6));
    IntegralLattice s = direct_sum(l, r);
    FiniteAbelianGroup d = discriminant_group(s);
    Integer order = 1;
    for (const auto& x : d.invariant_factors) order *= x;
    EXPECT_EQ(order, abs(s.det()));
  }
}

TEST(Signature, AdditiveUnderDirectSum) {
  IntegralLattice a = k3n_lattice(3), b = build_standard(StandardKind::U);
  auto [pa, qa] = signature(a);
  auto [pb, qb] = signature(b);
  EXPECT_EQ(signature(direct_sum(a, b)), std::make_pair(pa + pb, qa + qb));
}
