#include "pmf/arith.hpp"
#include "pmf/character.hpp"
#include "support.hpp"

using namespace pmf;

TEST(Ring, RejectsBadParameters) {
  EXPECT_KIND(PrimeContext(6, 2, 10), ErrorKind::InvalidArgument);
  EXPECT_KIND(PrimeContext(3, 2, 10), ErrorKind::InvalidArgument);
  EXPECT_KIND(PrimeContext(5, 0, 10), ErrorKind::InvalidArgument);
}

TEST(Ring, UnitsAndValuations) {
  const PrimeContext ctx(5, 2, 10);
  EXPECT_EQ(ctx.modulus(), 25u);
  EXPECT_EQ(ctx.mul(ctx.inv(2), 2), 1u);
  EXPECT_EQ(ctx.valuation(10), 1);
  EXPECT_EQ(ctx.valuation(0), 2);
  EXPECT_KIND(ctx.inv(5), ErrorKind::NotUnit);
  EXPECT_EQ(ctx.from_int(-1), 24u);
  EXPECT_EQ(ctx.centered(24), -1);
}

TEST(Bernoulli, Values) {
  EXPECT_EQ(bernoulli(0), ExactRational(1));
  EXPECT_EQ(bernoulli(1), ExactRational(-1, 2));
  EXPECT_EQ(bernoulli(4), ExactRational(-1, 30));
  EXPECT_EQ(bernoulli(12), ExactRational(-691, 2730));
  EXPECT_TRUE(bernoulli(5).is_zero());
}

TEST(ReduceToRing, Values) {
  const PrimeContext ctx(5, 2, 10);
  EXPECT_EQ(reduce_to_ring(ExactRational(3, 2), ctx), 14u);
  EXPECT_EQ(reduce_to_ring(ExactRational(1), ctx), 1u);
  EXPECT_KIND(reduce_to_ring(ExactRational(1, 5), ctx), ErrorKind::NegativeValuation);
}

TEST(Sigma, Values) {
  EXPECT_EQ(sigma_t(1, 7), 1);
  EXPECT_EQ(sigma_t(2, 3), 9);
  EXPECT_EQ(sigma_t(6, 1), 12);
  const PrimeContext ctx(5, 4, 10);
  EXPECT_EQ(sigma_t_mod(6, 3, ctx), static_cast<Residue>(252 % 625));
}

TEST(Teichmuller, Values) {
  const PrimeContext ctx(5, 2, 10);
  EXPECT_EQ(teichmuller(1, ctx), 1u);
  EXPECT_EQ(teichmuller(4, ctx), 24u);
  EXPECT_EQ(teichmuller(2, ctx), 7u);
  EXPECT_EQ(ctx.pow(7, 4), 1u);
  EXPECT_KIND(teichmuller(10, ctx), ErrorKind::NotCoprime);
}

TEST(Character, Kronecker) {
  const PrimeContext ctx(13, 3, 10);
  const auto chi4 = DirichletCharacter::kronecker(-4, ctx);
  EXPECT_EQ(chi4(1), 1u);
  EXPECT_EQ(chi4(3), ctx.from_int(-1));
  EXPECT_EQ(chi4(2), 0u);
  const auto chi23 = DirichletCharacter::kronecker(-23, ctx);
  EXPECT_EQ(chi23(2), 1u);
  EXPECT_EQ(chi23(5), ctx.from_int(-1));
  EXPECT_EQ(chi23(13), 1u);
  EXPECT_EQ(chi23.order(), 2);
  EXPECT_KIND(DirichletCharacter::kronecker(-3 * 4, ctx), ErrorKind::NotFundamental);
}

TEST(Character, SpecGrammarRoundTrips) {
  const PrimeContext ctx(5, 2, 10);
  for (std::string spec : {"trivial", "kronecker:-4", "table:3:1,24"}) {
    const auto chi = DirichletCharacter::parse(spec, ctx);
    EXPECT_EQ(DirichletCharacter::parse(chi.spec(), ctx), chi) << spec;
  }
  EXPECT_EQ(DirichletCharacter::parse("table:3:1,24", ctx), DirichletCharacter::kronecker(-3, ctx));
  EXPECT_KIND(DirichletCharacter::parse("cubic", ctx), ErrorKind::FormatError);
  EXPECT_KIND(DirichletCharacter::parse("kronecker:x", ctx), ErrorKind::FormatError);
}

TEST(Character, AllModuloCountsCharactersOfOrderDividingPMinusOne) {
  const PrimeContext ctx(5, 2, 10);
  EXPECT_EQ(DirichletCharacter::all_modulo(5, ctx).size(), 4u);
  EXPECT_EQ(DirichletCharacter::all_modulo(3, ctx).size(), 2u);
  EXPECT_EQ(DirichletCharacter::all_modulo(11, ctx).size(), 2u);
}

TEST(Bernoulli, OddIndicesVanish) {
  const auto table = bernoulli_table(30);
  for (int k = 3; k <= 30; k += 2) EXPECT_TRUE(table[k].is_zero()) << k;
}

TEST(Teichmuller, RootOfUnityLiftingX) {
  for (std::int64_t p : {5, 7, 11, 13}) {
    const PrimeContext ctx(p, 3, 10);
    for (std::int64_t x = 1; x < 3 * p; ++x) {
      if (x % p == 0) continue;
      const Residue t = teichmuller(x, ctx);
      EXPECT_EQ(ctx.pow(t, static_cast<std::uint64_t>(p - 1)), 1u);
      EXPECT_EQ(t % static_cast<Residue>(p), static_cast<Residue>(x % p));
    }
  }
}

TEST(Character, MultiplicativeExhaustively) {
  const PrimeContext ctx(13, 2, 10);
  for (std::int64_t m : {3, 4, 7, 13 + 10, 21}) {
    for (const auto& chi : DirichletCharacter::all_modulo(m, ctx)) {
      EXPECT_EQ(chi(1), 1u);
      for (std::int64_t a = 1; a < m; ++a)
        for (std::int64_t b = 1; b < m; ++b)
          if (gcd(a, m) == 1 && gcd(b, m) == 1) {
            EXPECT_EQ(chi(a * b), ctx.mul(chi(a), chi(b)));
          }
    }
  }
}

TEST(Bernoulli, EisensteinFactorHasValuationOne) {
  for (std::int64_t p : {5, 7, 11, 13}) {
    const PrimeContext ctx(p, 3, 10);
    const Residue c = reduce_to_ring(ExactRational(2 * (p - 1)) / bernoulli(static_cast<int>(p - 1)), ctx);
    EXPECT_EQ(ctx.valuation(c), 1) << p;
  }
}
