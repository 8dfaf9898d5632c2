#include <random>

#include "pmf/generators.hpp"
#include "pmf/qexpansion.hpp"
#include "pmf/selftest.hpp"
#include "support.hpp"

using namespace pmf;

namespace {

QExpansion series(const PrimeContext& ctx, std::vector<std::int64_t> c) { return QExpansion::from_integers(ctx, c); }

}  // namespace

TEST(QExpansion, AddAndScale) {
  const PrimeContext ctx(5, 3, 6);
  const QExpansion f = series(ctx, {3, 1, 4, 1, 5, 9, 2});
  const QExpansion zero(ctx, 6);
  EXPECT_EQ(add(f, zero), f);
  EXPECT_EQ(scale(1, f), f);
  EXPECT_TRUE(add(f, scale(ctx.from_int(-1), f)).is_zero());
  EXPECT_EQ(add(f, QExpansion(ctx, 3)).trunc(), 3);
}

TEST(QExpansion, Multiply) {
  const PrimeContext ctx(5, 3, 6);
  const QExpansion one = QExpansion::constant(ctx, 1, 6);
  const QExpansion q = QExpansion::monomial(ctx, 1, 6);
  const QExpansion f = series(ctx, {3, 1, 4, 1, 5, 9, 2});
  EXPECT_EQ(mul(f, one), f);
  EXPECT_EQ(mul(q, q), QExpansion::monomial(ctx, 2, 6));
  EXPECT_EQ(mul(series(ctx, {1, 1, 0, 0, 0, 0, 0}), series(ctx, {1, -1, 0, 0, 0, 0, 0})),
            series(ctx, {1, 0, -1, 0, 0, 0, 0}));
}

TEST(QExpansion, Invert) {
  const PrimeContext ctx(5, 3, 8);
  EXPECT_EQ(invert(QExpansion::constant(ctx, 1, 8)), QExpansion::constant(ctx, 1, 8));
  EXPECT_EQ(invert(series(ctx, {1, -1, 0, 0, 0, 0, 0, 0, 0})), series(ctx, {1, 1, 1, 1, 1, 1, 1, 1, 1}));
  EXPECT_KIND(invert(series(ctx, {5, 1, 0, 0, 0, 0, 0, 0, 0})), ErrorKind::NonUnitConstantTerm);
  const QExpansion einv = invert(eisenstein_E(PrimeContext(5, 4, 100)));
  EXPECT_EQ(einv[0], 1u);
  for (int n = 1; n <= 100; ++n) EXPECT_GE(einv.ctx().valuation(einv[n]), 1) << n;
}

TEST(QExpansion, UpAndV) {
  const PrimeContext ctx(5, 3, 30);
  std::vector<std::int64_t> c(31);
  for (int n = 0; n <= 30; ++n) c[n] = n;
  const QExpansion up = u_p(series(ctx, c));
  ASSERT_EQ(up.trunc(), 6);
  for (int n = 0; n <= 6; ++n) EXPECT_EQ(up[n], static_cast<Residue>(5 * n));
  EXPECT_EQ(u_p(QExpansion::constant(ctx, 7, 30)), QExpansion::constant(ctx, 7, 6));
  EXPECT_EQ(v_op(QExpansion::monomial(ctx, 1, 30)), QExpansion::monomial(ctx, 5, 30));
  EXPECT_TRUE(v_op(QExpansion(ctx, 30)).is_zero());
}

TEST(QExpansion, SectionAndProjectionFormulaOnRandomSeries) {
  EXPECT_TRUE(selftest::projection_identities(PrimeContext(5, 4, 200), 30, 7).pass);
  EXPECT_TRUE(selftest::projection_identities(PrimeContext(13, 2, 300), 10, 8).pass);
  EXPECT_FALSE(selftest::projection_identities(PrimeContext(5, 4, 50), 2, 7, true).pass);
}

TEST(Hecke, TqOnTheLevel23EigenformScalesByAq) {
  const PrimeContext ctx(13, 3, 400);
  const QExpansion g = selftest::level23_form(ctx);
  for (std::int64_t q : {2, 3, 5, 7, 11, 17, 19}) {
    const QExpansion tg = t_q(g, q);
    EXPECT_EQ(tg, scale(g[q], g.truncated(tg.trunc()))) << q;
  }
  EXPECT_EQ(g[2], ctx.from_int(-1));
  EXPECT_KIND(t_q(g, 23), ErrorKind::BadPrime);
  EXPECT_KIND(t_q(g, 13), ErrorKind::BadPrime);
}

TEST(Hecke, Uq) {
  const PrimeContext ctx(13, 3, 60);
  const FormMeta meta{23, 1, DirichletCharacter::kronecker(-23, ctx), true};
  std::vector<Residue> c(61, 0);
  for (int n = 1; n <= 60; ++n)
    if (n % 23 != 0) c[n] = static_cast<Residue>(n);
  EXPECT_TRUE(u_q(QExpansion(ctx, c, meta), 23).is_zero());
  const QExpansion m46 = QExpansion::monomial(ctx, 46, 60).with_meta(meta);
  EXPECT_EQ(u_q(m46, 23), QExpansion::monomial(ctx, 2, 2).with_meta(meta));
  EXPECT_TRUE(u_q(QExpansion::monomial(ctx, 45, 60).with_meta(meta), 23).is_zero());
  EXPECT_KIND(u_q(m46, 2), ErrorKind::BadPrime);
}

TEST(Eisenstein, E) {
  const PrimeContext ctx(5, 4, 200);
  const QExpansion e = eisenstein_E(ctx);
  EXPECT_EQ(e[0], 1u);
  EXPECT_EQ(e[1], 240u);
  EXPECT_EQ(ctx.valuation(e[1]), 1);
  EXPECT_EQ(e[2], static_cast<Residue>(240 * 9 % 625));
  EXPECT_TRUE(selftest::eisenstein_congruence({5, 7, 11, 13}, 4, 200).pass);
}

TEST(Eisenstein, WithCharacters) {
  const PrimeContext ctx(5, 4, 60);
  const auto one = DirichletCharacter::trivial(ctx);
  EXPECT_KIND(eisenstein_weight_char(4, one, one, ctx), ErrorKind::NegativeValuation);
  const QExpansion e4 = eisenstein_weight_char(4, one, one, ctx, Residue{0});
  EXPECT_EQ(e4[1], 1u);
  const QExpansion e = eisenstein_E(ctx);
  for (int n = 1; n <= 60; ++n) EXPECT_EQ(e[n], ctx.mul(240, e4[n])) << n;
  const auto chi = DirichletCharacter::kronecker(-4, ctx);
  EXPECT_KIND(eisenstein_weight_char(2, one, chi, ctx), ErrorKind::ParityViolation);
  const QExpansion e1 = eisenstein_weight_char(1, one, chi, ctx);
  EXPECT_EQ(e1[1], 1u);
  EXPECT_EQ(e1[5], 2u);
  EXPECT_EQ(scale(4, e1), QExpansion::from_integers(ctx, theta_counts(1, 0, 1, 60)));
}

TEST(Theta, Enumeration) {
  const PrimeContext ctx(13, 3, 10);
  const QExpansion t = theta_series(1, 0, 1, ctx);
  EXPECT_EQ(t[0], 1u);
  EXPECT_EQ(t[1], 4u);
  EXPECT_EQ(t[2], 4u);
  EXPECT_EQ(t[3], 0u);
  const QExpansion u = theta_series(1, 1, 6, ctx);
  EXPECT_EQ(u[0], 1u);
  EXPECT_EQ(u[1], 2u);
  ASSERT_TRUE(u.meta());
  EXPECT_EQ(u.meta()->level, 23);
  EXPECT_KIND(theta_series(1, 3, 1, ctx), ErrorKind::NotPositiveDefinite);
}
