#include "pmf/companion.hpp"
#include "pmf/pipeline.hpp"
#include "pmf/selftest.hpp"
#include "support.hpp"

using namespace pmf;

namespace {

struct Level23 : ::testing::Test {
  PrimeContext ctx{13, 5, 300};
  DirichletCharacter chi = DirichletCharacter::kronecker(-23, ctx);
  QExpansion g = selftest::level23_form(ctx);
  selftest::Stabilization s = selftest::stabilize(g, chi, 1);
};

}  // namespace

TEST_F(Level23, HenselRootsAreThePrimitiveCubeRoots) {
  EXPECT_EQ(g[13], ctx.from_int(-1));
  EXPECT_EQ(chi(13), 1u);
  EXPECT_EQ(s.alpha % 13, 3u);
  EXPECT_EQ(s.beta % 13, 9u);
  EXPECT_EQ(ctx.pow(s.alpha, 3), 1u);
  EXPECT_EQ(ctx.mul(s.alpha, s.beta), 1u);
}

TEST_F(Level23, PairFind) {
  EXPECT_TRUE(pair_find({s.g_alpha}).empty());
  const auto pairs = pair_find({s.g_alpha, s.g_beta});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], (std::pair<std::size_t, std::size_t>{0, 1}));
  EigenSystem other = s.g_beta;
  other.a[2] = ctx.add(other.a[2], 1);
  EXPECT_TRUE(pair_find({s.g_alpha, other}).empty());
  EXPECT_TRUE(pair_find({s.g_alpha, s.g_alpha}).empty());
}

TEST_F(Level23, CombineAndComplement) {
  const QExpansion fa = s.g_alpha.qexpansion();
  const QExpansion fb = s.g_beta.qexpansion();
  const QExpansion f = combine(fa, fb, s.alpha, s.beta);
  EXPECT_EQ(f[1], 1u);
  EXPECT_EQ(f[13], ctx.add(s.alpha, s.beta));
  EXPECT_EQ(f.coeffs(), g.coeffs());
  EXPECT_EQ(v_complement(fa, fb, s.alpha, s.beta).coeffs(), substitute_power(g, 13).coeffs());
  EXPECT_TRUE(v_complement(fa, fa, s.alpha, s.beta).is_zero());
  EXPECT_KIND(combine(fa, fb, s.alpha, ctx.add(s.alpha, 13)), ErrorKind::DenominatorNotUnit);
}

TEST_F(Level23, Classicality) {
  const BasisMatrix b1 = selftest::level23_theta_basis(ctx);
  const ClassicalityResult row = classicality_test(b1.rows()[0], b1);
  ASSERT_TRUE(row.member());
  EXPECT_EQ(row.membership.coords, (std::vector<Residue>{1}));
  EXPECT_EQ(row.effective_precision, 5);
  const ClassicalityResult off = classicality_test(add(b1.rows()[0], QExpansion::monomial(ctx, 4, 300)), b1);
  EXPECT_FALSE(off.member());
  EXPECT_EQ(off.membership.residual_valuation, 0);
  EXPECT_TRUE(off.vacuous());
  EXPECT_TRUE(classicality_test(combine(s.g_alpha.qexpansion(), s.g_beta.qexpansion(), s.alpha, s.beta), b1).member());
  EXPECT_KIND(classicality_test(g.truncated(1), b1), ErrorKind::TruncationTooShort);
}

TEST_F(Level23, CorollaryOne) {
  EXPECT_TRUE(check_corollary1(s.alpha, s.beta, 1, chi, ctx).holds);
  const Residue u = 7;
  EXPECT_TRUE(check_corollary1(u, ctx.inv(u), 1, DirichletCharacter::trivial(ctx), ctx).holds);
  EXPECT_FALSE(check_corollary1(u, u, 1, DirichletCharacter::trivial(ctx), ctx).holds);
  EXPECT_KIND(check_corollary1(u, u, 1, DirichletCharacter::kronecker(13, PrimeContext(5, 5, 10)), ctx), ErrorKind::InvalidArgument);
}

TEST(CorollaryOne, WeightTwoValuation) {
  const PrimeContext ctx(5, 4, 10);
  const Residue alpha = 346;
  const Residue beta = ctx.sub(1, alpha);
  const Corollary1Report r = check_corollary1(alpha, beta, 2, DirichletCharacter::trivial(ctx), ctx);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.product_valuation, 1);
  EXPECT_EQ(r.expected_valuation, 1);
}

TEST_F(Level23, CompanionRelations) {
  const CompanionReport ok = check_companion_eigensystems(s.g_alpha, s.g_beta, trivial_twist(), chi(13));
  EXPECT_TRUE(ok.holds());
  EigenSystem self = s.g_alpha;
  self.up_eigenvalue = ctx.mul(ctx.inv(s.alpha), chi(13));
  EXPECT_TRUE(check_companion_eigensystems(s.g_alpha, self, trivial_twist(), chi(13)).holds());

  EigenSystem bad = s.g_beta;
  bad.a[29] = ctx.add(bad.a[29], 1);
  const CompanionReport r = check_companion_eigensystems(s.g_alpha, bad, trivial_twist(), chi(13));
  EXPECT_FALSE(r.holds());
  EXPECT_FALSE(r.checks.checks[0].pass);
  EXPECT_TRUE(r.checks.checks[1].pass);
  EXPECT_TRUE(r.checks.checks[2].pass);
  EXPECT_EQ(r.checks.values[0], (std::pair<std::string, std::string>{"i_first_failure", "29"}));

  const Twist undefined = [](std::int64_t m) -> std::optional<Residue> {
    if (m == 4) return std::nullopt;
    return Residue{1};
  };
  EXPECT_KIND(check_companion_eigensystems(s.g_alpha, s.g_beta, undefined, chi(13)), ErrorKind::TwistUndefined);
}

TEST(Flagship, PipelineCertifiesTheThetaForm) {
  const PrimeContext ctx(13, 3, 2100);
  const auto chi = DirichletCharacter::kronecker(-23, ctx);
  const pipeline::Config cfg{ctx, 23, chi, 1, -1, std::string(PMF_FIXTURES) + "/level23_p13", std::nullopt, 1, {}};
  const auto out = pipeline::run_weight_one(cfg, selftest::level23_theta_basis(ctx));
  EXPECT_EQ(out.exit_code(), 0);
  ASSERT_EQ(out.certificates.size(), 1u);
  const WeightOneCertificate& c = out.certificates[0];
  EXPECT_TRUE(c.valid());
  EXPECT_EQ(c.effective_precision, 3);
  EXPECT_EQ(c.f.coeffs(), selftest::level23_form(ctx).coeffs());
  EXPECT_EQ(std::min(c.alpha, c.beta), 1036u);
  EXPECT_EQ(std::max(c.alpha, c.beta), 1160u);
}
