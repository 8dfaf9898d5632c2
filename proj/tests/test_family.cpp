#include <algorithm>

#include "pmf/family.hpp"
#include "pmf/pipeline.hpp"
#include "pmf/selftest.hpp"
#include "support.hpp"

using namespace pmf;

namespace {

std::vector<EigenSystem> level11_systems(int weight) {
  const PrimeContext ctx(5, 4, 250);
  const pipeline::Config cfg{ctx, 11, DirichletCharacter::trivial(ctx), weight, -1,
                             std::string(PMF_FIXTURES) + "/level11_p5", std::nullopt, 1, {}};
  return pipeline::run_ordinary(cfg).extraction.systems;
}

}  // namespace

TEST(WeightPoint, Values) {
  const PrimeContext ctx(5, 4, 1);
  EXPECT_EQ(WeightPoint::at(2, ctx).element, 1u);
  EXPECT_EQ(WeightPoint::at(6, ctx).element, 1296u % 625u);
  EXPECT_EQ(ctx.mul(WeightPoint::at(1, ctx).element, 6), 1u);
}

TEST(CongruenceDepth, TrivialCases) {
  const auto xs = level11_systems(2);
  ASSERT_FALSE(xs.empty());
  EXPECT_EQ(congruence_depth(xs[0], xs[0]), xs[0].precision);
  EigenSystem y = xs[0];
  y.a[2] = y.ctx.add(y.a[2], 1);
  EXPECT_EQ(congruence_depth(xs[0], y), 0);
}

TEST(CongruenceDepth, LevelElevenWeightsTwoAndSix) {
  const auto xs = level11_systems(2);
  const auto ys = level11_systems(6);
  ASSERT_EQ(xs.size(), 2u);
  ASSERT_EQ(ys.size(), 2u);
  EXPECT_EQ(congruence_depth(xs[1], ys[0]), 1);
  EXPECT_EQ(congruence_depth(xs[0], ys[1]), 1);
  EXPECT_EQ(congruence_depth(xs[0], ys[0]), 0);
}

TEST(FamilyMatch, IdenticalAndDisjoint) {
  const auto xs = level11_systems(2);
  const FamilyMatch same = family_match(xs, xs);
  EXPECT_TRUE(same.bijective());
  for (const auto& p : same.pairs) EXPECT_EQ(p.depth, 4);
  std::vector<EigenSystem> shifted = xs;
  for (auto& e : shifted) e.a[1] = e.ctx.add(e.a[1], 1);
  const FamilyMatch none = family_match(xs, shifted);
  EXPECT_TRUE(none.pairs.empty());
  EXPECT_EQ(none.leftover_a.size(), xs.size());
  std::vector<EigenSystem> odd = xs;
  for (auto& e : odd) e.weight = 3;
  EXPECT_KIND(family_match(xs, odd), ErrorKind::InvalidArgument);
}

TEST(FamilyMatch, LevelElevenBijectionIsPermutationStable) {
  auto xs = level11_systems(2);
  auto ys = level11_systems(6);
  const FamilyMatch m = family_match(xs, ys);
  EXPECT_TRUE(m.bijective());
  ASSERT_EQ(m.pairs.size(), 2u);
  std::vector<int> depths;
  for (const auto& p : m.pairs) depths.push_back(p.depth);
  EXPECT_EQ(depths, (std::vector<int>{1, 1}));
  std::reverse(xs.begin(), xs.end());
  std::reverse(ys.begin(), ys.end());
  const FamilyMatch r = family_match(ys, xs);
  ASSERT_EQ(r.pairs.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const bool found = std::any_of(m.pairs.begin(), m.pairs.end(), [&](const FamilyPair& p) {
      return p.a == r.pairs[i].b && p.b == r.pairs[i].a && p.depth == r.pairs[i].depth;
    });
    EXPECT_TRUE(found);
  }
  const FamilyMatch again = family_match(xs, ys);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_TRUE(again.pairs[i].a == m.pairs[i].a && again.pairs[i].b == m.pairs[i].b);
}

TEST(Specialization, SelfEmptyAndFlagship) {
  const PrimeContext ctx(13, 3, 2100);
  const auto chi = DirichletCharacter::kronecker(-23, ctx);
  const pipeline::Config c1{ctx, 23, chi, 1, -1, std::string(PMF_FIXTURES) + "/level23_p13", std::nullopt, 1, {}};
  const auto out = pipeline::run_weight_one(c1, selftest::level23_theta_basis(ctx));
  ASSERT_EQ(out.certificates.size(), 1u);
  const auto& cert = out.certificates[0];
  EXPECT_TRUE(weight_one_specialization_report({}, cert).empty());
  const auto self = weight_one_specialization_report({out.systems[out.pairs[0].first]}, cert);
  ASSERT_EQ(self.size(), 1u);
  EXPECT_EQ(self[0].depth, cert.effective_precision);

  pipeline::Config c13 = c1;
  c13.weight = 13;
  const auto members = pipeline::run_ordinary(c13).extraction.systems;
  const auto report = weight_one_specialization_report(members, cert);
  ASSERT_EQ(report.size(), 2u);
  EXPECT_EQ(report[0].up_eigenvalue, 835u);
  EXPECT_EQ(report[0].depth, 1);
  EXPECT_EQ(report[1].up_eigenvalue, 1639u);
  EXPECT_EQ(report[1].depth, 0);
}
