#include <sstream>

#include "pmf/generators.hpp"
#include "pmf/io.hpp"
#include "pmf/selftest.hpp"
#include "pmf/spaces.hpp"
#include "support.hpp"

using namespace pmf;

namespace {

const std::string level11 = std::string(PMF_FIXTURES) + "/level11_p5";
const std::string level23 = std::string(PMF_FIXTURES) + "/level23_p13";

QExpansion row(const PrimeContext& ctx, std::vector<std::int64_t> c) { return QExpansion::from_integers(ctx, c); }

}  // namespace

TEST(Echelonize, OneEliminationStep) {
  const PrimeContext ctx(5, 2, 1);
  const BasisMatrix b = echelonize({row(ctx, {1, 2}), row(ctx, {1, 7})});
  ASSERT_EQ(b.rank(), 2u);
  EXPECT_EQ(b.pivots()[0], (Pivot{0, 0, 0}));
  EXPECT_EQ(b.pivots()[1], (Pivot{1, 1, 1}));
  EXPECT_EQ(b.precision_loss(), 1);
  EXPECT_EQ(b.effective_precision(), 1);
}

TEST(Echelonize, DuplicatesAndZero) {
  const PrimeContext ctx(5, 2, 3);
  const QExpansion f = row(ctx, {0, 3, 1, 4});
  const BasisMatrix b = echelonize({f, f});
  EXPECT_EQ(b.rank(), 1u);
  EXPECT_EQ(b.precision_loss(), 0);
  EXPECT_EQ(echelonize({QExpansion(ctx, 3)}).rank(), 0u);
}

TEST(Echelonize, MinimalValuationPivot) {
  const PrimeContext ctx(5, 3, 2);
  const BasisMatrix b = echelonize({row(ctx, {5, 1, 0}), row(ctx, {1, 0, 0})});
  ASSERT_EQ(b.rank(), 2u);
  EXPECT_EQ(b.pivots()[0], (Pivot{0, 0, 0}));
  EXPECT_EQ(b.pivots()[1].valuation, 0);
  EXPECT_EQ(b.precision_loss(), 0);
}

TEST(Membership, CoordinatesAndResidual) {
  const PrimeContext ctx(5, 3, 4);
  const BasisMatrix b = echelonize({row(ctx, {1, 0, 2, 0, 1}), row(ctx, {0, 1, 1, 0, 0})});
  const Membership m = membership(scale(2, b.rows()[0]), b);
  ASSERT_TRUE(m.member);
  EXPECT_EQ(m.coords, (std::vector<Residue>{2, 0}));
  const QExpansion off = add(b.rows()[0], scale(25, QExpansion::monomial(ctx, 3, 4)));
  const Membership n = membership(off, b);
  EXPECT_FALSE(n.member);
  EXPECT_EQ(n.residual_valuation, 2);
}

TEST(Membership, LevelTwentyThreeFormInIngestedWeightOneBasis) {
  const PrimeContext ctx(13, 3, 2100);
  const BasisMatrix s1 = io::ingest_basis(level23 + "/S1.mfb", ctx);
  ASSERT_EQ(s1.rank(), 1u);
  const Membership m = membership(selftest::level23_form(ctx), s1);
  ASSERT_TRUE(m.member);
  EXPECT_EQ(m.coords, (std::vector<Residue>{1}));
}

TEST(HeckeMatrix, EigenformGivesOneByOne) {
  const PrimeContext ctx(13, 3, 2100);
  const BasisMatrix s1 = io::ingest_basis(level23 + "/S1.mfb", ctx);
  EXPECT_EQ(hecke_matrix(s1, HeckeOperator::T(2))(0, 0), ctx.from_int(-1));
  const QExpansion g = selftest::level23_form(ctx);
  for (std::int64_t q : {3, 5, 7, 29, 59}) EXPECT_EQ(hecke_matrix(s1, HeckeOperator::T(q))(0, 0), g[q]) << q;
  EXPECT_EQ(hecke_matrix(s1, HeckeOperator::U(23))(0, 0), 1u);
}

TEST(HeckeMatrix, GoodPrimesCommute) {
  const PrimeContext ctx(5, 3, 120);
  const BasisMatrix e = generate_eisenstein_space(4, 11, DirichletCharacter::trivial(ctx), ctx);
  const BasisMatrix s = io::ingest_basis(level11 + "/S6.mfb", ctx);
  for (const BasisMatrix* b : {&e, &s}) {
    const Matrix a2 = hecke_matrix(*b, HeckeOperator::T(2));
    const Matrix a3 = hecke_matrix(*b, HeckeOperator::T(3));
    EXPECT_EQ(multiply(a2, a3, ctx), multiply(a3, a2, ctx));
  }
}

TEST(HeckeMatrix, EscapingImageIsNotStable) {
  const PrimeContext ctx(5, 3, 40);
  const FormMeta meta{11, 2, DirichletCharacter::trivial(ctx), true};
  BasisMatrix b = echelonize({add(QExpansion::monomial(ctx, 1, 40), QExpansion::monomial(ctx, 2, 40)).with_meta(meta)});
  b.set_descriptor(SpaceDescriptor{11, 2, meta.character, SourceTag::Generated, 1, 1});
  EXPECT_KIND(hecke_matrix(b, HeckeOperator::T(2)), ErrorKind::NotStable);
}

TEST(HeckeMatrix, ShortTruncationIsReported) {
  const PrimeContext ctx(5, 4, 30);
  const BasisMatrix s = io::ingest_basis(level11 + "/S26.mfb", ctx);
  EXPECT_KIND(hecke_matrix(s, HeckeOperator::T(2)), ErrorKind::TruncationTooShort);
}

TEST(Fixtures, IngestedDimensionsMatchMetadata) {
  const PrimeContext ctx(5, 4, 250);
  const std::vector<std::pair<int, std::size_t>> dims{{2, 1}, {6, 4}, {10, 8}, {14, 12}, {38, 36}};
  for (auto [k, d] : dims) {
    const BasisMatrix b = io::ingest_basis(level11 + "/S" + std::to_string(k) + ".mfb", ctx);
    EXPECT_EQ(b.rank(), d) << k;
    ASSERT_TRUE(b.descriptor());
    EXPECT_EQ(b.descriptor()->source, SourceTag::Ingested);
    EXPECT_EQ(b.descriptor()->dim, static_cast<int>(d));
  }
}

TEST(Ingest, RoundTripAndErrors) {
  const PrimeContext ctx(5, 4, 250);
  const BasisMatrix b = io::ingest_basis(level11 + "/S6.mfb", ctx);
  std::stringstream ss;
  io::write_mfb(ss, b);
  const std::string text = ss.str();
  std::stringstream back(text);
  EXPECT_EQ(io::read_mfb(back, ctx), b);

  std::stringstream other(text);
  EXPECT_KIND(io::read_mfb(other, PrimeContext(7, 4, 250)), ErrorKind::ContextMismatch);
  std::stringstream cut(text.substr(0, text.size() / 2));
  EXPECT_KIND(io::read_mfb(cut, ctx), ErrorKind::FormatError);
  EXPECT_KIND(io::ingest_basis(level11 + "/S4.mfb", ctx), ErrorKind::MissingSource);
}

TEST(Eisenstein, GeneratedSpaces) {
  const PrimeContext ctx(5, 4, 100);
  const auto one = DirichletCharacter::trivial(ctx);
  const BasisMatrix level1 = generate_eisenstein_space(4, 1, one, ctx);
  EXPECT_EQ(level1.rank(), 1u);
  EXPECT_TRUE(membership(eisenstein_E(ctx), level1).member);
  EXPECT_EQ(generate_eisenstein_space(2, 1, one, ctx).rank(), 0u);
  EXPECT_EQ(generate_eisenstein_space(2, 11, one, ctx).rank(), 1u);
  EXPECT_EQ(generate_eisenstein_space(6, 11, one, ctx).rank(), 2u);
  const PrimeContext ctx13(13, 3, 100);
  EXPECT_EQ(generate_eisenstein_space(1, 23, DirichletCharacter::kronecker(-23, ctx13), ctx13).rank(), 1u);
  EXPECT_KIND(generate_eisenstein_space(3, 11, one, ctx), ErrorKind::ParityViolation);
}
