#pragma once

// Companion pairs of eigensystems, the combination
//   f = (alpha f_alpha - beta f_beta)/(alpha - beta),  f' = (f_alpha - f_beta)/(alpha - beta) = f|V,
// and the certificate that f lies in a classical weight-one space.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmf/error.hpp"
#include "pmf/io.hpp"
#include "pmf/overconv.hpp"
#include "pmf/qexpansion.hpp"
#include "pmf/spaces.hpp"

namespace pmf {

namespace detail {

inline bool congruent(Residue a, Residue b, int t, const PrimeContext& ctx) {
  return ctx.valuation(ctx.sub(a, b)) >= t;
}

inline void same_space(const EigenSystem& x, const EigenSystem& y) {
  require_same_ring(x.ctx, y.ctx);
  if (x.level != y.level || x.weight != y.weight || !(x.character == y.character))
    fail(ErrorKind::InvalidArgument, "eigensystems live on different spaces");
}

}  // namespace detail

/// Unordered pairs (i < j) agreeing at every a_n with p not dividing n, to the
/// smaller of their precisions, and with U_p eigenvalues distinct mod p.
inline std::vector<std::pair<std::size_t, std::size_t>> pair_find(const std::vector<EigenSystem>& systems) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < systems.size(); ++i)
    for (std::size_t j = i + 1; j < systems.size(); ++j) {
      const EigenSystem& x = systems[i];
      const EigenSystem& y = systems[j];
      detail::same_space(x, y);
      const PrimeContext& ctx = x.ctx;
      const int t = std::min(x.precision, y.precision);
      if (t == 0 || detail::congruent(x.up_eigenvalue, y.up_eigenvalue, 1, ctx)) continue;
      const int m = std::min(x.trunc(), y.trunc());
      bool agree = true;
      for (int n = 1; n <= m && agree; ++n)
        if (n % ctx.p() != 0) agree = detail::congruent(x.a[n], y.a[n], t, ctx);
      if (agree) out.emplace_back(i, j);
    }
  return out;
}

namespace detail {

inline Residue unit_difference_inverse(Residue alpha, Residue beta, const PrimeContext& ctx) {
  const Residue d = ctx.sub(alpha, beta);
  if (!ctx.is_unit(d)) fail(ErrorKind::DenominatorNotUnit, "alpha - beta is not a unit");
  return ctx.inv(d);
}

inline void combinable(const QExpansion& fa, const QExpansion& fb) {
  require_same_ring(fa.ctx(), fb.ctx());
  if (fa.meta().has_value() != fb.meta().has_value() ||
      (fa.meta() && (fa.meta()->level != fb.meta()->level || fa.meta()->weight != fb.meta()->weight ||
                     !(fa.meta()->character == fb.meta()->character))))
    fail(ErrorKind::InvalidArgument, "f_alpha and f_beta carry different metadata");
}

}  // namespace detail

/// (alpha f_alpha - beta f_beta)/(alpha - beta).
inline QExpansion combine(const QExpansion& fa, const QExpansion& fb, Residue alpha, Residue beta) {
  detail::combinable(fa, fb);
  const PrimeContext& ctx = fa.ctx();
  const Residue inv = detail::unit_difference_inverse(alpha, beta, ctx);
  QExpansion f = sub(scale(alpha, fa), scale(beta, fb));
  return scale(inv, f);
}

/// (f_alpha - f_beta)/(alpha - beta), which equals V applied to the combination.
inline QExpansion v_complement(const QExpansion& fa, const QExpansion& fb, Residue alpha, Residue beta) {
  detail::combinable(fa, fb);
  const PrimeContext& ctx = fa.ctx();
  const Residue inv = detail::unit_difference_inverse(alpha, beta, ctx);
  return scale(inv, sub(fa, fb));
}

struct ClassicalityResult {
  Membership membership;
  int effective_precision = 0;

  bool member() const noexcept { return membership.member; }
  bool vacuous() const noexcept { return effective_precision == 0; }
};

/// Membership of f in a classical weight-one basis.
inline ClassicalityResult classicality_test(const QExpansion& f, const BasisMatrix& b1) {
  if (f.trunc() < b1.trunc()) {
    const int bound = adequate_truncation(b1);
    if (f.trunc() < bound)
      fail(ErrorKind::TruncationTooShort, "form truncation " + std::to_string(f.trunc()) + " is below the bound " +
                                              std::to_string(bound) + " of the weight-one basis");
    return classicality_test(f, b1.truncated(f.trunc()));
  }
  ClassicalityResult r{membership(f, b1), 0};
  r.effective_precision = r.membership.member ? r.membership.effective_precision : 0;
  return r;
}

struct Corollary1Report {
  bool holds = false;
  Residue product = 0;
  Residue expected = 0;
  int product_valuation = 0;
  int expected_valuation = 0;
};

/// alpha beta = p^{k-1} chi(p).
inline Corollary1Report check_corollary1(Residue alpha, Residue beta, int k, const DirichletCharacter& chi,
                                         const PrimeContext& ctx) {
  if (gcd(chi.modulus(), ctx.p()) != 1) fail(ErrorKind::InvalidArgument, "character is not defined at p");
  if (k < 1) fail(ErrorKind::InvalidArgument, "weight must be >= 1");
  Corollary1Report r;
  r.product = ctx.mul(alpha, beta);
  r.expected = ctx.mul(ctx.pow(static_cast<Residue>(ctx.p()), static_cast<std::uint64_t>(k - 1)), chi(ctx.p()));
  r.product_valuation = ctx.valuation(r.product);
  r.expected_valuation = ctx.valuation(r.expected);
  r.holds = r.product == r.expected;
  return r;
}

struct WeightOneCertificate {
  QExpansion f;
  QExpansion f_prime;
  Residue alpha = 0;
  Residue beta = 0;
  ClassicalityResult classicality;
  io::Report checks;
  int effective_precision = 0;

  bool vacuous() const noexcept { return effective_precision == 0; }
  bool valid() const { return !vacuous() && classicality.member() && checks.all_pass(); }
};

/// Runs the combination and every invariant check on a companion pair.
inline WeightOneCertificate certify_pair(const EigenSystem& fa, const EigenSystem& fb, const BasisMatrix& b1) {
  detail::same_space(fa, fb);
  const PrimeContext& ctx = fa.ctx;
  const QExpansion qa = fa.qexpansion();
  const QExpansion qb = fb.qexpansion();
  QExpansion f = combine(qa, qb, fa.up_eigenvalue, fb.up_eigenvalue);
  QExpansion fp = v_complement(qa, qb, fa.up_eigenvalue, fb.up_eigenvalue);
  const int prec = std::min(fa.precision, fb.precision);
  WeightOneCertificate cert{f, fp, fa.up_eigenvalue, fb.up_eigenvalue, classicality_test(f, b1), {}, 0};

  bool away = true;
  for (int n = 1; n <= f.trunc(); ++n)
    if (n % ctx.p() != 0) away = away && detail::congruent(f[n], qa[n], prec, ctx);
  cert.checks.add("away_from_p_agreement", away, prec);
  const auto p = static_cast<std::size_t>(ctx.p());
  cert.checks.add("a_p_sum", f.trunc() >= static_cast<int>(p) &&
                                 detail::congruent(f[p], ctx.add(fa.up_eigenvalue, fb.up_eigenvalue), prec, ctx),
                  prec);
  const Corollary1Report c1 = check_corollary1(fa.up_eigenvalue, fb.up_eigenvalue, fa.weight, fa.character, ctx);
  cert.checks.add("alpha_beta_product", c1.holds, prec);
  const QExpansion vf = v_op(f);
  bool vrel = true;
  for (int n = 0; n <= std::min(vf.trunc(), fp.trunc()); ++n) vrel = vrel && detail::congruent(vf[n], fp[n], prec, ctx);
  cert.checks.add("f_prime_is_V_f", vrel, prec);
  cert.checks.add("classical_membership", cert.classicality.member(), cert.classicality.effective_precision);
  cert.effective_precision = std::min(prec, cert.classicality.effective_precision);
  return cert;
}

/// tau(m), or nullopt where the twist is undefined.
using Twist = std::function<std::optional<Residue>(std::int64_t)>;

inline Twist trivial_twist() {
  return [](std::int64_t) -> std::optional<Residue> { return Residue{1}; };
}

struct CompanionReport {
  const EigenSystem* f;
  const EigenSystem* g;
  std::string twist;
  io::Report checks;

  bool holds() const { return checks.all_pass(); }
};

/// The three families of relations between F and a candidate companion G:
///   (i)   a_m(G) = tau(m)^{-1} a_m(F) for p not dividing m,
///   (ii)  a_q(G) = tau(q)^{-1} a_q(F) for primes q dividing the level,
///   (iii) up_G up_F = s, the value supplied for S^p(p).
/// Whether a_q(F) vanishes for q | level is recorded as a value, not a check.
inline CompanionReport check_companion_eigensystems(const EigenSystem& f, const EigenSystem& g, const Twist& tau,
                                                    Residue s, const std::string& twist_name = "trivial") {
  require_same_ring(f.ctx, g.ctx);
  if (f.level != g.level) fail(ErrorKind::InvalidArgument, "eigensystems have different levels");
  const PrimeContext& ctx = f.ctx;
  const int prec = std::min(f.precision, g.precision);
  const int m = std::min(f.trunc(), g.trunc());
  CompanionReport rep{&f, &g, twist_name, {}};
  auto twisted_equal = [&](std::int64_t n) {
    auto t = tau(n);
    if (!t || !ctx.is_unit(*t)) fail(ErrorKind::TwistUndefined, "twist undefined at " + std::to_string(n));
    return detail::congruent(ctx.mul(g.a[n], *t), f.a[n], prec, ctx);
  };
  std::optional<std::int64_t> first_failure;
  for (std::int64_t n = 1; n <= m; ++n)
    if (n % ctx.p() != 0 && !twisted_equal(n) && !first_failure) first_failure = n;
  rep.checks.add("i_twisted_T_m", !first_failure, prec);
  if (first_failure) rep.checks.set("i_first_failure", std::to_string(*first_failure));

  bool uq = true;
  bool vanishing = true;
  for (std::int64_t q : prime_factors(f.level)) {
    if (q > m) {
      uq = false;
      continue;
    }
    uq = uq && twisted_equal(q);
    vanishing = vanishing && f.a[q] == 0 && g.a[q] == 0;
  }
  rep.checks.add("ii_U_q_relation", uq, prec);
  rep.checks.set("ii_U_q_vanishing", vanishing ? "yes" : "no");
  rep.checks.add("iii_U_p_relation", detail::congruent(ctx.mul(f.up_eigenvalue, g.up_eigenvalue), s, prec, ctx), prec);
  return rep;
}

}  // namespace pmf
