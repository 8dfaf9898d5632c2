#pragma once

// Built-in invariant suite and the synthetic and theta-series models it runs on.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pmf/companion.hpp"
#include "pmf/generators.hpp"
#include "pmf/io.hpp"
#include "pmf/matrix.hpp"
#include "pmf/overconv.hpp"

namespace pmf::selftest {

inline constexpr std::uint64_t default_seed = 20260101;

inline Residue random_residue(std::mt19937_64& rng, const PrimeContext& ctx) {
  return std::uniform_int_distribution<Residue>(0, ctx.modulus() - 1)(rng);
}

inline QExpansion random_series(std::mt19937_64& rng, const PrimeContext& ctx, int trunc) {
  std::vector<Residue> c(static_cast<std::size_t>(trunc) + 1);
  for (auto& x : c) x = random_residue(rng, ctx);
  return QExpansion(ctx, std::move(c));
}

/// u_p(v(f)) = f and u_p(f v(g)) = u_p(f) g on `count` random series.
inline io::Check projection_identities(const PrimeContext& ctx, int count, std::uint64_t seed, bool inject_fault = false) {
  std::mt19937_64 rng(seed);
  bool ok = true;
  for (int i = 0; i < count && ok; ++i) {
    const QExpansion f = random_series(rng, ctx, ctx.qprec());
    const QExpansion g = random_series(rng, ctx, ctx.qprec());
    ok = u_p(v_op(f)) == f.truncated(u_p(v_op(f)).trunc());
    QExpansion lhs = u_p(mul(f, v_op(g)));
    QExpansion rhs = mul(u_p(f), g.truncated(lhs.trunc()));
    if (inject_fault) rhs = add(rhs, QExpansion::monomial(ctx, 0, rhs.trunc()));
    ok = ok && lhs == rhs;
  }
  return {"projection_formula", ok, ctx.nprec()};
}

/// E has constant term 1 and every higher coefficient divisible by p.
inline io::Check eisenstein_congruence(const std::vector<std::int64_t>& primes, int nprec, int trunc) {
  bool ok = true;
  for (auto p : primes) {
    const PrimeContext ctx(p, nprec, trunc);
    const QExpansion e = eisenstein_E(ctx);
    ok = ok && e[0] == 1;
    for (int n = 1; n <= trunc; ++n) ok = ok && ctx.valuation(e[n]) >= 1;
  }
  return {"eisenstein_congruence", ok, nprec};
}

struct SyntheticMatrix {
  Matrix a;
  std::size_t unit_eigenvalues;
};

/// S D S^{-1} with D block diagonal: an upper triangular block with unit
/// diagonal followed by a block that vanishes mod p, and S unimodular.
inline SyntheticMatrix synthetic_matrix(std::mt19937_64& rng, const PrimeContext& ctx, std::size_t n) {
  const std::size_t units = std::uniform_int_distribution<std::size_t>(0, n)(rng);
  const auto p = static_cast<Residue>(ctx.p());
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const bool unit_block = i < units && j < units;
      const bool other_block = i >= units && j >= units;
      if (unit_block && j > i) d(i, j) = random_residue(rng, ctx);
      if (unit_block && j == i) d(i, j) = ctx.from_int(static_cast<std::int64_t>(1 + random_residue(rng, ctx) % (p - 1)));
      if (other_block) d(i, j) = ctx.mul(p, random_residue(rng, ctx));
    }
  for (std::size_t i = 0; i < units; ++i)
    d(i, i) = ctx.add(d(i, i), ctx.mul(p, random_residue(rng, ctx)));
  Matrix s = Matrix::identity(n);
  for (std::size_t step = 0; step < 3 * n; ++step) {
    const std::size_t i = rng() % n;
    const std::size_t j = rng() % n;
    if (i == j) continue;
    const Residue c = random_residue(rng, ctx);
    for (std::size_t col = 0; col < n; ++col) s(i, col) = ctx.add(s(i, col), ctx.mul(c, s(j, col)));
  }
  return {multiply(multiply(s, d, ctx), inverse(s, ctx), ctx), units};
}

struct ProjectorTrial {
  Matrix a;
  Matrix e;
  std::size_t expected_rank;
  bool idempotent;
  bool commutes;
  bool rank_matches;

  bool ok() const { return idempotent && commutes && rank_matches; }
};

inline ProjectorTrial projector_trial(const SyntheticMatrix& m, const PrimeContext& ctx, int threads = 1) {
  const OrdinaryProjector proj = ordinary_projector(m.a, ctx, threads);
  const Matrix& e = proj.e_matrix;
  return {m.a,
          e,
          m.unit_eigenvalues,
          multiply(e, e, ctx) == e,
          multiply(e, m.a, ctx) == multiply(m.a, e, ctx),
          proj.rank == m.unit_eigenvalues};
}

inline std::vector<ProjectorTrial> projector_trials(const PrimeContext& ctx, int count, std::uint64_t seed,
                                                    int threads = 1) {
  std::mt19937_64 rng(seed);
  std::vector<ProjectorTrial> out;
  for (int i = 0; i < count; ++i) {
    const std::size_t n = 2 + rng() % 7;
    out.push_back(projector_trial(synthetic_matrix(rng, ctx, n), ctx, threads));
  }
  return out;
}

/// Sturm bound k [SL_2(Z) : Gamma_0(N)] / 12, rounded up.
inline int sturm_bound(int k, std::int64_t level) {
  std::int64_t index = level;
  for (auto q : prime_factors(level)) index = index / q * (q + 1);
  return static_cast<int>((k * index + 11) / 12);
}

/// Differences theta_{Q_i} - theta_{Q_0} of forms of one discriminant: the
/// cuspidal span they generate in weight one.
inline BasisMatrix theta_basis(const std::vector<std::array<std::int64_t, 3>>& forms, const PrimeContext& ctx) {
  if (forms.size() < 2) fail(ErrorKind::InvalidArgument, "a theta basis needs at least two forms");
  const auto& f0 = forms.front();
  const std::int64_t disc = f0[1] * f0[1] - 4 * f0[0] * f0[2];
  const QExpansion t0 = theta_series(f0[0], f0[1], f0[2], ctx);
  if (!t0.meta()) fail(ErrorKind::NotFundamental, "discriminant " + std::to_string(disc) + " is not usable");
  FormMeta meta = *t0.meta();
  meta.cuspidal = true;
  std::vector<QExpansion> rows;
  for (std::size_t i = 1; i < forms.size(); ++i) {
    const auto& f = forms[i];
    if (f[1] * f[1] - 4 * f[0] * f[2] != disc) fail(ErrorKind::InvalidArgument, "forms have different discriminants");
    QExpansion d = sub(theta_series(f[0], f[1], f[2], ctx), t0);
    if (!d.is_zero()) rows.push_back(d.with_meta(meta));
  }
  BasisMatrix b = echelonize(rows);
  b.set_descriptor(SpaceDescriptor{meta.level, 1, meta.character, SourceTag::Generated, static_cast<int>(b.rank()),
                                   sturm_bound(1, meta.level)});
  return b;
}

/// The weight-one form of level 23: (theta_{x^2+xy+6y^2} - theta_{2x^2+xy+3y^2})/2.
inline QExpansion level23_form(const PrimeContext& ctx) {
  const QExpansion d = sub(theta_series(1, 1, 6, ctx), theta_series(2, 1, 3, ctx));
  return scale(ctx.inv(2), d).with_meta(FormMeta{23, 1, DirichletCharacter::kronecker(-23, ctx), true});
}

inline BasisMatrix level23_theta_basis(const PrimeContext& ctx) { return theta_basis({{1, 1, 6}, {2, 1, 3}}, ctx); }

/// Roots mod p of X^2 - a X + c, lifted.
inline std::vector<Residue> hensel_quadratic_roots(Residue a, Residue c, const PrimeContext& ctx) {
  const std::vector<Residue> poly{c % ctx.modulus(), ctx.neg(a), 1 % ctx.modulus()};
  std::vector<Residue> out;
  const auto p = static_cast<Residue>(ctx.p());
  for (Residue r = 0; r < p; ++r)
    if (poly_eval(poly, r, ctx) % p == 0) out.push_back(hensel_lift(poly, r, ctx));
  return out;
}

struct Stabilization {
  QExpansion g;
  Residue alpha;
  Residue beta;
  EigenSystem g_alpha;
  EigenSystem g_beta;
};

/// g_alpha = g - beta V g and g_beta = g - alpha V g for a weight-k eigenform g.
inline Stabilization stabilize(const QExpansion& g, const DirichletCharacter& chi, int k) {
  const PrimeContext& ctx = g.ctx();
  const auto p = static_cast<std::size_t>(ctx.p());
  const Residue c = ctx.mul(ctx.pow(static_cast<Residue>(ctx.p()), static_cast<std::uint64_t>(k - 1)), chi(ctx.p()));
  auto roots = hensel_quadratic_roots(g[p], c, ctx);
  if (roots.size() != 2) fail(ErrorKind::InvalidArgument, "Hecke polynomial at p is not split with simple roots");
  const Residue alpha = roots[0];
  const Residue beta = roots[1];
  const QExpansion vg = substitute_power(g, static_cast<int>(p));
  const QExpansion ga = sub(g, scale(beta, vg)).with_meta(g.meta());
  const QExpansion gb = sub(g, scale(alpha, vg)).with_meta(g.meta());
  return {g, alpha, beta, EigenSystem::from_form(ga, alpha, ctx.nprec()), EigenSystem::from_form(gb, beta, ctx.nprec())};
}

/// The round trip g -> (g_alpha, g_beta) -> pair_find -> combine -> g, with
/// classicality against the theta basis.
inline io::Report stabilization_round_trip(const PrimeContext& ctx) {
  io::Report r;
  const auto chi = DirichletCharacter::kronecker(-23, ctx);
  const QExpansion g = level23_form(ctx);
  const Stabilization s = stabilize(g, chi, 1);
  const int prec = ctx.nprec();
  auto eigen = [&](const EigenSystem& e) {
    const QExpansion f = e.qexpansion();
    const QExpansion lhs = u_p(f);
    return lhs == scale(e.up_eigenvalue, f.truncated(lhs.trunc()));
  };
  r.add("u_p_eigen_alpha", eigen(s.g_alpha), prec);
  r.add("u_p_eigen_beta", eigen(s.g_beta), prec);
  const std::vector<EigenSystem> systems{s.g_alpha, s.g_beta};
  const auto pairs = pair_find(systems);
  r.add("pair_found", pairs.size() == 1 && pairs[0] == std::pair<std::size_t, std::size_t>{0, 1}, prec);
  const QExpansion f = combine(s.g_alpha.qexpansion(), s.g_beta.qexpansion(), s.alpha, s.beta);
  r.add("combine_returns_g", f.coeffs() == g.coeffs(), prec);
  const ClassicalityResult c = classicality_test(f, level23_theta_basis(ctx));
  r.add("classical_membership", c.member() && !c.vacuous(), c.effective_precision);
  r.add("alpha_beta_product", check_corollary1(s.alpha, s.beta, 1, chi, ctx).holds, prec);
  r.set("alpha", std::to_string(s.alpha));
  r.set("beta", std::to_string(s.beta));
  return r;
}

/// The full invariant suite on built-in parameters.
inline io::Report run(std::uint64_t seed = default_seed, bool break_projection = false) {
  io::Report r;
  r.checks.push_back(projection_identities(PrimeContext(5, 4, 60), 20, seed, break_projection));
  r.checks.push_back(eisenstein_congruence({5, 7, 11, 13}, 3, 60));
  const PrimeContext ctx(5, 3, 1);
  bool idem = true;
  for (const auto& t : projector_trials(ctx, 10, seed)) idem = idem && t.ok();
  r.add("projector_idempotent", idem, ctx.nprec());
  const io::Report st = stabilization_round_trip(PrimeContext(13, 3, 120));
  r.add("stabilization_round_trip", st.all_pass(), 3);
  r.set("seed", std::to_string(seed));
  return r;
}

}  // namespace pmf::selftest
