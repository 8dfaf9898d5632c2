#pragma once

// Classical generators: the level-one Eisenstein series E of weight p-1,
// Eisenstein series attached to pairs of characters, and theta series of
// positive definite binary quadratic forms.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "pmf/arith.hpp"
#include "pmf/character.hpp"
#include "pmf/qexpansion.hpp"

namespace pmf {

/// E = 1 - (2(p-1)/B_{p-1}) sum sigma_{p-2}(n) q^n, truncated at ctx.qprec().
inline QExpansion eisenstein_E(const PrimeContext& ctx) {
  const int p = static_cast<int>(ctx.p());
  const ExactRational factor = -(ExactRational(2 * (p - 1)) / bernoulli(p - 1));
  const Residue c = reduce_to_ring(factor, ctx);
  const int m = ctx.qprec();
  std::vector<Residue> coeffs(static_cast<std::size_t>(m) + 1);
  coeffs[0] = 1;
  for (int n = 1; n <= m; ++n) coeffs[n] = ctx.mul(c, sigma_t_mod(n, p - 2, ctx));
  return QExpansion(ctx, std::move(coeffs), FormMeta{1, p - 1, DirichletCharacter::trivial(ctx)});
}

/// Generalized Bernoulli number B_{k,chi} for a character with values in
/// {0, 1, -1}, computed exactly.
inline ExactRational generalized_bernoulli(int k, const DirichletCharacter& chi, const PrimeContext& ctx) {
  if (!chi.is_real(ctx)) fail(ErrorKind::InvalidArgument, "generalized Bernoulli numbers need a real character");
  const std::int64_t f = chi.modulus();
  const auto b = bernoulli_table(k);
  ExactRational total;
  for (std::int64_t a = 1; a <= f; ++a) {
    std::int64_t v = ctx.centered(chi(a));
    if (v == 0) continue;
    // B_k(a/f) = sum_j C(k,j) B_j (a/f)^{k-j}
    ExactRational poly;
    for (int j = 0; j <= k; ++j) {
      if (b[j].is_zero()) continue;
      ExactRational x(boost::multiprecision::pow(BigInt(a), static_cast<unsigned>(k - j)),
                      boost::multiprecision::pow(BigInt(f), static_cast<unsigned>(k - j)));
      poly += ExactRational(binomial(k, j)) * b[j] * x;
    }
    total += ExactRational(v) * poly;
  }
  return total * ExactRational(boost::multiprecision::pow(BigInt(f), static_cast<unsigned>(k - 1)));
}

/// Constant term -B_{k,phi}/(2k) of the Eisenstein series attached to (psi, phi),
/// or nullopt when the series has vanishing constant term at infinity.
inline std::optional<ExactRational> eisenstein_constant_term(int k, const DirichletCharacter& psi,
                                                             const DirichletCharacter& phi,
                                                             const PrimeContext& ctx) {
  if (psi.conductor() == 1) return -(generalized_bernoulli(k, phi, ctx) / ExactRational(2 * k));
  if (k == 1 && phi.conductor() == 1) return -(generalized_bernoulli(1, psi, ctx) / ExactRational(2));
  return std::nullopt;
}

/// Eisenstein series with a_n = sum_{d|n} psi(n/d) phi(d) d^{k-1}.  The constant
/// term is taken from `constant` when given, otherwise from the L-value rule.
inline QExpansion eisenstein_weight_char(int k, const DirichletCharacter& psi, const DirichletCharacter& phi,
                                         const PrimeContext& ctx, std::optional<Residue> constant = std::nullopt) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "Eisenstein weight must be >= 1");
  const int sign = (k % 2 == 0) ? 1 : -1;
  if (psi.parity(ctx) * phi.parity(ctx) != sign)
    fail(ErrorKind::ParityViolation, "psi*phi(-1) must equal (-1)^k");
  const int m = ctx.qprec();
  std::vector<Residue> coeffs(static_cast<std::size_t>(m) + 1, 0);
  if (constant) {
    coeffs[0] = *constant % ctx.modulus();
  } else if (auto c = eisenstein_constant_term(k, psi, phi, ctx)) {
    coeffs[0] = reduce_to_ring(*c, ctx);
  }
  for (int n = 1; n <= m; ++n) {
    Residue s = 0;
    for (std::int64_t d : divisors(n)) {
      Residue term = ctx.mul(psi(n / d), phi(d));
      if (term == 0) continue;
      s = ctx.add(s, ctx.mul(term, ctx.pow(ctx.from_int(d), static_cast<std::uint64_t>(k - 1))));
    }
    coeffs[n] = s;
  }
  return QExpansion(ctx, std::move(coeffs), FormMeta{psi.modulus() * phi.modulus(), k, psi * phi});
}

/// Representation numbers of ax^2 + bxy + cy^2 for n <= ctx.qprec(), by
/// exhaustive enumeration of the bounding box forced by definiteness.
inline std::vector<std::int64_t> theta_counts(std::int64_t a, std::int64_t b, std::int64_t c, int m) {
  const std::int64_t disc = b * b - 4 * a * c;
  if (a <= 0 || disc >= 0) fail(ErrorKind::NotPositiveDefinite, "form is not positive definite");
  const double d = static_cast<double>(-disc);
  const auto xmax = static_cast<std::int64_t>(std::floor(std::sqrt(4.0 * c * m / d))) + 1;
  const auto ymax = static_cast<std::int64_t>(std::floor(std::sqrt(4.0 * a * m / d))) + 1;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(m) + 1, 0);
  for (std::int64_t x = -xmax; x <= xmax; ++x)
    for (std::int64_t y = -ymax; y <= ymax; ++y) {
      std::int64_t v = a * x * x + b * x * y + c * y * y;
      if (v <= m) ++counts[static_cast<std::size_t>(v)];
    }
  return counts;
}

/// Theta series of a positive definite form: weight 1, level |disc|,
/// character (disc/.) when disc is fundamental.
inline QExpansion theta_series(std::int64_t a, std::int64_t b, std::int64_t c, const PrimeContext& ctx) {
  const auto counts = theta_counts(a, b, c, ctx.qprec());
  const std::int64_t disc = b * b - 4 * a * c;
  std::optional<FormMeta> meta;
  if (is_fundamental_discriminant(disc) && gcd(disc, ctx.p()) == 1)
    meta = FormMeta{-disc, 1, DirichletCharacter::kronecker(disc, ctx)};
  return QExpansion::from_integers(ctx, counts, std::move(meta));
}

}  // namespace pmf
