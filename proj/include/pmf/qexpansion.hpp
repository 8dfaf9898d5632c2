#pragma once

// Truncated q-expansions over Z/p^N and the operators acting on them.
//
// Every operation returns the truncation it can actually vouch for: U_p
// divides it by p, T_q by q.  Consumers are expected to compare truncations
// rather than read past the end.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmf/arith.hpp"
#include "pmf/character.hpp"
#include "pmf/error.hpp"
#include "pmf/ring.hpp"

namespace pmf {

/// Level, weight and nebentypus of a form on a single character eigenspace.
struct FormMeta {
  std::int64_t level;
  int weight;
  DirichletCharacter character;
  bool cuspidal = false;

  friend bool operator==(const FormMeta& a, const FormMeta& b) {
    return a.level == b.level && a.weight == b.weight && a.character == b.character && a.cuspidal == b.cuspidal;
  }
};

class QExpansion {
 public:
  /// Zero series truncated at `trunc` (coefficients a_0 .. a_trunc).
  QExpansion(const PrimeContext& ctx, int trunc) : ctx_(ctx), coeffs_(check_trunc(ctx, trunc) + 1, 0) {}

  QExpansion(const PrimeContext& ctx, std::vector<Residue> coeffs, std::optional<FormMeta> meta = std::nullopt)
      : ctx_(ctx), coeffs_(std::move(coeffs)), meta_(std::move(meta)) {
    if (coeffs_.empty()) fail(ErrorKind::InvalidArgument, "a q-expansion needs at least a_0");
    check_trunc(ctx, static_cast<int>(coeffs_.size()) - 1);
    for (auto& c : coeffs_) c %= ctx.modulus();
    validate_meta();
  }

  /// Series with integer coefficients reduced into the ring.
  static QExpansion from_integers(const PrimeContext& ctx, std::span<const std::int64_t> coeffs,
                                  std::optional<FormMeta> meta = std::nullopt) {
    std::vector<Residue> r(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) r[i] = ctx.from_int(coeffs[i]);
    return QExpansion(ctx, std::move(r), std::move(meta));
  }

  /// The constant series c.
  static QExpansion constant(const PrimeContext& ctx, Residue c, int trunc) {
    QExpansion f(ctx, trunc);
    f.coeffs_[0] = c % ctx.modulus();
    return f;
  }

  /// The monomial q^j (zero if j exceeds the truncation).
  static QExpansion monomial(const PrimeContext& ctx, int j, int trunc) {
    QExpansion f(ctx, trunc);
    if (j >= 0 && j <= trunc) f.coeffs_[j] = 1 % ctx.modulus();
    return f;
  }

  const PrimeContext& ctx() const noexcept { return ctx_; }
  int trunc() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  Residue operator[](std::size_t n) const { return coeffs_.at(n); }
  Residue coeff(std::size_t n) const { return coeffs_.at(n); }
  const std::vector<Residue>& coeffs() const noexcept { return coeffs_; }
  const std::optional<FormMeta>& meta() const noexcept { return meta_; }

  QExpansion with_meta(std::optional<FormMeta> meta) const {
    QExpansion f = *this;
    f.meta_ = std::move(meta);
    f.validate_meta();
    return f;
  }

  QExpansion truncated(int t) const {
    if (t > trunc()) fail(ErrorKind::TruncationTooShort, "cannot extend a truncation from " +
                                                             std::to_string(trunc()) + " to " + std::to_string(t));
    QExpansion f = *this;
    f.coeffs_.resize(static_cast<std::size_t>(t) + 1);
    return f;
  }

  bool is_zero() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](Residue c) { return c == 0; });
  }

  /// Minimal valuation over all coefficients (N for the zero series).
  int valuation() const noexcept {
    int v = ctx_.nprec();
    for (Residue c : coeffs_) v = std::min(v, ctx_.valuation(c));
    return v;
  }

  /// Coefficientwise equality on the common truncation.
  bool agrees_with(const QExpansion& other) const {
    int t = std::min(trunc(), other.trunc());
    return std::equal(coeffs_.begin(), coeffs_.begin() + t + 1, other.coeffs_.begin());
  }

  friend bool operator==(const QExpansion& a, const QExpansion& b) {
    return a.ctx_.same_ring(b.ctx_) && a.coeffs_ == b.coeffs_;
  }

 private:
  static int check_trunc(const PrimeContext& ctx, int trunc) {
    if (trunc < 0) fail(ErrorKind::InvalidArgument, "negative truncation");
    (void)ctx;
    return trunc;
  }

  void validate_meta() const {
    if (!meta_) return;
    if (meta_->level < 1 || gcd(meta_->level, ctx_.p()) != 1)
      fail(ErrorKind::InvalidArgument, "level must be positive and prime to p");
    if (meta_->cuspidal && coeffs_[0] != 0) fail(ErrorKind::InvalidArgument, "cusp form with nonzero a_0");
  }

  PrimeContext ctx_;
  std::vector<Residue> coeffs_;
  std::optional<FormMeta> meta_;

};

namespace detail {

inline std::optional<FormMeta> merge_meta(const QExpansion& f, const QExpansion& g) {
  if (f.meta() && g.meta() && *f.meta() == *g.meta()) return f.meta();
  if (f.meta() && g.meta()) {
    const FormMeta& a = *f.meta();
    const FormMeta& b = *g.meta();
    if (a.level == b.level && a.weight == b.weight && a.character == b.character)
      return FormMeta{a.level, a.weight, a.character, a.cuspidal && b.cuspidal};
  }
  return std::nullopt;
}

inline void same_ctx(const QExpansion& f, const QExpansion& g) { require_same_ring(f.ctx(), g.ctx()); }

}  // namespace detail

inline QExpansion add(const QExpansion& f, const QExpansion& g) {
  detail::same_ctx(f, g);
  const auto& ctx = f.ctx();
  int t = std::min(f.trunc(), g.trunc());
  std::vector<Residue> c(static_cast<std::size_t>(t) + 1);
  for (int n = 0; n <= t; ++n) c[n] = ctx.add(f[n], g[n]);
  return QExpansion(ctx, std::move(c), detail::merge_meta(f, g));
}

inline QExpansion sub(const QExpansion& f, const QExpansion& g) {
  detail::same_ctx(f, g);
  const auto& ctx = f.ctx();
  int t = std::min(f.trunc(), g.trunc());
  std::vector<Residue> c(static_cast<std::size_t>(t) + 1);
  for (int n = 0; n <= t; ++n) c[n] = ctx.sub(f[n], g[n]);
  return QExpansion(ctx, std::move(c), detail::merge_meta(f, g));
}

inline QExpansion scale(Residue s, const QExpansion& f) {
  const auto& ctx = f.ctx();
  std::vector<Residue> c(f.coeffs().size());
  s %= ctx.modulus();
  for (std::size_t n = 0; n < c.size(); ++n) c[n] = ctx.mul(s, f[n]);
  return QExpansion(ctx, std::move(c), f.meta());
}

namespace detail {

/// Cauchy product of coefficient vectors up to index t, with lazy reduction
/// when the accumulated sum provably fits in 64 bits.
inline std::vector<Residue> cauchy(const PrimeContext& ctx, std::span<const Residue> a, std::span<const Residue> b,
                                   int t) {
  std::vector<Residue> c(static_cast<std::size_t>(t) + 1);
  const Residue m = ctx.modulus();
  const unsigned __int128 bound = static_cast<unsigned __int128>(m - 1) * (m - 1) * (static_cast<unsigned>(t) + 1);
  if (bound < (static_cast<unsigned __int128>(1) << 64)) {
    for (int n = 0; n <= t; ++n) {
      std::uint64_t acc = 0;
      for (int i = 0; i <= n; ++i) acc += a[i] * b[n - i];
      c[n] = acc % m;
    }
  } else {
    for (int n = 0; n <= t; ++n) {
      unsigned __int128 acc = 0;
      for (int i = 0; i <= n; ++i) {
        acc += static_cast<unsigned __int128>(a[i]) * b[n - i];
        if ((i & 7) == 7) acc %= m;
      }
      c[n] = static_cast<Residue>(acc % m);
    }
  }
  return c;
}

}  // namespace detail

/// Product; weights add and characters multiply when both carry metadata.
inline QExpansion mul(const QExpansion& f, const QExpansion& g) {
  detail::same_ctx(f, g);
  int t = std::min(f.trunc(), g.trunc());
  auto c = detail::cauchy(f.ctx(), f.coeffs(), g.coeffs(), t);
  std::optional<FormMeta> meta;
  if (f.meta() && g.meta()) {
    meta = FormMeta{lcm(f.meta()->level, g.meta()->level), f.meta()->weight + g.meta()->weight,
                    f.meta()->character * g.meta()->character, f.meta()->cuspidal || g.meta()->cuspidal};
  }
  return QExpansion(f.ctx(), std::move(c), std::move(meta));
}

/// Multiplicative inverse; the constant term must be a unit.  Weight negates.
inline QExpansion invert(const QExpansion& f) {
  const auto& ctx = f.ctx();
  if (!ctx.is_unit(f[0])) fail(ErrorKind::NonUnitConstantTerm, "constant term is not a unit");
  const int t = f.trunc();
  const Residue inv0 = ctx.inv(f[0]);
  std::vector<Residue> g(static_cast<std::size_t>(t) + 1, 0);
  g[0] = inv0;
  for (int n = 1; n <= t; ++n) {
    unsigned __int128 acc = 0;
    for (int i = 1; i <= n; ++i) {
      acc += static_cast<unsigned __int128>(f[i]) * g[n - i];
      if ((i & 7) == 7) acc %= ctx.modulus();
    }
    g[n] = ctx.mul(ctx.neg(static_cast<Residue>(acc % ctx.modulus())), inv0);
  }
  std::optional<FormMeta> meta;
  if (f.meta())
    meta = FormMeta{f.meta()->level, -f.meta()->weight, f.meta()->character.conj(ctx), false};
  return QExpansion(ctx, std::move(g), std::move(meta));
}

/// f^e; negative exponents go through invert.
inline QExpansion power(const QExpansion& f, int e) {
  if (e < 0) return power(invert(f), -e);
  QExpansion result = QExpansion::constant(f.ctx(), 1, f.trunc());
  QExpansion base = f;
  for (int k = e; k > 0;) {
    if (k & 1) result = QExpansion(f.ctx(), detail::cauchy(f.ctx(), result.coeffs(), base.coeffs(), f.trunc()));
    k >>= 1;
    if (k > 0) base = QExpansion(f.ctx(), detail::cauchy(f.ctx(), base.coeffs(), base.coeffs(), f.trunc()));
  }
  if (!f.meta()) return result;
  DirichletCharacter chi = DirichletCharacter::trivial(f.ctx());
  for (int i = 0; i < e; ++i) chi = chi * f.meta()->character;
  return result.with_meta(FormMeta{f.meta()->level, e * f.meta()->weight, chi, f.meta()->cuspidal && e > 0});
}

/// U_p: a_n -> a_{np}; the truncation drops to floor(trunc/p).
inline QExpansion u_p(const QExpansion& f) {
  const auto p = static_cast<int>(f.ctx().p());
  const int t = f.trunc() / p;
  std::vector<Residue> c(static_cast<std::size_t>(t) + 1);
  for (int n = 0; n <= t; ++n) c[n] = f[static_cast<std::size_t>(n) * p];
  return QExpansion(f.ctx(), std::move(c), f.meta());
}

/// V: q -> q^p; the truncation is min(M, p*trunc).
inline QExpansion v_op(const QExpansion& f) {
  const auto p = static_cast<int>(f.ctx().p());
  const long long wanted = static_cast<long long>(p) * f.trunc();
  const int t = static_cast<int>(std::min<long long>(f.ctx().qprec(), wanted));
  std::vector<Residue> c(static_cast<std::size_t>(t) + 1, 0);
  for (int n = 0; static_cast<long long>(n) * p <= t; ++n) c[static_cast<std::size_t>(n) * p] = f[n];
  return QExpansion(f.ctx(), std::move(c), f.meta());
}

/// Substitution q -> q^d for a positive integer d, used for degeneracy maps.
inline QExpansion substitute_power(const QExpansion& f, int d) {
  if (d < 1) fail(ErrorKind::InvalidArgument, "degeneracy index must be positive");
  const long long wanted = static_cast<long long>(d) * f.trunc();
  const int t = static_cast<int>(std::min<long long>(f.ctx().qprec(), wanted));
  std::vector<Residue> c(static_cast<std::size_t>(t) + 1, 0);
  for (int n = 0; static_cast<long long>(n) * d <= t; ++n) c[static_cast<std::size_t>(n) * d] = f[n];
  return QExpansion(f.ctx(), std::move(c), std::nullopt);
}

/// T_q for a good prime q on a character eigenspace:
/// b_n = a_{nq} + chi(q) q^{k-1} a_{n/q}.
inline QExpansion t_q(const QExpansion& f, std::int64_t q) {
  if (!f.meta()) fail(ErrorKind::MissingMetadata, "T_q needs weight and character");
  const auto& ctx = f.ctx();
  const FormMeta& meta = *f.meta();
  if (!is_prime(q) || meta.level % q == 0 || q == ctx.p())
    fail(ErrorKind::BadPrime, std::to_string(q) + " is not a good prime");
  const int t = f.trunc() / static_cast<int>(q);
  // S_q = q^{k-1} chi(q); weights below 1 use the inverse power of q
  Residue qpow = meta.weight >= 1 ? ctx.pow(ctx.from_int(q), static_cast<std::uint64_t>(meta.weight - 1))
                                  : ctx.pow(ctx.inv(ctx.from_int(q)), static_cast<std::uint64_t>(1 - meta.weight));
  const Residue s = ctx.mul(qpow, meta.character(q));
  std::vector<Residue> c(static_cast<std::size_t>(t) + 1);
  for (int n = 0; n <= t; ++n) {
    Residue v = f[static_cast<std::size_t>(n) * q];
    if (n % q == 0) v = ctx.add(v, ctx.mul(s, f[n / q]));
    c[n] = v;
  }
  return QExpansion(ctx, std::move(c), f.meta());
}

/// U_q for a prime q dividing the level: b_n = a_{nq}.
inline QExpansion u_q(const QExpansion& f, std::int64_t q) {
  if (!f.meta()) fail(ErrorKind::MissingMetadata, "U_q needs the level");
  if (!is_prime(q) || f.meta()->level % q != 0)
    fail(ErrorKind::BadPrime, std::to_string(q) + " does not divide the level");
  const int t = f.trunc() / static_cast<int>(q);
  std::vector<Residue> c(static_cast<std::size_t>(t) + 1);
  for (int n = 0; n <= t; ++n) c[n] = f[static_cast<std::size_t>(n) * q];
  return QExpansion(f.ctx(), std::move(c), f.meta());
}

}  // namespace pmf
