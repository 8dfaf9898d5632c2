#pragma once

// Dirichlet characters with values in Z/p^N.  Only characters whose order
// divides p-1 are representable; their values are Teichmuller lifts.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pmf/arith.hpp"
#include "pmf/error.hpp"
#include "pmf/ring.hpp"

namespace pmf {

/// Kronecker symbol (D/n) for n >= 1.
inline int kronecker_symbol(std::int64_t d, std::int64_t n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "kronecker_symbol needs n >= 1");
  int result = 1;
  while (n % 2 == 0) {
    n /= 2;
    if (d % 2 == 0) return 0;
    std::int64_t r = ((d % 8) + 8) % 8;
    if (r == 3 || r == 5) result = -result;
  }
  // Jacobi symbol (d/n), n odd
  std::int64_t a = ((d % n) + n) % n;
  std::int64_t m = n;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      std::int64_t r = m % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, m);
    if (a % 4 == 3 && m % 4 == 3) result = -result;
    a %= m;
  }
  return m == 1 ? result : 0;
}

inline bool is_squarefree(std::int64_t n) {
  n = n < 0 ? -n : n;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % (d * d) == 0) return false;
  return true;
}

inline bool is_fundamental_discriminant(std::int64_t d) {
  if (d == 1) return true;
  std::int64_t r = ((d % 4) + 4) % 4;
  if (r == 1) return is_squarefree(d);
  if (r != 0) return false;
  std::int64_t m = d / 4;
  std::int64_t rm = ((m % 4) + 4) % 4;
  return (rm == 2 || rm == 3) && is_squarefree(m);
}

class DirichletCharacter {
 public:
  /// The trivial character of modulus 1.
  static DirichletCharacter trivial(const PrimeContext& ctx) {
    return DirichletCharacter(ctx, 1, {1}, "trivial");
  }

  /// Quadratic character attached to a fundamental discriminant, modulus |D|.
  static DirichletCharacter kronecker(std::int64_t disc, const PrimeContext& ctx) {
    if (!is_fundamental_discriminant(disc))
      fail(ErrorKind::NotFundamental, std::to_string(disc) + " is not a fundamental discriminant");
    std::int64_t m = disc < 0 ? -disc : disc;
    if (gcd(m, ctx.p()) != 1)
      fail(ErrorKind::ModulusSharesFactorWithP, "|D| = " + std::to_string(m) + " is not coprime to p");
    if (disc == 1) return trivial(ctx);
    std::vector<Residue> vals(static_cast<std::size_t>(m));
    for (std::int64_t a = 0; a < m; ++a) vals[a] = ctx.from_int(a == 0 ? 0 : kronecker_symbol(disc, a));
    return DirichletCharacter(ctx, m, std::move(vals), "kronecker:" + std::to_string(disc));
  }

  /// Character given by its values at residues 1 .. m-1 (value at 0 is 0 for m > 1).
  static DirichletCharacter from_table(std::int64_t m, const std::vector<Residue>& values_from_one,
                                       const PrimeContext& ctx) {
    if (m < 1) fail(ErrorKind::InvalidArgument, "character modulus must be >= 1");
    if (m == 1) {
      if (!values_from_one.empty() && !(values_from_one.size() == 1 && values_from_one[0] == 1))
        fail(ErrorKind::InvalidArgument, "modulus-1 table must be empty");
      return trivial(ctx);
    }
    if (static_cast<std::int64_t>(values_from_one.size()) != m - 1)
      fail(ErrorKind::InvalidArgument, "table for modulus " + std::to_string(m) + " needs " +
                                           std::to_string(m - 1) + " values");
    std::vector<Residue> vals(static_cast<std::size_t>(m), 0);
    for (std::int64_t a = 1; a < m; ++a) vals[a] = values_from_one[a - 1] % ctx.modulus();
    return DirichletCharacter(ctx, m, std::move(vals), "");
  }

  /// Parses "trivial" | "kronecker:<D>" | "table:<m>:<v_1,...,v_{m-1}>".
  static DirichletCharacter parse(const std::string& spec, const PrimeContext& ctx) {
    if (spec == "trivial") return trivial(ctx);
    try {
      if (spec.rfind("kronecker:", 0) == 0) return kronecker(std::stoll(spec.substr(10)), ctx);
      if (spec.rfind("table:", 0) == 0) {
        auto colon = spec.find(':', 6);
        if (colon == std::string::npos) fail(ErrorKind::FormatError, "bad character table '" + spec + "'");
        std::int64_t m = std::stoll(spec.substr(6, colon - 6));
        std::vector<Residue> vals;
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) vals.push_back(static_cast<Residue>(std::stoull(item)));
        return from_table(m, vals, ctx);
      }
    } catch (const std::logic_error&) {
      fail(ErrorKind::FormatError, "bad character spec '" + spec + "'");
    }
    fail(ErrorKind::FormatError, "unknown character spec '" + spec + "'");
  }

  /// All characters modulo m whose order divides p-1, in a deterministic order.
  static std::vector<DirichletCharacter> all_modulo(std::int64_t m, const PrimeContext& ctx);

  std::int64_t modulus() const noexcept { return modulus_; }
  int order() const noexcept { return order_; }
  const std::string& spec() const noexcept { return spec_; }

  Residue operator()(std::int64_t n) const noexcept {
    std::int64_t r = n % modulus_;
    if (r < 0) r += modulus_;
    return values_[static_cast<std::size_t>(r)];
  }

  bool is_trivial() const noexcept { return order_ == 1; }

  /// chi(-1) as +1 or -1.
  int parity(const PrimeContext& ctx) const { return (*this)(-1) == 1 % ctx.modulus() ? 1 : -1; }

  /// Values lie in {0, 1, -1}.
  bool is_real(const PrimeContext& ctx) const {
    return std::all_of(values_.begin(), values_.end(),
                       [&](Residue v) { return v == 0 || v == 1 || v == ctx.modulus() - 1; });
  }

  std::int64_t conductor() const {
    for (std::int64_t d : divisors(modulus_)) {
      bool ok = true;
      for (std::int64_t a = 1; a < modulus_ && ok; a += d)
        if (gcd(a, modulus_) == 1 && values_[a] != 1) ok = false;
      if (ok) return d;
    }
    return modulus_;
  }

  /// The primitive character inducing this one.
  DirichletCharacter primitive(const PrimeContext& ctx) const {
    std::int64_t f = conductor();
    if (f == modulus_) return *this;
    if (f == 1) return trivial(ctx);
    std::vector<Residue> vals(static_cast<std::size_t>(f), 0);
    for (std::int64_t a = 1; a < f; ++a) {
      if (gcd(a, f) != 1) continue;
      std::int64_t b = a;
      while (gcd(b, modulus_) != 1) b += f;
      vals[a] = (*this)(b);
    }
    return DirichletCharacter(ctx, f, std::move(vals), "");
  }

  /// The character modulo a multiple of the modulus induced by this one.
  DirichletCharacter induced(std::int64_t m, const PrimeContext& ctx) const {
    if (m % modulus_ != 0) fail(ErrorKind::InvalidArgument, "induced modulus must be a multiple");
    if (m == modulus_) return *this;
    std::vector<Residue> vals(static_cast<std::size_t>(m), 0);
    for (std::int64_t a = 0; a < m; ++a) vals[a] = gcd(a, m) == 1 ? (*this)(a) : 0;
    return DirichletCharacter(ctx, m, std::move(vals), "");
  }

  DirichletCharacter conj(const PrimeContext& ctx) const {
    std::vector<Residue> vals(values_.size());
    for (std::size_t a = 0; a < values_.size(); ++a) vals[a] = values_[a] == 0 ? 0 : ctx.inv(values_[a]);
    return DirichletCharacter(ctx, modulus_, std::move(vals), "");
  }

  friend DirichletCharacter operator*(const DirichletCharacter& a, const DirichletCharacter& b);

  /// Equal as functions on the integers.
  friend bool operator==(const DirichletCharacter& a, const DirichletCharacter& b) {
    return a.modulus_ == b.modulus_ && a.values_ == b.values_;
  }

  /// Equal after inducing both to the lcm of the moduli.
  bool same_primitive(const DirichletCharacter& other) const {
    std::int64_t m = lcm(modulus_, other.modulus_);
    for (std::int64_t a = 1; a < m; ++a) {
      if (gcd(a, m) != 1) continue;
      if ((*this)(a) != other(a)) return false;
    }
    return true;
  }

  const std::vector<Residue>& values() const noexcept { return values_; }

 private:
  DirichletCharacter(const PrimeContext& ctx, std::int64_t m, std::vector<Residue> vals, std::string spec)
      : modulus_(m), values_(std::move(vals)), ctx_(ctx) {
    validate(ctx);
    spec_ = spec.empty() ? table_spec() : std::move(spec);
  }

  std::string table_spec() const {
    if (modulus_ == 1) return "trivial";
    std::string s = "table:" + std::to_string(modulus_) + ":";
    for (std::int64_t a = 1; a < modulus_; ++a) {
      if (a > 1) s += ",";
      s += std::to_string(values_[a]);
    }
    return s;
  }

  void validate(const PrimeContext& ctx) {
    const Residue one = 1 % ctx.modulus();
    if (modulus_ == 1) {
      values_.assign(1, one);
      order_ = 1;
      return;
    }
    if (values_[1] != one) fail(ErrorKind::InvalidArgument, "chi(1) must be 1");
    int order = 1;
    for (std::int64_t a = 0; a < modulus_; ++a) {
      bool coprime = gcd(a, modulus_) == 1;
      if (!coprime && values_[a] != 0)
        fail(ErrorKind::InvalidArgument, "chi must vanish on residues sharing a factor with the modulus");
      if (!coprime) continue;
      if (!ctx.is_unit(values_[a]))
        fail(ErrorKind::InvalidArgument, "chi(" + std::to_string(a) + ") is not a unit");
      if (ctx.pow(values_[a], static_cast<std::uint64_t>(ctx.p() - 1)) != one)
        fail(ErrorKind::CharacterOrder, "chi(" + std::to_string(a) + ") has order not dividing p-1");
      int k = 1;
      Residue x = values_[a];
      while (x != one) {
        x = ctx.mul(x, values_[a]);
        ++k;
      }
      order = static_cast<int>(lcm(order, k));
    }
    for (std::int64_t a = 1; a < modulus_; ++a) {
      if (gcd(a, modulus_) != 1) continue;
      for (std::int64_t b = a; b < modulus_; ++b) {
        if (gcd(b, modulus_) != 1) continue;
        if (values_[(a * b) % modulus_] != ctx.mul(values_[a], values_[b]))
          fail(ErrorKind::InvalidArgument, "table is not multiplicative");
      }
    }
    order_ = order;
  }

  std::int64_t modulus_ = 1;
  std::vector<Residue> values_;
  PrimeContext ctx_;
  int order_ = 1;
  std::string spec_;

  friend struct CharacterAccess;
};

struct CharacterAccess {
  static DirichletCharacter make(const PrimeContext& ctx, std::int64_t m, std::vector<Residue> vals) {
    return DirichletCharacter(ctx, m, std::move(vals), "");
  }
};

inline DirichletCharacter operator*(const DirichletCharacter& a, const DirichletCharacter& b) {
  require_same_ring(a.ctx_, b.ctx_);
  if (a.modulus_ == 1) return b;
  if (b.modulus_ == 1) return a;
  const PrimeContext& ctx = a.ctx_;
  std::int64_t m = lcm(a.modulus_, b.modulus_);
  std::vector<Residue> vals(static_cast<std::size_t>(m), 0);
  for (std::int64_t x = 0; x < m; ++x) vals[x] = ctx.mul(a(x), b(x));
  DirichletCharacter out(ctx, m, std::move(vals), "");
  // multiplying by a trivial character of the same modulus keeps the name
  if (a.is_trivial() && m == b.modulus_) out.spec_ = b.spec_;
  if (b.is_trivial() && m == a.modulus_) out.spec_ = a.spec_;
  return out;
}

namespace detail {

inline std::int64_t power_mod(std::int64_t a, std::int64_t e, std::int64_t m) {
  std::int64_t r = 1 % m;
  a %= m;
  while (e > 0) {
    if (e & 1) r = static_cast<std::int64_t>(static_cast<__int128>(r) * a % m);
    a = static_cast<std::int64_t>(static_cast<__int128>(a) * a % m);
    e >>= 1;
  }
  return r;
}

inline std::int64_t multiplicative_order(std::int64_t a, std::int64_t m) {
  std::int64_t x = a % m;
  std::int64_t k = 1;
  while (x != 1 % m) {
    x = x * a % m;
    ++k;
  }
  return k;
}

/// Generators of (Z/m)^x as a direct product of cyclic groups, with their orders.
inline std::vector<std::pair<std::int64_t, std::int64_t>> unit_group_generators(std::int64_t m) {
  std::vector<std::pair<std::int64_t, std::int64_t>> gens;
  std::int64_t rest = m;
  for (std::int64_t q : prime_factors(m)) {
    std::int64_t qe = 1;
    int e = 0;
    while (rest % q == 0) {
      rest /= q;
      qe *= q;
      ++e;
    }
    std::int64_t other = m / qe;
    // lift a local generator g mod qe to x = g mod qe, 1 mod other
    auto lift = [&](std::int64_t g) {
      for (std::int64_t x = g; x < m; x += qe)
        if (x % other == 1 % other) return x;
      return g;
    };
    if (q == 2) {
      if (e == 1) continue;
      gens.emplace_back(lift(qe - 1), 2);
      if (e >= 3) gens.emplace_back(lift(5), qe / 4);
      continue;
    }
    std::int64_t phi = qe / q * (q - 1);
    for (std::int64_t g = 2; g < qe; ++g) {
      if (g % q == 0) continue;
      if (multiplicative_order(g, qe) == phi) {
        gens.emplace_back(lift(g), phi);
        break;
      }
    }
  }
  return gens;
}

}  // namespace detail

inline std::vector<DirichletCharacter> DirichletCharacter::all_modulo(std::int64_t m, const PrimeContext& ctx) {
  if (m == 1) return {trivial(ctx)};
  auto gens = detail::unit_group_generators(m);
  std::int64_t g = 2;
  while (detail::multiplicative_order(g, ctx.p()) != ctx.p() - 1) ++g;
  const Residue zeta = teichmuller(g, ctx);  // order p-1

  // per-generator admissible exponent counts
  std::vector<std::int64_t> counts;
  for (auto& [gen, ord] : gens) counts.push_back(gcd(ord, ctx.p() - 1));

  std::vector<DirichletCharacter> out;
  std::vector<std::int64_t> choice(gens.size(), 0);
  for (;;) {
    std::vector<Residue> vals(static_cast<std::size_t>(m), 0);
    // walk the group via exponent tuples
    std::vector<std::int64_t> ex(gens.size(), 0);
    for (;;) {
      std::int64_t x = 1;
      Residue v = 1 % ctx.modulus();
      for (std::size_t i = 0; i < gens.size(); ++i) {
        x = static_cast<std::int64_t>(static_cast<__int128>(x) * detail::power_mod(gens[i].first, ex[i], m) % m);
        std::int64_t step = (ctx.p() - 1) / counts[i] * choice[i];
        v = ctx.mul(v, ctx.pow(zeta, static_cast<std::uint64_t>(step * ex[i] % (ctx.p() - 1))));
      }
      vals[x] = v;
      std::size_t i = 0;
      while (i < gens.size() && ++ex[i] == gens[i].second) ex[i++] = 0;
      if (i == gens.size()) break;
    }
    out.push_back(CharacterAccess::make(ctx, m, std::move(vals)));
    std::size_t i = 0;
    while (i < gens.size() && ++choice[i] == counts[i]) choice[i++] = 0;
    if (i == gens.size()) break;
  }
  return out;
}

}  // namespace pmf
