#pragma once

// The working ring Z/p^N together with the truncation order M of q-expansions.
//
// Elements are plain residues in [0, p^N).  All arithmetic goes through the
// context, which owns the modulus; the modulus is kept below 2^62 so that
// products fit in an unsigned 128-bit intermediate.

#include <cstdint>
#include <string>

#include "pmf/error.hpp"

namespace pmf {

using Residue = std::uint64_t;

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

class PrimeContext {
 public:
  PrimeContext(std::int64_t p, int nprec, int qprec) : p_(p), nprec_(nprec), qprec_(qprec) {
    if (!is_prime(p) || p < 5) fail(ErrorKind::InvalidArgument, "p must be a prime >= 5, got " + std::to_string(p));
    if (nprec < 1) fail(ErrorKind::InvalidArgument, "precision exponent must be >= 1");
    if (qprec < 1) fail(ErrorKind::InvalidArgument, "q-expansion truncation must be >= 1");
    unsigned __int128 m = 1;
    for (int i = 0; i < nprec; ++i) {
      m *= static_cast<unsigned __int128>(p);
      if (m >= (static_cast<unsigned __int128>(1) << 62))
        fail(ErrorKind::InvalidArgument, "p^N exceeds 2^62");
    }
    modulus_ = static_cast<Residue>(m);
  }

  std::int64_t p() const noexcept { return p_; }
  int nprec() const noexcept { return nprec_; }
  int qprec() const noexcept { return qprec_; }
  Residue modulus() const noexcept { return modulus_; }

  /// Same ring, different truncation order.
  PrimeContext with_qprec(int qprec) const { return PrimeContext(p_, nprec_, qprec); }
  PrimeContext with_nprec(int nprec) const { return PrimeContext(p_, nprec, qprec_); }

  Residue from_int(std::int64_t x) const noexcept {
    auto m = static_cast<std::int64_t>(modulus_);
    std::int64_t r = x % m;
    if (r < 0) r += m;
    return static_cast<Residue>(r);
  }

  /// Symmetric lift to (-p^N/2, p^N/2].
  std::int64_t centered(Residue a) const noexcept {
    auto v = static_cast<std::int64_t>(a);
    auto m = static_cast<std::int64_t>(modulus_);
    return v > m / 2 ? v - m : v;
  }

  Residue add(Residue a, Residue b) const noexcept {
    Residue s = a + b;
    return s >= modulus_ ? s - modulus_ : s;
  }
  Residue sub(Residue a, Residue b) const noexcept { return a >= b ? a - b : a + modulus_ - b; }
  Residue neg(Residue a) const noexcept { return a == 0 ? 0 : modulus_ - a; }
  Residue mul(Residue a, Residue b) const noexcept {
    return static_cast<Residue>(static_cast<unsigned __int128>(a) * b % modulus_);
  }

  Residue pow(Residue a, std::uint64_t e) const noexcept {
    Residue result = 1 % modulus_;
    while (e > 0) {
      if (e & 1) result = mul(result, a);
      a = mul(a, a);
      e >>= 1;
    }
    return result;
  }

  /// p-adic valuation of a residue; zero has valuation N.
  int valuation(Residue a) const noexcept {
    if (a == 0) return nprec_;
    int v = 0;
    auto p = static_cast<Residue>(p_);
    while (a % p == 0) {
      a /= p;
      ++v;
    }
    return v;
  }

  bool is_unit(Residue a) const noexcept { return a % static_cast<Residue>(p_) != 0; }

  Residue inv(Residue a) const {
    if (!is_unit(a)) fail(ErrorKind::NotUnit, "residue " + std::to_string(a) + " is not a unit mod p^N");
    // extended Euclid on signed 128-bit
    __int128 t = 0, new_t = 1;
    __int128 r = modulus_, new_r = a;
    while (new_r != 0) {
      __int128 q = r / new_r;
      __int128 tmp = t - q * new_t;
      t = new_t;
      new_t = tmp;
      tmp = r - q * new_r;
      r = new_r;
      new_r = tmp;
    }
    if (t < 0) t += modulus_;
    return static_cast<Residue>(t);
  }

  /// p^e as a residue (zero once e >= N).
  Residue p_power(int e) const noexcept {
    if (e >= nprec_) return 0;
    return pow(static_cast<Residue>(p_), static_cast<std::uint64_t>(e));
  }

  /// Reduction to Z/p^e, for e <= N, as a representative in [0, p^e).
  Residue reduce_to(Residue a, int e) const noexcept {
    if (e >= nprec_) return a;
    return a % pow(static_cast<Residue>(p_), static_cast<std::uint64_t>(e));
  }

  bool operator==(const PrimeContext& other) const = default;

  /// Ring equality ignoring the truncation order.
  bool same_ring(const PrimeContext& other) const noexcept { return p_ == other.p_ && nprec_ == other.nprec_; }

 private:
  std::int64_t p_;
  int nprec_;
  int qprec_;
  Residue modulus_ = 1;
};

inline void require_same_ring(const PrimeContext& a, const PrimeContext& b) {
  if (!a.same_ring(b))
    fail(ErrorKind::ContextMismatch, "rings Z/" + std::to_string(a.p()) + "^" + std::to_string(a.nprec()) + " and Z/" +
                                         std::to_string(b.p()) + "^" + std::to_string(b.nprec()) + " differ");
}

}  // namespace pmf
