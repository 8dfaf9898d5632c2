#pragma once

// Exact base arithmetic: rationals, Bernoulli numbers, divisor sums and
// Teichmuller lifts, all feeding into Z/p^N.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "pmf/error.hpp"
#include "pmf/ring.hpp"

namespace pmf {

using BigInt = boost::multiprecision::cpp_int;

/// A rational number in lowest terms with positive denominator.
class ExactRational {
 public:
  ExactRational() : num_(0), den_(1) {}
  ExactRational(BigInt num) : num_(std::move(num)), den_(1) {}  // NOLINT(google-explicit-constructor)
  ExactRational(std::int64_t num) : num_(num), den_(1) {}       // NOLINT(google-explicit-constructor)
  ExactRational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_ == 0) fail(ErrorKind::InvalidArgument, "zero denominator");
    normalize();
  }

  const BigInt& numerator() const noexcept { return num_; }
  const BigInt& denominator() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_ == 0; }

  friend ExactRational operator+(const ExactRational& a, const ExactRational& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend ExactRational operator-(const ExactRational& a, const ExactRational& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend ExactRational operator*(const ExactRational& a, const ExactRational& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend ExactRational operator/(const ExactRational& a, const ExactRational& b) {
    if (b.num_ == 0) fail(ErrorKind::InvalidArgument, "division by zero rational");
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  ExactRational operator-() const { return {-num_, den_}; }
  ExactRational& operator+=(const ExactRational& o) { return *this = *this + o; }
  ExactRational& operator-=(const ExactRational& o) { return *this = *this - o; }

  friend bool operator==(const ExactRational& a, const ExactRational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string str() const {
    return den_ == 1 ? num_.str() : num_.str() + "/" + den_.str();
  }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    BigInt g = boost::multiprecision::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  BigInt num_;
  BigInt den_;
};

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// B_0 .. B_kmax with the x/(e^x - 1) convention (B_1 = -1/2).
inline std::vector<ExactRational> bernoulli_table(int kmax) {
  if (kmax < 0) fail(ErrorKind::InvalidArgument, "Bernoulli index must be non-negative");
  std::vector<ExactRational> b;
  b.reserve(kmax + 1);
  b.emplace_back(1);
  for (int k = 1; k <= kmax; ++k) {
    if (k >= 3 && k % 2 == 1) {
      b.emplace_back(0);
      continue;
    }
    // sum_{j=0}^{k} C(k+1, j) B_j = 0
    ExactRational acc;
    for (int j = 0; j < k; ++j) acc += ExactRational(binomial(k + 1, j)) * b[j];
    b.push_back(-acc / ExactRational(BigInt(k + 1)));
  }
  return b;
}

inline ExactRational bernoulli(int k) { return bernoulli_table(k).back(); }

inline int valuation(const BigInt& n, std::int64_t p) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "valuation of zero");
  int v = 0;
  BigInt m = n;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

/// p-adic valuation of a nonzero rational.
inline int valuation(const ExactRational& r, std::int64_t p) {
  return valuation(r.numerator(), p) - valuation(r.denominator(), p);
}

inline Residue reduce_bigint(const BigInt& n, const PrimeContext& ctx) {
  BigInt m = n % BigInt(ctx.modulus());
  if (m < 0) m += ctx.modulus();
  return static_cast<Residue>(m);
}

/// Image of a p-integral rational in Z/p^N.
inline Residue reduce_to_ring(const ExactRational& r, const PrimeContext& ctx) {
  if (r.is_zero()) return 0;
  const int v = valuation(r, ctx.p());
  if (v < 0) fail(ErrorKind::NegativeValuation, r.str() + " has p-adic valuation " + std::to_string(v));
  Residue num = reduce_bigint(r.numerator(), ctx);
  Residue den = reduce_bigint(r.denominator(), ctx);
  return ctx.mul(num, ctx.inv(den));
}

/// Sum of t-th powers of the positive divisors of n.
inline BigInt sigma_t(std::int64_t n, int t) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "sigma_t needs n >= 1");
  BigInt total = 0;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    total += boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(t));
    std::int64_t e = n / d;
    if (e != d) total += boost::multiprecision::pow(BigInt(e), static_cast<unsigned>(t));
  }
  return total;
}

/// sigma_t(n) reduced into the ring, without forming the big integer.
inline Residue sigma_t_mod(std::int64_t n, int t, const PrimeContext& ctx) {
  Residue total = 0;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    total = ctx.add(total, ctx.pow(ctx.from_int(d), static_cast<std::uint64_t>(t)));
    std::int64_t e = n / d;
    if (e != d) total = ctx.add(total, ctx.pow(ctx.from_int(e), static_cast<std::uint64_t>(t)));
  }
  return total;
}

/// The (p-1)-st root of unity congruent to x mod p.
inline Residue teichmuller(std::int64_t x, const PrimeContext& ctx) {
  if (x % ctx.p() == 0) fail(ErrorKind::NotCoprime, std::to_string(x) + " is divisible by p");
  Residue y = ctx.from_int(x);
  for (;;) {
    Residue next = ctx.pow(y, static_cast<std::uint64_t>(ctx.p()));
    if (next == y) return y;
    y = next;
  }
}

inline std::int64_t gcd(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline std::int64_t lcm(std::int64_t a, std::int64_t b) { return a / gcd(a, b) * b; }

inline std::vector<std::int64_t> divisors(std::int64_t n) {
  std::vector<std::int64_t> small, large;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    small.push_back(d);
    if (d != n / d) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

inline std::vector<std::int64_t> prime_factors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d != 0) continue;
    out.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace pmf
