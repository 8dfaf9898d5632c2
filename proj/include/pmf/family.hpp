#pragma once

// Congruences between ordinary eigensystems across weights: the finite
// shadow of membership in one Hida family (trivial-zeta branch only).

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "pmf/companion.hpp"
#include "pmf/error.hpp"
#include "pmf/overconv.hpp"

namespace pmf {

/// k together with its image (1+p)^{k-2} in Z/p^N.
struct WeightPoint {
  int k;
  Residue element;

  static WeightPoint at(int k, const PrimeContext& ctx) {
    const Residue base = ctx.from_int(1 + ctx.p());
    const Residue e = k >= 2 ? ctx.pow(base, static_cast<std::uint64_t>(k - 2))
                             : ctx.pow(ctx.inv(base), static_cast<std::uint64_t>(2 - k));
    return {k, e};
  }
};

/// Largest t <= min precision with all recorded a_n and the U_p eigenvalues
/// congruent mod p^t.
inline int congruence_depth(const EigenSystem& x, const EigenSystem& y) {
  require_same_ring(x.ctx, y.ctx);
  if (x.level != y.level || !(x.character == y.character))
    fail(ErrorKind::InvalidArgument, "eigensystems have different level or character");
  const PrimeContext& ctx = x.ctx;
  int t = std::min(x.precision, y.precision);
  t = std::min(t, ctx.valuation(ctx.sub(x.up_eigenvalue, y.up_eigenvalue)));
  const int m = std::min(x.trunc(), y.trunc());
  for (int n = 0; n <= m && t > 0; ++n) t = std::min(t, ctx.valuation(ctx.sub(x.a[n], y.a[n])));
  return t;
}

struct FamilyPair {
  EigenSystem a;
  EigenSystem b;
  int depth;
};

struct FamilyMatch {
  std::vector<FamilyPair> pairs;
  std::vector<EigenSystem> leftover_a;
  std::vector<EigenSystem> leftover_b;

  bool bijective() const { return leftover_a.empty() && leftover_b.empty(); }
};

namespace detail {

inline bool system_less(const EigenSystem& x, const EigenSystem& y) {
  return std::tie(x.a, x.up_eigenvalue, x.precision) < std::tie(y.a, y.up_eigenvalue, y.precision);
}

}  // namespace detail

/// Greedy matching by decreasing depth (depth >= 1 only); ties broken by the
/// lexicographic order of the a_n, so the result does not depend on input order.
inline FamilyMatch family_match(std::vector<EigenSystem> xs, std::vector<EigenSystem> ys) {
  FamilyMatch out;
  if (!xs.empty() && !ys.empty()) {
    const PrimeContext& ctx = xs.front().ctx;
    if ((xs.front().weight - ys.front().weight) % (ctx.p() - 1) != 0)
      fail(ErrorKind::InvalidArgument, "weights are not congruent mod p-1");
  }
  std::sort(xs.begin(), xs.end(), detail::system_less);
  std::sort(ys.begin(), ys.end(), detail::system_less);
  struct Candidate {
    int depth;
    std::size_t i, j;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const int d = congruence_depth(xs[i], ys[j]);
      if (d >= 1) cands.push_back({d, i, j});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& u, const Candidate& v) {
    return std::tie(v.depth, u.i, u.j) < std::tie(u.depth, v.i, v.j);
  });
  std::vector<bool> used_x(xs.size(), false), used_y(ys.size(), false);
  for (const auto& c : cands) {
    if (used_x[c.i] || used_y[c.j]) continue;
    used_x[c.i] = used_y[c.j] = true;
    out.pairs.push_back({xs[c.i], ys[c.j], c.depth});
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const FamilyPair& u, const FamilyPair& v) { return detail::system_less(u.a, v.a); });
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!used_x[i]) out.leftover_a.push_back(xs[i]);
  for (std::size_t j = 0; j < ys.size(); ++j)
    if (!used_y[j]) out.leftover_b.push_back(ys[j]);
  return out;
}

struct SpecializationDepth {
  int weight;
  Residue up_eigenvalue;
  int depth;
};

/// Depth of agreement, away from p, between the certified weight-one form and
/// each higher-weight family member.
inline std::vector<SpecializationDepth> weight_one_specialization_report(const std::vector<EigenSystem>& members,
                                                                         const WeightOneCertificate& cert) {
  std::vector<SpecializationDepth> out;
  const PrimeContext& ctx = cert.f.ctx();
  for (const auto& e : members) {
    require_same_ring(ctx, e.ctx);
    int t = std::min(cert.effective_precision, e.precision);
    const int m = std::min(cert.f.trunc(), e.trunc());
    for (int n = 1; n <= m && t > 0; ++n)
      if (n % ctx.p() != 0) t = std::min(t, ctx.valuation(ctx.sub(cert.f[n], e.a[n])));
    out.push_back({e.weight, e.up_eigenvalue, t});
  }
  return out;
}

}  // namespace pmf
