#pragma once

// Spaces of forms as echelonized coefficient matrices over Z/p^N.
//
// Z/p^N is not a field, so elimination picks, in each column, the entry of
// least p-adic valuation.  A pivot of valuation v costs v digits whenever a
// coordinate is recovered through it; the sum of pivot valuations is carried
// as the basis's precision loss.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pmf/character.hpp"
#include "pmf/error.hpp"
#include "pmf/generators.hpp"
#include "pmf/matrix.hpp"
#include "pmf/qexpansion.hpp"

namespace pmf {

/// Destination of non-fatal diagnostics; defaults to stderr.
inline std::function<void(std::string_view)>& warning_sink() {
  static std::function<void(std::string_view)> sink = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return sink;
}

inline void warn(std::string_view msg) {
  if (warning_sink()) warning_sink()(msg);
}

enum class SourceTag { Ingested, Generated };

struct SpaceDescriptor {
  std::int64_t level;
  int weight;
  DirichletCharacter character;
  SourceTag source = SourceTag::Generated;
  std::optional<int> dim;    // from the external oracle
  std::optional<int> sturm;  // truncation adequacy bound from the external oracle
};

struct Pivot {
  int row;
  int column;
  int valuation;

  friend bool operator==(const Pivot&, const Pivot&) = default;
};

class BasisMatrix {
 public:
  BasisMatrix(const PrimeContext& ctx, int trunc) : ctx_(ctx), trunc_(trunc) {}

  const PrimeContext& ctx() const noexcept { return ctx_; }
  int trunc() const noexcept { return trunc_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  const std::vector<QExpansion>& rows() const noexcept { return rows_; }
  const std::vector<Pivot>& pivots() const noexcept { return pivots_; }
  int precision_loss() const noexcept { return precision_loss_; }
  int effective_precision() const noexcept { return std::max(0, ctx_.nprec() - precision_loss_); }
  const std::optional<SpaceDescriptor>& descriptor() const noexcept { return descriptor_; }

  void set_descriptor(std::optional<SpaceDescriptor> d) { descriptor_ = std::move(d); }

  /// Same basis restricted to coefficients a_0 .. a_t; every pivot must survive.
  BasisMatrix truncated(int t) const {
    if (t > trunc_) fail(ErrorKind::TruncationTooShort, "basis truncation cannot grow");
    for (const auto& pv : pivots_)
      if (pv.column > t)
        fail(ErrorKind::TruncationTooShort, "pivot in column " + std::to_string(pv.column) +
                                                " is lost when truncating to " + std::to_string(t));
    BasisMatrix b = *this;
    b.trunc_ = t;
    for (auto& r : b.rows_) r = r.truncated(t);
    return b;
  }

  friend bool operator==(const BasisMatrix& a, const BasisMatrix& b) {
    return a.ctx_.same_ring(b.ctx_) && a.trunc_ == b.trunc_ && a.rows_ == b.rows_ && a.pivots_ == b.pivots_;
  }

 private:
  PrimeContext ctx_;
  int trunc_;
  std::vector<QExpansion> rows_;
  std::vector<Pivot> pivots_;
  int precision_loss_ = 0;
  std::optional<SpaceDescriptor> descriptor_;

  friend BasisMatrix echelonize(const std::vector<QExpansion>& rows, int threads);
};

/// Row-echelon form with minimal-valuation pivoting; ties go to the lowest row.
/// Pivot rows are scaled so the pivot entry is exactly p^v.
inline BasisMatrix echelonize(const std::vector<QExpansion>& rows, int threads = 1) {
  if (rows.empty()) fail(ErrorKind::InvalidArgument, "echelonize needs at least one row to fix the ring");
  const PrimeContext& ctx = rows.front().ctx();
  const int trunc = rows.front().trunc();
  for (const auto& r : rows) {
    require_same_ring(ctx, r.ctx());
    if (r.trunc() != trunc) fail(ErrorKind::InvalidArgument, "rows must share a truncation");
  }
  std::optional<FormMeta> meta = rows.front().meta();
  for (const auto& r : rows)
    if (!(r.meta() && meta && r.meta()->level == meta->level && r.meta()->weight == meta->weight &&
          r.meta()->character == meta->character))
      meta.reset();
  if (meta)
    for (const auto& r : rows) meta->cuspidal = meta->cuspidal && r.meta()->cuspidal;

  std::vector<std::vector<Residue>> work;
  work.reserve(rows.size());
  for (const auto& r : rows) work.push_back(r.coeffs());

  BasisMatrix out(ctx, trunc);
  std::size_t next = 0;  // rows [0, next) are finished
  const int width = trunc + 1;
  for (int col = 0; col < width && next < work.size(); ++col) {
    std::size_t best = work.size();
    int best_v = ctx.nprec();
    for (std::size_t r = next; r < work.size(); ++r) {
      int v = ctx.valuation(work[r][col]);
      if (v < best_v) {
        best_v = v;
        best = r;
      }
    }
    if (best == work.size()) continue;
    std::rotate(work.begin() + static_cast<std::ptrdiff_t>(next), work.begin() + static_cast<std::ptrdiff_t>(best),
                 work.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    auto& prow = work[next];
    const Residue ppow = ctx.p_power(best_v);
    const Residue unit = prow[col] / ppow;  // exact as integers
    const Residue uinv = ctx.inv(unit);
    for (auto& x : prow) x = ctx.mul(x, uinv);
    prow[col] = ppow;
    parallel_for(work.size() - next - 1, threads, [&](std::size_t k) {
      auto& r = work[next + 1 + k];
      const Residue x = r[col];
      if (x == 0) return;
      const Residue y = x / ppow;
      for (int j = col; j < width; ++j) r[j] = ctx.sub(r[j], ctx.mul(y, prow[j]));
    });
    out.pivots_.push_back({static_cast<int>(next), col, best_v});
    out.precision_loss_ += best_v;
    ++next;
  }
  work.resize(next);
  for (auto& r : work) out.rows_.emplace_back(ctx, std::move(r), meta);
  if (meta) out.descriptor_ = SpaceDescriptor{meta->level, meta->weight, meta->character, SourceTag::Generated, std::nullopt, std::nullopt};
  return out;
}

struct Membership {
  bool member = false;
  std::vector<Residue> coords;  // meaningful when member
  int residual_valuation = 0;   // min valuation of what is left after reduction
  int effective_precision = 0;  // digits to which the coordinates are certified
};

/// Solves f = sum c_i row_i on the basis truncation.
inline Membership membership(const QExpansion& f, const BasisMatrix& b) {
  require_same_ring(f.ctx(), b.ctx());
  if (f.trunc() < b.trunc())
    fail(ErrorKind::TruncationTooShort, "form truncation " + std::to_string(f.trunc()) + " below basis truncation " +
                                            std::to_string(b.trunc()));
  const PrimeContext& ctx = b.ctx();
  std::vector<Residue> r(f.coeffs().begin(), f.coeffs().begin() + b.trunc() + 1);
  Membership m;
  m.coords.assign(b.rank(), 0);
  for (std::size_t i = 0; i < b.rank(); ++i) {
    const Pivot& pv = b.pivots()[i];
    const Residue ppow = ctx.p_power(pv.valuation);
    const Residue x = r[pv.column];
    const Residue c = pv.valuation == 0 ? x : x / ppow;  // leaves x mod p^v behind
    m.coords[i] = c;
    if (c == 0) continue;
    const auto& row = b.rows()[i].coeffs();
    for (int j = pv.column; j <= b.trunc(); ++j) r[j] = ctx.sub(r[j], ctx.mul(c, row[j]));
  }
  int v = ctx.nprec();
  for (Residue x : r) v = std::min(v, ctx.valuation(x));
  m.residual_valuation = v;
  m.effective_precision = b.effective_precision();
  m.member = v >= m.effective_precision;
  if (!m.member) m.coords.clear();
  return m;
}

/// Hecke operators that act on q-expansions of a single character eigenspace.
struct HeckeOperator {
  enum class Kind { Tq, Up, Uq };
  Kind kind;
  std::int64_t q = 0;

  static HeckeOperator T(std::int64_t q) { return {Kind::Tq, q}; }
  static HeckeOperator U(std::int64_t q) { return {Kind::Uq, q}; }
  static HeckeOperator Up() { return {Kind::Up, 0}; }

  QExpansion operator()(const QExpansion& f) const {
    switch (kind) {
      case Kind::Tq: return t_q(f, q);
      case Kind::Uq: return u_q(f, q);
      case Kind::Up: return u_p(f);
    }
    return f;
  }

  std::string name() const {
    switch (kind) {
      case Kind::Tq: return "T" + std::to_string(q);
      case Kind::Uq: return "U" + std::to_string(q);
      case Kind::Up: return "Up";
    }
    return "?";
  }
};

/// Truncation needed before a membership answer is trusted: the oracle's
/// Sturm bound if the descriptor has one, else twice the rank (with a warning).
inline int adequate_truncation(const BasisMatrix& b) {
  if (b.descriptor() && b.descriptor()->sturm) return *b.descriptor()->sturm;
  warn("no Sturm bound recorded for this basis; requiring truncation >= 2*rank = " + std::to_string(2 * b.rank()));
  return static_cast<int>(2 * b.rank());
}

/// Matrix of an operator on the row basis: op(row_i) = sum_j A_ij row_j.
inline Matrix hecke_matrix(const BasisMatrix& b, const HeckeOperator& op, int threads = 1) {
  const std::size_t d = b.rank();
  Matrix a(d, d);
  if (d == 0) return a;
  std::vector<std::optional<QExpansion>> images(d);
  parallel_for(d, threads, [&](std::size_t i) { images[i] = op(b.rows()[i]); });
  int t = b.trunc();
  for (const auto& im : images) t = std::min(t, im->trunc());
  if (t < adequate_truncation(b))
    fail(ErrorKind::TruncationTooShort, op.name() + " image truncation " + std::to_string(t) +
                                            " is below the adequacy bound");
  const BasisMatrix bt = b.truncated(t);
  std::vector<Membership> coords(d);
  parallel_for(d, threads, [&](std::size_t i) { coords[i] = membership(*images[i], bt); });
  for (std::size_t i = 0; i < d; ++i) {
    if (!coords[i].member)
      fail(ErrorKind::NotStable, op.name() + " image of row " + std::to_string(i) +
                                     " leaves the span (residual valuation " +
                                     std::to_string(coords[i].residual_valuation) + ")");
    std::copy(coords[i].coords.begin(), coords[i].coords.end(), a.row(i).begin());
  }
  return a;
}

/// Spanning set of the Eisenstein subspace of M_k(N, chi): E_k(psi, phi)(q^t)
/// over primitive pairs with psi*phi = chi and f_psi f_phi t | N.
inline BasisMatrix generate_eisenstein_space(int k, std::int64_t level, const DirichletCharacter& chi,
                                             const PrimeContext& ctx) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "weight must be >= 1");
  const int sign = (k % 2 == 0) ? 1 : -1;
  if (chi.parity(ctx) != sign) fail(ErrorKind::ParityViolation, "chi(-1) must equal (-1)^k");
  if (level % chi.modulus() != 0 && chi.modulus() != 1)
    fail(ErrorKind::InvalidArgument, "character modulus must divide the level");

  const FormMeta space_meta{level, k, chi};
  std::vector<QExpansion> spanning;
  auto matches_chi = [&](const DirichletCharacter& psi, const DirichletCharacter& phi) {
    for (std::int64_t a = 1; a < level; ++a) {
      if (gcd(a, level) != 1) continue;
      if (ctx.mul(psi(a), phi(a)) != chi(a)) return false;
    }
    return true;
  };
  for (std::int64_t m1 : divisors(level)) {
    for (const auto& psi : DirichletCharacter::all_modulo(m1, ctx)) {
      if (psi.conductor() != m1) continue;
      for (std::int64_t m2 : divisors(level / m1)) {
        for (const auto& phi : DirichletCharacter::all_modulo(m2, ctx)) {
          if (phi.conductor() != m2) continue;
          if (psi.parity(ctx) * phi.parity(ctx) != sign || !matches_chi(psi, phi)) continue;
          QExpansion base = [&] {
            auto c = eisenstein_constant_term(k, psi, phi, ctx);
            if (!c || valuation(*c, ctx.p()) >= 0) return eisenstein_weight_char(k, psi, phi, ctx);
            // rescale so the constant term is 1
            QExpansion e = eisenstein_weight_char(k, psi, phi, ctx, 0);
            QExpansion s = scale(reduce_to_ring(ExactRational(1) / *c, ctx), e);
            std::vector<Residue> coeffs = s.coeffs();
            coeffs[0] = 1;
            return QExpansion(ctx, std::move(coeffs), e.meta());
          }();
          const std::int64_t room = level / (m1 * m2);
          if (k == 2 && m1 == 1 && m2 == 1) {
            // E_2 itself is not modular; E_2(q) - t E_2(q^t) is
            for (std::int64_t t : divisors(room)) {
              if (t == 1) continue;
              spanning.push_back(
                  sub(base, scale(ctx.from_int(t), substitute_power(base, static_cast<int>(t)))).with_meta(space_meta));
            }
            continue;
          }
          for (std::int64_t t : divisors(room))
            spanning.push_back(substitute_power(base, static_cast<int>(t)).with_meta(space_meta));
        }
      }
    }
  }
  if (spanning.empty()) {
    BasisMatrix empty(ctx, ctx.qprec());
    empty.set_descriptor(SpaceDescriptor{level, k, chi, SourceTag::Generated, std::nullopt, std::nullopt});
    return empty;
  }
  BasisMatrix b = echelonize(spanning);
  b.set_descriptor(SpaceDescriptor{level, k, chi, SourceTag::Generated, std::nullopt, std::nullopt});
  return b;
}

}  // namespace pmf
