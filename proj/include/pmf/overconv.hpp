#pragma once

// Overconvergent forms at the level of q-expansions.
//
// A Katz basis of weight k and depth J consists of layers w/E^j, j = 0..J,
// where w runs over a complement of E * S_{k+(j-1)(p-1)} inside
// S_{k+j(p-1)}.  U_p acts on the span up to terms divisible by p^N once J is
// deep enough, which the NotStable check in the U_p matrix verifies.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pmf/error.hpp"
#include "pmf/generators.hpp"
#include "pmf/matrix.hpp"
#include "pmf/qexpansion.hpp"
#include "pmf/spaces.hpp"

namespace pmf {

/// Depth heuristic ceil(N (p+1)/(p-1)) + 1.
inline int katz_min_depth(const PrimeContext& ctx) {
  const std::int64_t num = static_cast<std::int64_t>(ctx.nprec()) * (ctx.p() + 1);
  const std::int64_t den = ctx.p() - 1;
  return static_cast<int>((num + den - 1) / den) + 1;
}

struct KatzBasis {
  PrimeContext ctx;
  int weight;
  std::int64_t level;
  DirichletCharacter character;
  int depth;
  std::vector<std::vector<QExpansion>> layers;
  BasisMatrix flat;

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.size();
    return n;
  }
};

namespace detail {

/// Incremental row echelon form over F_p used to pick complements.
class ModPEchelon {
 public:
  ModPEchelon(std::int64_t p, std::size_t width) : p_(p), width_(width) {}

  /// Adds the reduction of v mod p if it is independent; returns whether it was.
  bool add(const std::vector<Residue>& v) {
    std::vector<std::int64_t> r(width_);
    for (std::size_t j = 0; j < width_; ++j) r[j] = static_cast<std::int64_t>(v[j] % static_cast<Residue>(p_));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const std::int64_t c = r[pivots_[i]];
      if (c == 0) continue;
      for (std::size_t j = 0; j < width_; ++j) r[j] = ((r[j] - c * rows_[i][j]) % p_ + p_) % p_;
    }
    auto it = std::find_if(r.begin(), r.end(), [](std::int64_t x) { return x != 0; });
    if (it == r.end()) return false;
    const auto col = static_cast<std::size_t>(it - r.begin());
    const std::int64_t inv = inverse(r[col]);
    for (auto& x : r) x = x * inv % p_;
    rows_.push_back(std::move(r));
    pivots_.push_back(col);
    return true;
  }

  std::size_t rank() const noexcept { return rows_.size(); }

 private:
  std::int64_t inverse(std::int64_t a) const {
    std::int64_t r = 1, e = p_ - 2, b = a;
    while (e > 0) {
      if (e & 1) r = r * b % p_;
      b = b * b % p_;
      e >>= 1;
    }
    return r;
  }

  std::int64_t p_;
  std::size_t width_;
  std::vector<std::vector<std::int64_t>> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace detail

/// Rank of a matrix over F_p.
inline std::size_t rank_mod_p(const Matrix& a, const PrimeContext& ctx) {
  detail::ModPEchelon ech(ctx.p(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) ech.add(std::vector<Residue>(a.row(i).begin(), a.row(i).end()));
  return ech.rank();
}

/// Builds layers from classical sources of weights k + j(p-1), j = 0..depth.
inline KatzBasis build_katz_basis(int k, std::int64_t level, const DirichletCharacter& chi,
                                  const std::vector<BasisMatrix>& sources, int depth, const PrimeContext& ctx,
                                  int threads = 1) {
  if (depth < 0) fail(ErrorKind::InvalidArgument, "Katz depth must be non-negative");
  const int step = static_cast<int>(ctx.p() - 1);
  if (sources.size() < static_cast<std::size_t>(depth) + 1)
    fail(ErrorKind::MissingSource, "no classical source for weight " +
                                       std::to_string(k + static_cast<int>(sources.size()) * step));
  int trunc = ctx.qprec();
  for (int j = 0; j <= depth; ++j) {
    require_same_ring(ctx, sources[j].ctx());
    trunc = std::min(trunc, sources[j].trunc());
    if (sources[j].rank() == 0 && j == 0) continue;
    const auto& d = sources[j].descriptor();
    if (d && (d->weight != k + j * step || d->level != level))
      fail(ErrorKind::MissingSource, "source " + std::to_string(j) + " has weight " + std::to_string(d->weight) +
                                         ", expected " + std::to_string(k + j * step));
  }
  const PrimeContext work = ctx.with_qprec(trunc);
  const QExpansion e = eisenstein_E(work);
  const QExpansion e_inv = invert(e).with_meta(std::nullopt);
  const FormMeta meta{level, k, chi, true};

  KatzBasis kb{ctx, k, level, chi, depth, {}, BasisMatrix(ctx, trunc)};
  QExpansion e_inv_power = QExpansion::constant(work, 1, trunc);
  for (int j = 0; j <= depth; ++j) {
    const BasisMatrix src = sources[j].truncated(trunc);
    std::vector<QExpansion> chosen;
    if (j == 0) {
      chosen = src.rows();
    } else {
      const BasisMatrix prev = sources[j - 1].truncated(trunc);
      detail::ModPEchelon ech(ctx.p(), static_cast<std::size_t>(trunc) + 1);
      std::vector<QExpansion> lifted(prev.rank(), QExpansion(work, trunc));
      parallel_for(prev.rank(), threads, [&](std::size_t i) {
        lifted[i] = QExpansion(work, detail::cauchy(work, e.coeffs(), prev.rows()[i].coeffs(), trunc));
      });
      for (std::size_t i = 0; i < lifted.size(); ++i) {
        Membership m = membership(lifted[i], src);
        if (!m.member)
          fail(ErrorKind::RankDeficiency, "E times a weight-" + std::to_string(k + (j - 1) * step) +
                                              " form is not in the weight-" + std::to_string(k + j * step) +
                                              " source");
        ech.add(lifted[i].coeffs());
      }
      if (ech.rank() != prev.rank())
        fail(ErrorKind::RankDeficiency, "E times the weight-" + std::to_string(k + (j - 1) * step) +
                                            " source is not saturated mod p");
      for (const auto& row : src.rows())
        if (ech.add(row.coeffs())) chosen.push_back(row);
      if (ech.rank() != src.rank())
        fail(ErrorKind::RankDeficiency, "weight-" + std::to_string(k + j * step) +
                                            " source has mod-p rank below its dimension");
      e_inv_power = QExpansion(work, detail::cauchy(work, e_inv_power.coeffs(), e_inv.coeffs(), trunc));
    }
    std::vector<QExpansion> layer(chosen.size(), QExpansion(work, trunc));
    parallel_for(chosen.size(), threads, [&](std::size_t i) {
      layer[i] = QExpansion(ctx, detail::cauchy(work, chosen[i].coeffs(), e_inv_power.coeffs(), trunc), meta);
    });
    kb.layers.push_back(std::move(layer));
  }
  std::vector<QExpansion> all;
  for (const auto& l : kb.layers) all.insert(all.end(), l.begin(), l.end());
  if (all.empty()) {
    kb.flat.set_descriptor(SpaceDescriptor{level, k, chi, SourceTag::Generated, 0, std::nullopt});
    return kb;
  }
  kb.flat = echelonize(all, threads);
  if (kb.flat.rank() != all.size())
    fail(ErrorKind::RankDeficiency, "Katz layers are dependent: rank " + std::to_string(kb.flat.rank()) + " < " +
                                        std::to_string(all.size()));
  std::optional<int> sturm;
  if (const auto& top = sources[depth].descriptor(); top && top->sturm) sturm = top->sturm;
  kb.flat.set_descriptor(SpaceDescriptor{level, k, chi, SourceTag::Generated, static_cast<int>(all.size()), sturm});
  return kb;
}

/// Matrix of U_p on the echelonized Katz basis.
inline Matrix up_matrix(const KatzBasis& kb, int threads = 1) {
  return hecke_matrix(kb.flat, HeckeOperator::Up(), threads);
}

struct OrdinaryProjector {
  Matrix e_matrix;
  int stabilization_exponent = 0;  // r with e = A^{r!}; 0 when e came from the Fitting split
  std::size_t rank = 0;
  std::optional<BasisMatrix> image_basis;
};

inline std::uint64_t projector_iteration_bound(const PrimeContext& ctx) {
  return static_cast<std::uint64_t>(ctx.nprec()) * static_cast<std::uint64_t>(ctx.p() - 1) * ctx.modulus();
}

/// Idempotent of the Fitting decomposition of A: the projection onto the part
/// where A is invertible along the part where it is nilpotent mod p.  This is
/// the limit of A^{r!}.
inline Matrix fitting_idempotent(const Matrix& a, const PrimeContext& ctx, int threads = 1) {
  const std::size_t m = a.rows();
  const Matrix b = matrix_power(a, m * static_cast<std::uint64_t>(ctx.nprec()), ctx, threads);
  Matrix rows = b;
  auto piv = detail::unit_rref(rows, ctx);
  auto kernel = left_kernel(b, ctx);
  if (!kernel || piv.size() + kernel->rows() != m)
    fail(ErrorKind::NoStabilization, "powers of U_p do not split off a free unit part");
  Matrix s(m, m);
  for (std::size_t i = 0; i < piv.size(); ++i) std::copy(rows.row(i).begin(), rows.row(i).end(), s.row(i).begin());
  for (std::size_t i = 0; i < kernel->rows(); ++i)
    std::copy(kernel->row(i).begin(), kernel->row(i).end(), s.row(piv.size() + i).begin());
  const Matrix s_inv = inverse(s, ctx);
  Matrix d(m, m);
  for (std::size_t i = 0; i < piv.size(); ++i) d(i, i) = 1 % ctx.modulus();
  return multiply(multiply(s_inv, d, ctx, threads), s, ctx, threads);
}

/// e = lim A^{r!}: C_1 = A, C_{r+1} = C_r^{r+1}, stopping at the first r for
/// which C_r is idempotent.  Past `factorial_cap` iterations the limit is
/// taken from the Fitting decomposition instead.
inline OrdinaryProjector ordinary_projector(const Matrix& a, const PrimeContext& ctx, int threads = 1,
                                            std::uint64_t factorial_cap = 40) {
  if (!a.square()) fail(ErrorKind::InvalidArgument, "U_p matrix must be square");
  OrdinaryProjector out;
  if (a.rows() == 0) return out;
  const std::uint64_t rmax = std::min(projector_iteration_bound(ctx), factorial_cap);
  Matrix c = a;
  for (std::uint64_t r = 1; r <= rmax; ++r) {
    if (multiply(c, c, ctx, threads) == c) {
      out.e_matrix = std::move(c);
      out.stabilization_exponent = static_cast<int>(r);
      break;
    }
    if (r < rmax) c = matrix_power(c, r + 1, ctx, threads);
  }
  if (out.stabilization_exponent == 0) {
    out.e_matrix = fitting_idempotent(a, ctx, threads);
    if (multiply(out.e_matrix, out.e_matrix, ctx, threads) != out.e_matrix ||
        multiply(out.e_matrix, a, ctx, threads) != multiply(a, out.e_matrix, ctx, threads))
      fail(ErrorKind::NoStabilization, "Fitting idempotent failed verification");
  }
  out.rank = rank_mod_p(out.e_matrix, ctx);
  return out;
}

namespace detail {

inline QExpansion combine_rows(const BasisMatrix& b, const std::vector<Residue>& coords) {
  const PrimeContext& ctx = b.ctx();
  std::vector<unsigned __int128> acc(static_cast<std::size_t>(b.trunc()) + 1, 0);
  int pending = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] == 0) continue;
    const auto& row = b.rows()[i].coeffs();
    for (std::size_t n = 0; n < acc.size(); ++n) acc[n] += static_cast<unsigned __int128>(coords[i]) * row[n];
    if (++pending == 7) {
      for (auto& x : acc) x %= ctx.modulus();
      pending = 0;
    }
  }
  std::vector<Residue> out(acc.size());
  for (std::size_t n = 0; n < acc.size(); ++n) out[n] = static_cast<Residue>(acc[n] % ctx.modulus());
  std::optional<FormMeta> meta;
  if (!b.rows().empty()) meta = b.rows().front().meta();
  if (meta && out[0] != 0) meta->cuspidal = false;
  return QExpansion(ctx, std::move(out), meta);
}

}  // namespace detail

/// Fills in the q-expansions spanning the image of e.
inline OrdinaryProjector attach_image(OrdinaryProjector out, const KatzBasis& kb, int threads = 1) {
  out.image_basis.reset();
  if (out.e_matrix.rows() == 0) return out;
  std::vector<QExpansion> images;
  for (std::size_t i = 0; i < out.e_matrix.rows(); ++i) {
    std::vector<Residue> coords(out.e_matrix.row(i).begin(), out.e_matrix.row(i).end());
    QExpansion f = detail::combine_rows(kb.flat, coords);
    if (!f.is_zero()) images.push_back(std::move(f));
  }
  if (!images.empty()) {
    BasisMatrix img = echelonize(images, threads);
    img.set_descriptor(kb.flat.descriptor());
    out.image_basis = std::move(img);
  }
  return out;
}

/// Projector plus the q-expansions spanning its image.
inline OrdinaryProjector ordinary_projector(const KatzBasis& kb, const Matrix& a, int threads = 1) {
  return attach_image(ordinary_projector(a, kb.ctx, threads), kb, threads);
}

/// e applied to a form in the span of the Katz basis.
inline QExpansion ordinary_projection_of_form(const QExpansion& f, const KatzBasis& kb, const OrdinaryProjector& proj) {
  Membership m = membership(f, kb.flat);
  if (!m.member)
    fail(ErrorKind::NotInSpan, "form is not in the Katz span (residual valuation " +
                                   std::to_string(m.residual_valuation) + ")");
  std::vector<Residue> c = vec_mul(m.coords, proj.e_matrix, kb.ctx);
  return detail::combine_rows(kb.flat, c);
}

/// Normalized Hecke eigenvalue data with a_1 = 1.
struct EigenSystem {
  PrimeContext ctx;
  int weight;
  std::int64_t level;
  DirichletCharacter character;
  Residue up_eigenvalue = 0;
  std::vector<Residue> a;  // a_0 .. a_M
  int precision = 0;       // digits to which a_n and up_eigenvalue are certified

  int trunc() const noexcept { return static_cast<int>(a.size()) - 1; }

  QExpansion qexpansion() const {
    return QExpansion(ctx, a, FormMeta{level, weight, character, a.empty() || a[0] == 0});
  }

  /// Normalizes a form by its a_1; fails with NotUnit if a_1 is not a unit.
  static EigenSystem from_form(const QExpansion& f, Residue up, int precision) {
    if (!f.meta()) fail(ErrorKind::MissingMetadata, "eigensystem needs level, weight and character");
    if (f.trunc() < 1) fail(ErrorKind::TruncationTooShort, "eigensystem needs a_1");
    const PrimeContext& ctx = f.ctx();
    if (!ctx.is_unit(f[1])) fail(ErrorKind::NotUnit, "a_1 is not a unit");
    QExpansion g = scale(ctx.inv(f[1]), f);
    return EigenSystem{ctx, f.meta()->weight, f.meta()->level, f.meta()->character, up, g.coeffs(), precision};
  }

  friend bool operator==(const EigenSystem& x, const EigenSystem& y) {
    return x.ctx.same_ring(y.ctx) && x.weight == y.weight && x.level == y.level && x.character == y.character &&
           x.up_eigenvalue == y.up_eigenvalue && x.a == y.a && x.precision == y.precision;
  }
};

struct EigenExtraction {
  std::vector<EigenSystem> systems;
  std::vector<std::string> diagnostics;  // skipped blocks and their reasons
  Matrix restricted;                     // U_p on the image of e
  std::vector<Residue> charpoly;         // of the restriction, constant term first
};

/// Hensel lift of a simple root of a polynomial mod p to Z/p^N.
inline Residue hensel_lift(std::span<const Residue> poly, Residue root, const PrimeContext& ctx) {
  const auto deriv = poly_derivative(poly, ctx);
  const Residue d = poly_eval(deriv, root, ctx);
  if (!ctx.is_unit(d)) fail(ErrorKind::NotUnit, "root is not simple mod p");
  Residue x = root;
  for (int i = 0; i <= ctx.nprec(); ++i) {
    const Residue fx = poly_eval(poly, x, ctx);
    if (fx == 0) break;
    x = ctx.sub(x, ctx.mul(fx, ctx.inv(poly_eval(deriv, x, ctx))));
  }
  return x;
}

namespace detail {

/// Multiplicity of r as a root of a polynomial over F_p (constant term first).
inline int root_multiplicity(std::vector<Residue> poly, Residue r, const PrimeContext& field) {
  int mult = 0;
  while (poly.size() > 1) {
    // synthetic division by (X - r), highest coefficient first
    std::vector<Residue> q(poly.size() - 1);
    Residue carry = 0;
    for (std::size_t i = poly.size(); i-- > 0;) {
      const Residue v = field.add(poly[i], field.mul(carry, r));
      if (i == 0) {
        if (v != 0) return mult;
      } else {
        q[i - 1] = v;
      }
      carry = v;
    }
    ++mult;
    poly = std::move(q);
  }
  return mult;
}

}  // namespace detail

namespace detail {

/// Generators of the lines cut out by simple residual roots of r's
/// characteristic polynomial.
inline std::vector<std::vector<Residue>> simple_eigenvectors(const Matrix& r, const PrimeContext& ctx) {
  const PrimeContext field(ctx.p(), 1, 1);
  const auto p = static_cast<Residue>(ctx.p());
  const auto poly = charpoly(r, ctx);
  std::vector<Residue> poly_p = poly;
  for (auto& c : poly_p) c %= p;
  const auto deriv_p = poly_derivative(poly_p, field);
  std::vector<std::vector<Residue>> out;
  for (Residue root = 0; root < p; ++root) {
    if (poly_eval(poly_p, root, field) != 0 || poly_eval(deriv_p, root, field) == 0) continue;
    const Residue lambda = hensel_lift(poly, root, ctx);
    Matrix shifted = r;
    for (std::size_t i = 0; i < r.rows(); ++i) shifted(i, i) = ctx.sub(shifted(i, i), lambda);
    auto basis = left_kernel(shifted, ctx);
    if (basis && basis->rows() == 1) out.emplace_back(basis->row(0).begin(), basis->row(0).end());
  }
  return out;
}

/// The eigenvalue of `up` on v, if v is an eigenvector.
inline std::optional<Residue> eigenvalue_of(const std::vector<Residue>& v, const Matrix& up, const PrimeContext& ctx) {
  const auto unit_at = static_cast<std::size_t>(
      std::find_if(v.begin(), v.end(), [&](Residue x) { return ctx.is_unit(x); }) - v.begin());
  if (unit_at == v.size()) return std::nullopt;
  const auto image = vec_mul(v, up, ctx);
  const Residue lambda = ctx.mul(image[unit_at], ctx.inv(v[unit_at]));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (image[i] != ctx.mul(lambda, v[i])) return std::nullopt;
  return lambda;
}

inline BasisMatrix vector_basis(const Matrix& rows, const PrimeContext& ctx) {
  std::vector<QExpansion> qs;
  for (std::size_t i = 0; i < rows.rows(); ++i) qs.emplace_back(ctx, std::vector<Residue>(rows.row(i).begin(), rows.row(i).end()));
  return echelonize(qs);
}

/// Matrix of `op` on the row space of `sub`, which must be op-stable.
inline Matrix restrict_to(const BasisMatrix& sub, const Matrix& op, const PrimeContext& ctx) {
  const std::size_t k = sub.rank();
  Matrix r(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    Membership mem = membership(QExpansion(ctx, vec_mul(sub.rows()[i].coeffs(), op, ctx)), sub);
    if (!mem.member) fail(ErrorKind::NotStable, "operator does not preserve the subspace");
    std::copy(mem.coords.begin(), mem.coords.end(), r.row(i).begin());
  }
  return r;
}

/// Adds the system with coordinates v (in the image basis) unless it is a
/// duplicate, has a non-unit U_p eigenvalue, or a non-unit a_1.
inline void admit(const std::vector<Residue>& v, const Matrix& up, const BasisMatrix& img, int precision,
                  std::vector<EigenSystem>& systems, std::vector<std::string>& notes, const std::string& origin) {
  const PrimeContext& ctx = img.ctx();
  auto lambda = eigenvalue_of(v, up, ctx);
  if (!lambda || !ctx.is_unit(*lambda)) return;
  QExpansion f = combine_rows(img, v);
  if (f.trunc() < 1 || !ctx.is_unit(f[1])) {
    notes.push_back("NonUnitA1: " + origin + " eigenvector with U_p eigenvalue " + std::to_string(*lambda) +
                    " has non-unit a_1");
    return;
  }
  EigenSystem es = EigenSystem::from_form(f, *lambda, precision);
  if (std::find(systems.begin(), systems.end(), es) == systems.end()) systems.push_back(std::move(es));
}

inline void sort_systems(std::vector<EigenSystem>& systems) {
  std::sort(systems.begin(), systems.end(), [](const EigenSystem& x, const EigenSystem& y) {
    return std::tie(x.up_eigenvalue, x.a) < std::tie(y.up_eigenvalue, y.a);
  });
}

struct ImageOperators {
  Matrix up;
  std::vector<std::pair<HeckeOperator, Matrix>> hecke;
  int precision;
};

inline ImageOperators image_operators(const OrdinaryProjector& proj, const KatzBasis& kb,
                                      const std::vector<HeckeOperator>& ops, int threads) {
  const BasisMatrix& img = *proj.image_basis;
  ImageOperators out{hecke_matrix(img, HeckeOperator::Up(), threads), {},
                     std::max(0, kb.ctx.nprec() - kb.flat.precision_loss() - img.precision_loss())};
  for (const auto& op : ops) out.hecke.emplace_back(op, hecke_matrix(img, op, threads));
  return out;
}

}  // namespace detail

/// Ordinary eigensystems.  U_p and then each supplied Hecke operator act on
/// the q-expansions spanning image(e); every simple root of a characteristic
/// polynomial mod p is Hensel lifted and cuts out a line, whose generator is
/// kept when it is a U_p eigenvector with unit eigenvalue and unit a_1.
/// Hecke operators only serve to split residual U_p eigenvalues that repeat.
inline EigenExtraction ordinary_eigensystems(const OrdinaryProjector& proj, const KatzBasis& kb,
                                             const std::vector<HeckeOperator>& ops = {}, int threads = 1) {
  EigenExtraction out;
  const PrimeContext& ctx = kb.ctx;
  if (proj.rank == 0 || !proj.image_basis) return out;
  const BasisMatrix& img = *proj.image_basis;
  const std::size_t m = img.rank();
  const auto mats = detail::image_operators(proj, kb, ops, threads);
  out.restricted = mats.up;
  out.charpoly = charpoly(out.restricted, ctx);

  std::vector<std::string> notes;
  for (const auto& v : detail::simple_eigenvectors(mats.up, ctx))
    detail::admit(v, mats.up, img, mats.precision, out.systems, notes, "Up");
  for (const auto& [op, r] : mats.hecke)
    for (const auto& v : detail::simple_eigenvectors(r, ctx))
      detail::admit(v, mats.up, img, mats.precision, out.systems, notes, op.name());
  detail::sort_systems(out.systems);

  const PrimeContext field(ctx.p(), 1, 1);
  const auto p = static_cast<Residue>(ctx.p());
  std::vector<Residue> up_p = out.charpoly;
  for (auto& c : up_p) c %= p;
  std::size_t accounted = detail::root_multiplicity(up_p, 0, field);
  for (Residue root = 1; root < p; ++root) {
    const int mult = detail::root_multiplicity(up_p, root, field);
    if (mult == 0) continue;
    accounted += static_cast<std::size_t>(mult);
    const auto found = static_cast<int>(std::count_if(out.systems.begin(), out.systems.end(),
                                                      [&](const EigenSystem& s) { return s.up_eigenvalue % p == root; }));
    if (mult > 1 && found < mult)
      out.diagnostics.push_back("RepeatedResidualEigenvalue: U_p eigenvalue " + std::to_string(root) +
                                " mod p has multiplicity " + std::to_string(mult) + ", " + std::to_string(found) +
                                " eigensystem(s) separated");
  }
  if (accounted < m)
    out.diagnostics.push_back("U_p characteristic polynomial on the ordinary image has " +
                              std::to_string(m - accounted) + " eigenvalue(s) outside F_p");
  out.diagnostics.insert(out.diagnostics.end(), notes.begin(), notes.end());
  return out;
}

/// Ordinary eigensystems whose T_q eigenvalues equal `values` (one per
/// operator in `ops`).  The joint eigenspace is cut out exactly over Z/p^N,
/// so systems congruent mod p but distinct p-adically are told apart; U_p is
/// then split on that subspace.  This finds the companion of a known system.
inline std::vector<EigenSystem> ordinary_eigensystems_with_hecke_data(const OrdinaryProjector& proj,
                                                                     const KatzBasis& kb,
                                                                     const std::vector<HeckeOperator>& ops,
                                                                     const std::vector<Residue>& values,
                                                                     int threads = 1) {
  if (ops.size() != values.size()) fail(ErrorKind::InvalidArgument, "one eigenvalue per Hecke operator is needed");
  std::vector<EigenSystem> systems;
  if (proj.rank == 0 || !proj.image_basis || ops.empty()) return systems;
  const PrimeContext& ctx = kb.ctx;
  const BasisMatrix& img = *proj.image_basis;
  const std::size_t m = img.rank();
  const auto mats = detail::image_operators(proj, kb, ops, threads);
  Matrix stacked(m, m * ops.size());
  for (std::size_t o = 0; o < ops.size(); ++o)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        stacked(i, o * m + j) = ctx.sub(mats.hecke[o].second(i, j), i == j ? values[o] % ctx.modulus() : 0);
  const Matrix kernel = smith_left_kernel(stacked, ctx);
  if (kernel.rows() == 0) return systems;
  const BasisMatrix sub = detail::vector_basis(kernel, ctx);
  const Matrix up_sub = detail::restrict_to(sub, mats.up, ctx);
  std::vector<std::string> notes;
  for (const auto& w : detail::simple_eigenvectors(up_sub, ctx)) {
    std::vector<Residue> v(m, 0);
    for (std::size_t i = 0; i < sub.rank(); ++i) {
      const auto& row = sub.rows()[i].coeffs();
      for (std::size_t j = 0; j < m; ++j) v[j] = ctx.add(v[j], ctx.mul(w[i], row[j]));
    }
    detail::admit(v, mats.up, img, mats.precision, systems, notes, "joint");
  }
  detail::sort_systems(systems);
  return systems;
}

}  // namespace pmf
