#pragma once

// Dense matrices over Z/p^N.  Parallel kernels split work by output rows, so
// every entry is computed by exactly one thread in a fixed order and results
// are bit-identical for any thread count.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "pmf/error.hpp"
#include "pmf/ring.hpp"

namespace pmf {

/// Runs body(i) for i in [0, n) on up to `threads` workers with a static partition.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
}

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<Residue>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) fail(ErrorKind::InvalidArgument, "ragged matrix rows");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  Residue& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  Residue operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Residue> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const Residue> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<Residue>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Residue> data_;
};

inline Matrix multiply(const Matrix& a, const Matrix& b, const PrimeContext& ctx, int threads = 1) {
  if (a.cols() != b.rows()) fail(ErrorKind::InvalidArgument, "matrix shapes do not compose");
  Matrix c(a.rows(), b.cols());
  const Residue m = ctx.modulus();
  const unsigned __int128 bound = static_cast<unsigned __int128>(m - 1) * (m - 1) * (a.cols() + 1);
  if (bound < (static_cast<unsigned __int128>(1) << 64)) {
    parallel_for(a.rows(), threads, [&](std::size_t i) {
      std::vector<std::uint64_t> acc(b.cols(), 0);
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const std::uint64_t aik = a(i, k);
        if (aik == 0) continue;
        const Residue* brow = b.row(k).data();
        for (std::size_t j = 0; j < b.cols(); ++j) acc[j] += aik * brow[j];
      }
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = acc[j] % m;
    });
    return c;
  }
  parallel_for(a.rows(), threads, [&](std::size_t i) {
    std::vector<unsigned __int128> acc(b.cols(), 0);
    int pending = 0;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Residue aik = a(i, k);
      if (aik == 0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) acc[j] += static_cast<unsigned __int128>(aik) * brow[j];
      if (++pending == 7) {
        for (auto& x : acc) x %= m;
        pending = 0;
      }
    }
    for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = static_cast<Residue>(acc[j] % m);
  });
  return c;
}

inline Matrix matrix_power(Matrix a, std::uint64_t e, const PrimeContext& ctx, int threads = 1) {
  if (!a.square()) fail(ErrorKind::InvalidArgument, "power of a non-square matrix");
  Matrix result = Matrix::identity(a.rows());
  while (e > 0) {
    if (e & 1) result = multiply(result, a, ctx, threads);
    e >>= 1;
    if (e > 0) a = multiply(a, a, ctx, threads);
  }
  return result;
}

inline Matrix subtract(const Matrix& a, const Matrix& b, const PrimeContext& ctx) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorKind::InvalidArgument, "shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = ctx.sub(a(i, j), b(i, j));
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

/// Row vector times matrix.
inline std::vector<Residue> vec_mul(std::span<const Residue> v, const Matrix& a, const PrimeContext& ctx) {
  if (v.size() != a.rows()) fail(ErrorKind::InvalidArgument, "vector length does not match matrix");
  std::vector<Residue> out(a.cols(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] = ctx.add(out[j], ctx.mul(v[i], a(i, j)));
  }
  return out;
}

namespace detail {

/// Gauss-Jordan with unit pivots only.  Returns the pivot columns; rows past
/// them are those the elimination could not clear with a unit.
inline std::vector<std::size_t> unit_rref(Matrix& b, const PrimeContext& ctx) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < b.cols() && row < b.rows(); ++col) {
    std::size_t sel = b.rows();
    for (std::size_t r = row; r < b.rows(); ++r)
      if (ctx.is_unit(b(r, col))) {
        sel = r;
        break;
      }
    if (sel == b.rows()) continue;
    for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(row, j), b(sel, j));
    const Residue inv = ctx.inv(b(row, col));
    for (std::size_t j = 0; j < b.cols(); ++j) b(row, j) = ctx.mul(b(row, j), inv);
    for (std::size_t r = 0; r < b.rows(); ++r) {
      if (r == row || b(r, col) == 0) continue;
      const Residue f = b(r, col);
      for (std::size_t j = 0; j < b.cols(); ++j) b(r, j) = ctx.sub(b(r, j), ctx.mul(f, b(row, j)));
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace detail

/// Inverse over Z/p^N; the matrix must be invertible mod p.
inline Matrix inverse(const Matrix& a, const PrimeContext& ctx) {
  if (!a.square()) fail(ErrorKind::InvalidArgument, "inverse of a non-square matrix");
  const std::size_t n = a.rows();
  Matrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1 % ctx.modulus();
  }
  auto piv = detail::unit_rref(aug, ctx);
  if (piv.size() < n || (n > 0 && piv[n - 1] != n - 1)) fail(ErrorKind::NotUnit, "matrix is singular mod p");
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

/// Basis of {v : v a = 0} when every elementary divisor of a is a unit or 0,
/// so the kernel is a free direct summand; nullopt otherwise.
inline std::optional<Matrix> left_kernel(const Matrix& a, const PrimeContext& ctx) {
  Matrix t = transpose(a);
  auto piv = detail::unit_rref(t, ctx);
  for (std::size_t r = piv.size(); r < t.rows(); ++r)
    for (std::size_t j = 0; j < t.cols(); ++j)
      if (t(r, j) != 0) return std::nullopt;
  std::vector<bool> is_pivot(t.cols(), false);
  for (auto c : piv) is_pivot[c] = true;
  Matrix k(t.cols() - piv.size(), t.cols());
  std::size_t out = 0;
  for (std::size_t free = 0; free < t.cols(); ++free) {
    if (is_pivot[free]) continue;
    k(out, free) = 1 % ctx.modulus();
    for (std::size_t i = 0; i < piv.size(); ++i) k(out, piv[i]) = ctx.neg(t(i, free));
    ++out;
  }
  return k;
}

/// Free part of {v : v a = 0}: the rows of the left transform in a Smith
/// form of `a` whose diagonal entry vanishes.  Solutions that only exist
/// because some elementary divisor is a positive power of p are dropped.
inline Matrix smith_left_kernel(Matrix a, const PrimeContext& ctx) {
  const std::size_t m = a.rows(), n = a.cols();
  Matrix u = Matrix::identity(m);
  for (std::size_t i = 0; i < m; ++i) u(i, i) = 1 % ctx.modulus();
  std::size_t t = 0;
  for (; t < std::min(m, n); ++t) {
    std::size_t bi = m, bj = n;
    int best = ctx.nprec();
    for (std::size_t i = t; i < m && best > 0; ++i)
      for (std::size_t j = t; j < n; ++j) {
        const int v = ctx.valuation(a(i, j));
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
          if (v == 0) break;
        }
      }
    if (bi == m) break;
    for (std::size_t j = 0; j < n; ++j) std::swap(a(t, j), a(bi, j));
    for (std::size_t j = 0; j < m; ++j) std::swap(u(t, j), u(bi, j));
    for (std::size_t i = 0; i < m; ++i) std::swap(a(i, t), a(i, bj));
    const Residue ppow = ctx.p_power(best);
    const Residue uinv = ctx.inv(a(t, t) / ppow);
    for (std::size_t j = 0; j < n; ++j) a(t, j) = ctx.mul(a(t, j), uinv);
    for (std::size_t j = 0; j < m; ++j) u(t, j) = ctx.mul(u(t, j), uinv);
    for (std::size_t i = t + 1; i < m; ++i) {
      if (a(i, t) == 0) continue;
      const Residue f = a(i, t) / ppow;
      for (std::size_t j = 0; j < n; ++j) a(i, j) = ctx.sub(a(i, j), ctx.mul(f, a(t, j)));
      for (std::size_t j = 0; j < m; ++j) u(i, j) = ctx.sub(u(i, j), ctx.mul(f, u(t, j)));
    }
    // column operations clear the rest of row t; they do not affect the kernel
    for (std::size_t j = t + 1; j < n; ++j) {
      if (a(t, j) == 0) continue;
      const Residue f = a(t, j) / ppow;
      for (std::size_t i = t; i < m; ++i) a(i, j) = ctx.sub(a(i, j), ctx.mul(f, a(i, t)));
    }
  }
  Matrix k(m - t, m);
  for (std::size_t i = t; i < m; ++i) std::copy(u.row(i).begin(), u.row(i).end(), k.row(i - t).begin());
  return k;
}

/// Characteristic polynomial det(xI - A), coefficients from the constant term
/// up.  Berkowitz's algorithm: division free, so it is exact over Z/p^N.
inline std::vector<Residue> charpoly(const Matrix& a, const PrimeContext& ctx) {
  if (!a.square()) fail(ErrorKind::InvalidArgument, "characteristic polynomial of a non-square matrix");
  const std::size_t n = a.rows();
  const Residue one = 1 % ctx.modulus();
  if (n == 0) return {one};
  // vector of the characteristic polynomial of the leading r x r block, highest degree first
  std::vector<Residue> poly = {one, ctx.neg(a(0, 0))};
  for (std::size_t r = 1; r < n; ++r) {
    // A_r = [[M, col], [row, a_rr]], M the leading r x r block
    std::vector<Residue> row(a.row(r).begin(), a.row(r).begin() + static_cast<std::ptrdiff_t>(r));
    std::vector<Residue> col(r);
    for (std::size_t i = 0; i < r; ++i) col[i] = a(i, r);
    // Toeplitz column: 1, -a_rr, -row*col, -row*M*col, ...
    std::vector<Residue> t(r + 2);
    t[0] = one;
    t[1] = ctx.neg(a(r, r));
    std::vector<Residue> v = col;
    for (std::size_t k = 2; k < r + 2; ++k) {
      Residue dot = 0;
      for (std::size_t i = 0; i < r; ++i) dot = ctx.add(dot, ctx.mul(row[i], v[i]));
      t[k] = ctx.neg(dot);
      std::vector<Residue> next(r, 0);
      for (std::size_t i = 0; i < r; ++i) {
        Residue s = 0;
        for (std::size_t j = 0; j < r; ++j) s = ctx.add(s, ctx.mul(a(i, j), v[j]));
        next[i] = s;
      }
      v = std::move(next);
    }
    std::vector<Residue> out(r + 2, 0);
    for (std::size_t i = 0; i < r + 2; ++i)
      for (std::size_t j = 0; j <= i && j < poly.size(); ++j) out[i] = ctx.add(out[i], ctx.mul(t[i - j], poly[j]));
    poly = std::move(out);
  }
  std::reverse(poly.begin(), poly.end());
  return poly;
}

/// Evaluates a polynomial (constant term first) by Horner's rule.
inline Residue poly_eval(std::span<const Residue> poly, Residue x, const PrimeContext& ctx) {
  Residue acc = 0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = ctx.add(ctx.mul(acc, x), *it);
  return acc;
}

inline std::vector<Residue> poly_derivative(std::span<const Residue> poly, const PrimeContext& ctx) {
  std::vector<Residue> d;
  for (std::size_t i = 1; i < poly.size(); ++i) d.push_back(ctx.mul(ctx.from_int(static_cast<std::int64_t>(i)), poly[i]));
  if (d.empty()) d.push_back(0);
  return d;
}

}  // namespace pmf
