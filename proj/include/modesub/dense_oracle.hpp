#pragma once

// A deliberately independent dense re-implementation of the coefficient
// recovery pipeline: hand-rolled partial-pivot Gaussian elimination and
// Householder least squares over plain vectors, sharing no numerical code
// with the sparse path. Agreement between the two at small N validates the
// sparse assembly, the factorization wrapper, and the SVD least-squares
// backend end to end.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "modesub/assembly.hpp"
#include "modesub/errors.hpp"

namespace modesub::oracle {

using DenseRows = std::vector<std::vector<double>>;

inline DenseRows densify(const SparseMatrix& s) {
  DenseRows a(static_cast<std::size_t>(s.rows()),
              std::vector<double>(static_cast<std::size_t>(s.cols()), 0.0));
  for (std::int64_t r = 0; r < s.rows(); ++r) {
    const auto cs = s.row_cols(r);
    const auto vs = s.row_values(r);
    for (std::size_t i = 0; i < cs.size(); ++i) a[r][cs[i]] = vs[i];
  }
  return a;
}

/// Gaussian elimination with partial pivoting on a square dense system.
inline std::vector<double> lu_solve(DenseRows a, std::vector<double> b) {
  const std::size_t n = a.size();
  if (b.size() != n || (n > 0 && a[0].size() != n))
    throw DimensionMismatch("oracle::lu_solve: shape mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(a[r][k]) > std::abs(a[piv][k])) piv = r;
    if (a[piv][k] == 0.0)
      throw SingularMatrix("oracle::lu_solve: zero pivot");
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = a[r][k] / a[k][k];
      if (f == 0.0) continue;
      for (std::size_t c = k; c < n; ++c) a[r][c] -= f * a[k][c];
      b[r] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double acc = b[k];
    for (std::size_t c = k + 1; c < n; ++c) acc -= a[k][c] * x[c];
    x[k] = acc / a[k][k];
  }
  return x;
}

/// Least squares min ||a x - b|| by Householder QR (full column rank, m >= n).
inline std::vector<double> qr_lstsq(DenseRows a, std::vector<double> b) {
  const std::size_t m = a.size();
  const std::size_t n = m > 0 ? a[0].size() : 0;
  if (b.size() != m || m < n)
    throw DimensionMismatch("oracle::qr_lstsq: shape mismatch");
  // |R[k][k]| equals the column norm computed at step k, so the R diagonal
  // is available for free; dependence shows up as a diagonal entry that is
  // tiny relative to the largest one (exact zeros never survive roundoff).
  double max_diag = 0.0;
  double min_diag = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t r = k; r < m; ++r) norm += a[r][k] * a[r][k];
    norm = std::sqrt(norm);
    max_diag = std::max(max_diag, norm);
    min_diag = std::min(min_diag, norm);
    const double alpha = a[k][k] >= 0.0 ? -norm : norm;
    std::vector<double> v(m - k);
    v[0] = a[k][k] - alpha;
    for (std::size_t r = k + 1; r < m; ++r) v[r - k] = a[r][k];
    double vtv = 0.0;
    for (double vi : v) vtv += vi * vi;
    if (vtv == 0.0) continue;  // column already triangular
    for (std::size_t c = k; c < n; ++c) {
      double dot = 0.0;
      for (std::size_t r = k; r < m; ++r) dot += v[r - k] * a[r][c];
      const double f = 2.0 * dot / vtv;
      for (std::size_t r = k; r < m; ++r) a[r][c] -= f * v[r - k];
    }
    double dot = 0.0;
    for (std::size_t r = k; r < m; ++r) dot += v[r - k] * b[r];
    const double f = 2.0 * dot / vtv;
    for (std::size_t r = k; r < m; ++r) b[r] -= f * v[r - k];
  }
  if (min_diag <= 1e-12 * max_diag)
    throw RankDeficient("oracle::qr_lstsq: numerically dependent columns");
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double acc = b[k];
    for (std::size_t c = k + 1; c < n; ++c) acc -= a[k][c] * x[c];
    x[k] = acc / a[k][k];
  }
  return x;
}

struct DenseRecovery {
  std::vector<double> k;
  std::vector<double> u_exterior;
};

/// Dense replica of the interior-block elimination: solve the exterior block
/// against each mode column and the load, reduce to the small interior
/// least-squares problem, then back out the exterior solution.
inline DenseRecovery dense_schur_recover(const BlockSystem& blocks) {
  const std::size_t n1 = static_cast<std::size_t>(blocks.n1);
  const std::size_t n2 = static_cast<std::size_t>(blocks.n2);
  const std::size_t m = static_cast<std::size_t>(blocks.E.cols());

  const DenseRows b_blk = densify(blocks.B());
  const DenseRows d_blk = densify(blocks.D());

  // Y columns: D^-1 E2 per mode, then D^-1 F2.
  std::vector<std::vector<double>> y(m + 1);
  for (std::size_t c = 0; c < m; ++c) {
    std::vector<double> e2(n2);
    for (std::size_t r = 0; r < n2; ++r)
      e2[r] = blocks.E.at(static_cast<std::int64_t>(n1 + r),
                          static_cast<std::int64_t>(c));
    y[c] = lu_solve(d_blk, std::move(e2));
  }
  y[m] = lu_solve(d_blk, std::vector<double>(blocks.F.begin() + blocks.n1,
                                             blocks.F.end()));

  DenseRows g(n1, std::vector<double>(m));
  std::vector<double> rhs(n1);
  for (std::size_t r = 0; r < n1; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      double by = 0.0;
      for (std::size_t j = 0; j < n2; ++j) by += b_blk[r][j] * y[c][j];
      g[r][c] = blocks.E.at(static_cast<std::int64_t>(r),
                            static_cast<std::int64_t>(c)) -
                by;
    }
    double byf = 0.0;
    for (std::size_t j = 0; j < n2; ++j) byf += b_blk[r][j] * y[m][j];
    rhs[r] = -(blocks.F[r] - byf);
  }

  DenseRecovery out;
  out.k = qr_lstsq(std::move(g), std::move(rhs));

  std::vector<double> ext_rhs(blocks.F.begin() + blocks.n1, blocks.F.end());
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t r = 0; r < n2; ++r)
      ext_rhs[r] += blocks.E.at(static_cast<std::int64_t>(n1 + r),
                                static_cast<std::int64_t>(c)) *
                    out.k[c];
  out.u_exterior = lu_solve(d_blk, std::move(ext_rhs));
  return out;
}

}  // namespace modesub::oracle
