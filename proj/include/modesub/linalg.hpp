#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "modesub/errors.hpp"

namespace modesub {

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  double value;
};

/// Row-compressed sparse matrix. Column indices are sorted and unique within
/// each row; duplicate triplets are summed on construction.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  static SparseMatrix from_triplets(std::int64_t rows, std::int64_t cols,
                                    std::span<const Triplet> triplets) {
    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    for (const auto& t : triplets)
      if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
        throw DimensionMismatch("SparseMatrix: triplet out of range");

    std::vector<std::int64_t> count(rows, 0);
    for (const auto& t : triplets) count[t.row]++;
    std::vector<std::vector<std::pair<std::int64_t, double>>> per_row(rows);
    for (std::int64_t r = 0; r < rows; ++r) per_row[r].reserve(count[r]);
    for (const auto& t : triplets) per_row[t.row].push_back({t.col, t.value});

    m.offsets_.assign(1, 0);
    for (std::int64_t r = 0; r < rows; ++r) {
      auto& row = per_row[r];
      std::sort(row.begin(), row.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::int64_t nnz_row = 0;
      for (std::size_t i = 0; i < row.size();) {
        std::int64_t c = row[i].first;
        double v = 0.0;
        while (i < row.size() && row[i].first == c) v += row[i++].second;
        m.col_index_.push_back(c);
        m.values_.push_back(v);
        ++nnz_row;
      }
      m.offsets_.push_back(m.offsets_.back() + nnz_row);
    }
    return m;
  }

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }

  std::span<const std::int64_t> row_cols(std::int64_t r) const {
    return {col_index_.data() + offsets_[r],
            static_cast<std::size_t>(offsets_[r + 1] - offsets_[r])};
  }
  std::span<const double> row_values(std::int64_t r) const {
    return {values_.data() + offsets_[r],
            static_cast<std::size_t>(offsets_[r + 1] - offsets_[r])};
  }

  std::vector<double> matvec(std::span<const double> x) const {
    if (static_cast<std::int64_t>(x.size()) != cols_)
      throw DimensionMismatch("SparseMatrix::matvec: size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::int64_t r = 0; r < rows_; ++r) {
      double acc = 0.0;
      const auto cs = row_cols(r);
      const auto vs = row_values(r);
      for (std::size_t i = 0; i < cs.size(); ++i) acc += vs[i] * x[cs[i]];
      y[r] = acc;
    }
    return y;
  }

  /// Contiguous sub-block [row_begin, row_end) x [col_begin, col_end).
  SparseMatrix submatrix(std::int64_t row_begin, std::int64_t row_end,
                         std::int64_t col_begin, std::int64_t col_end) const {
    if (row_begin < 0 || row_end > rows_ || col_begin < 0 || col_end > cols_ ||
        row_begin > row_end || col_begin > col_end)
      throw DimensionMismatch("SparseMatrix::submatrix: bad range");
    SparseMatrix m;
    m.rows_ = row_end - row_begin;
    m.cols_ = col_end - col_begin;
    m.offsets_.assign(1, 0);
    for (std::int64_t r = row_begin; r < row_end; ++r) {
      const auto cs = row_cols(r);
      const auto vs = row_values(r);
      std::int64_t nnz_row = 0;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i] < col_begin || cs[i] >= col_end) continue;
        m.col_index_.push_back(cs[i] - col_begin);
        m.values_.push_back(vs[i]);
        ++nnz_row;
      }
      m.offsets_.push_back(m.offsets_.back() + nnz_row);
    }
    return m;
  }

  double infinity_norm() const {
    double best = 0.0;
    for (std::int64_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (double v : row_values(r)) s += std::abs(v);
      best = std::max(best, s);
    }
    return best;
  }

  Eigen::SparseMatrix<double> to_eigen() const {
    Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(rows_),
                                  static_cast<Eigen::Index>(cols_));
    std::vector<Eigen::Triplet<double>> ts;
    ts.reserve(values_.size());
    for (std::int64_t r = 0; r < rows_; ++r) {
      const auto cs = row_cols(r);
      const auto vs = row_values(r);
      for (std::size_t i = 0; i < cs.size(); ++i)
        ts.emplace_back(static_cast<int>(r), static_cast<int>(cs[i]), vs[i]);
    }
    m.setFromTriplets(ts.begin(), ts.end());
    return m;
  }

 private:
  std::int64_t rows_ = 0, cols_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int64_t> col_index_;
  std::vector<double> values_;
};

/// Minimal column-major dense matrix (mode-contribution blocks, least-squares
/// inputs, multi-RHS bundles).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::int64_t rows, std::int64_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  double& at(std::int64_t r, std::int64_t c) { return data_[c * rows_ + r]; }
  double at(std::int64_t r, std::int64_t c) const {
    return data_[c * rows_ + r];
  }
  std::span<const double> col(std::int64_t c) const {
    return {data_.data() + c * rows_, static_cast<std::size_t>(rows_)};
  }
  std::span<double> col_mut(std::int64_t c) {
    return {data_.data() + c * rows_, static_cast<std::size_t>(rows_)};
  }

  std::vector<double> matvec(std::span<const double> x) const {
    if (static_cast<std::int64_t>(x.size()) != cols_)
      throw DimensionMismatch("DenseMatrix::matvec: size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::int64_t c = 0; c < cols_; ++c) {
      const auto column = col(c);
      for (std::int64_t r = 0; r < rows_; ++r) y[r] += column[r] * x[c];
    }
    return y;
  }

 private:
  std::int64_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Opaque direct factorization of a square sparse matrix, reusable across
/// many right-hand sides. Immutable once built; concurrent solves are safe.
class Factorization {
 public:
  std::int64_t size() const { return n_; }

  std::vector<double> solve(std::span<const double> b) const {
    if (static_cast<std::int64_t>(b.size()) != n_)
      throw DimensionMismatch("Factorization::solve: size mismatch");
    Eigen::VectorXd rhs =
        Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(n_));
    Eigen::VectorXd x = lu_->solve(rhs);
    if (lu_->info() != Eigen::Success)
      throw SingularMatrix("Factorization::solve failed");
    return {x.data(), x.data() + n_};
  }

  /// Solve against each column of B; column i of the result solves M x = B_i.
  DenseMatrix solve_many(const DenseMatrix& b) const {
    if (b.rows() != n_)
      throw DimensionMismatch("Factorization::solve_many: size mismatch");
    DenseMatrix x(n_, b.cols());
    for (std::int64_t c = 0; c < b.cols(); ++c) {
      auto xc = solve(b.col(c));
      std::copy(xc.begin(), xc.end(), x.col_mut(c).begin());
    }
    return x;
  }

 private:
  friend Factorization factor(const SparseMatrix&);
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  std::int64_t n_ = 0;
};

/// Sparse LU with fill-reducing column ordering. Throws SingularMatrix when
/// a pivot collapses (structural or numerical singularity).
inline Factorization factor(const SparseMatrix& m) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("factor: matrix must be square");
  Factorization f;
  f.n_ = m.rows();
  f.lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  Eigen::SparseMatrix<double> em = m.to_eigen();
  em.makeCompressed();
  f.lu_->analyzePattern(em);
  f.lu_->factorize(em);
  if (f.lu_->info() != Eigen::Success)
    throw SingularMatrix("factor: zero pivot during sparse LU");
  return f;
}

/// Minimizer of ||G k - b||_2 via SVD (orthogonal factorization; the normal
/// equations are never formed). Returns (k, residual norm). Throws
/// RankDeficient when sigma_min <= 1e-12 * sigma_max.
inline std::pair<std::vector<double>, double> dense_lstsq(
    const DenseMatrix& g, std::span<const double> b) {
  if (static_cast<std::int64_t>(b.size()) != g.rows())
    throw DimensionMismatch("dense_lstsq: rhs size mismatch");
  if (g.rows() < g.cols())
    throw DimensionMismatch("dense_lstsq: need at least as many rows as columns");

  Eigen::MatrixXd gm(static_cast<Eigen::Index>(g.rows()),
                     static_cast<Eigen::Index>(g.cols()));
  for (std::int64_t c = 0; c < g.cols(); ++c)
    for (std::int64_t r = 0; r < g.rows(); ++r)
      gm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          g.at(r, c);
  Eigen::Map<const Eigen::VectorXd> bv(b.data(),
                                       static_cast<Eigen::Index>(b.size()));

  Eigen::BDCSVD<Eigen::MatrixXd> svd(gm,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (!(smax > 0.0) || sv(sv.size() - 1) <= 1e-12 * smax)
    throw RankDeficient("dense_lstsq: numerically rank-deficient matrix");

  Eigen::VectorXd k = svd.solve(bv);
  const double residual = (gm * k - bv).norm();
  return {{k.data(), k.data() + k.size()}, residual};
}

}  // namespace modesub
