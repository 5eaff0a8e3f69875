#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modesub/assembly.hpp"
#include "modesub/errors.hpp"
#include "modesub/geometry.hpp"
#include "modesub/linalg.hpp"
#include "modesub/modes.hpp"

namespace modesub {

enum class Method { Schur, FixedPoint };

/// Coefficient recovery by eliminating the exterior block: with D factored
/// once, Y_F = D^-1 F2 and Y_E = D^-1 E2 (one solve per mode column) give
/// the small overdetermined system G k ~ b over the interior rows, with
/// G = E1 - B Y_E and b = -(F1 - B Y_F), solved by dense least squares.
struct SchurRecovery {
  std::vector<double> k;
  double ls_residual_norm;
  Factorization d_factor;  // reusable by exterior_solve
};

inline SchurRecovery schur_recover_k(const BlockSystem& blocks) {
  const std::int64_t n1 = blocks.n1, n2 = blocks.n2;
  const std::int64_t m = blocks.E.cols();
  if (n1 < m)
    throw RankDeficient("schur_recover_k: fewer interior rows than modes");

  const SparseMatrix b_blk = blocks.B();
  Factorization d_factor = factor(blocks.D());

  DenseMatrix rhs(n2, m + 1);
  for (std::int64_t c = 0; c < m; ++c) {
    const auto e2 = blocks.E.col(c);
    std::copy(e2.begin() + n1, e2.end(), rhs.col_mut(c).begin());
  }
  std::copy(blocks.F.begin() + n1, blocks.F.end(), rhs.col_mut(m).begin());
  const DenseMatrix y = d_factor.solve_many(rhs);  // [Y_E | Y_F]

  DenseMatrix g(n1, m);
  for (std::int64_t c = 0; c < m; ++c) {
    const auto by = b_blk.matvec(y.col(c));
    for (std::int64_t r = 0; r < n1; ++r)
      g.at(r, c) = blocks.E.at(r, c) - by[r];
  }
  const auto byf = b_blk.matvec(y.col(m));
  std::vector<double> rhs_k(n1);
  for (std::int64_t r = 0; r < n1; ++r) rhs_k[r] = -(blocks.F[r] - byf[r]);

  auto [k, residual] = dense_lstsq(g, rhs_k);
  return {std::move(k), residual, std::move(d_factor)};
}

/// Exterior solve D u2 = F2 + E2 k; pass the recovery's factorization to
/// reuse it, otherwise D is factored here.
inline std::vector<double> exterior_solve(const BlockSystem& blocks,
                                          std::span<const double> k,
                                          const Factorization* reuse = nullptr) {
  if (static_cast<std::int64_t>(k.size()) != blocks.E.cols())
    throw DimensionMismatch("exterior_solve: coefficient count mismatch");
  const std::int64_t n1 = blocks.n1, n2 = blocks.n2;
  std::vector<double> rhs(blocks.F.begin() + n1, blocks.F.end());
  for (std::int64_t c = 0; c < blocks.E.cols(); ++c) {
    const auto e2 = blocks.E.col(c);
    for (std::int64_t r = 0; r < n2; ++r) rhs[r] += e2[n1 + r] * k[c];
  }
  if (reuse) return reuse->solve(rhs);
  return factor(blocks.D()).solve(rhs);
}

/// The full-system objects behind the fixed-point path: P = S M S^-1 F and
/// Q = S M S^-1 E, where M zeroes the interior (I1) block. Holding them makes
/// one-step mapping applications cheap diagnostics.
struct FixedPointSystem {
  std::vector<double> p;
  DenseMatrix q;
};

inline FixedPointSystem build_fixed_point_system(const BlockSystem& blocks) {
  const std::int64_t n1 = blocks.n1;
  const std::int64_t n = n1 + blocks.n2;
  const std::int64_t m = blocks.E.cols();

  const Factorization s_factor = factor(blocks.S);

  DenseMatrix rhs(n, m + 1);
  for (std::int64_t c = 0; c < m; ++c) {
    const auto e = blocks.E.col(c);
    std::copy(e.begin(), e.end(), rhs.col_mut(c).begin());
  }
  std::copy(blocks.F.begin(), blocks.F.end(), rhs.col_mut(m).begin());

  DenseMatrix solved = s_factor.solve_many(rhs);  // [S^E | S^F]
  for (std::int64_t c = 0; c <= m; ++c) {
    auto col = solved.col_mut(c);
    std::fill(col.begin(), col.begin() + n1, 0.0);  // mask the I1 block
  }

  FixedPointSystem fp;
  fp.q = DenseMatrix(n, m);
  for (std::int64_t c = 0; c < m; ++c) {
    const auto qc = blocks.S.matvec(solved.col(c));
    std::copy(qc.begin(), qc.end(), fp.q.col_mut(c).begin());
  }
  fp.p = blocks.S.matvec(solved.col(m));
  return fp;
}

/// Closed-form fixed-point recovery: k = argmin ||(E - Q) k - (P - F)||_2.
inline std::pair<std::vector<double>, double> fixed_point_recover_k(
    const BlockSystem& blocks, const FixedPointSystem& fp) {
  const std::int64_t n = blocks.n1 + blocks.n2;
  const std::int64_t m = blocks.E.cols();
  DenseMatrix g(n, m);
  for (std::int64_t c = 0; c < m; ++c)
    for (std::int64_t r = 0; r < n; ++r)
      g.at(r, c) = blocks.E.at(r, c) - fp.q.at(r, c);
  std::vector<double> rhs(n);
  for (std::int64_t r = 0; r < n; ++r) rhs[r] = fp.p[r] - blocks.F[r];
  return dense_lstsq(g, rhs);
}

inline std::pair<std::vector<double>, double> fixed_point_recover_k(
    const BlockSystem& blocks) {
  return fixed_point_recover_k(blocks, build_fixed_point_system(blocks));
}

/// One application of the underlying mapping k -> lstsq(E, P - F + Q k);
/// the recovered coefficients are (numerically) invariant under it.
inline std::vector<double> iterate_k(const BlockSystem& blocks,
                                     const FixedPointSystem& fp,
                                     std::span<const double> k) {
  const std::int64_t n = blocks.n1 + blocks.n2;
  const auto qk = fp.q.matvec(k);
  std::vector<double> rhs(n);
  for (std::int64_t r = 0; r < n; ++r)
    rhs[r] = fp.p[r] - blocks.F[r] + qk[r];
  return dense_lstsq(blocks.E, rhs).first;
}

/// Stitch the full-grid solution back together: the recovered mode sum on
/// Omega1 (the subtracted unknown there is taken as exactly 0), the exterior
/// solve on I2, and the Dirichlet data on the boundary. At a node sitting on
/// a mode center the mode contributes its limit value 0 (positive-power
/// families only).
inline std::vector<double> reconstruct(const CaseSpec& spec,
                                       const NodeClassification& cls,
                                       std::span<const double> k,
                                       std::span<const double> u_exterior) {
  if (k.size() != spec.basis.size())
    throw DimensionMismatch("reconstruct: coefficient count mismatch");
  if (static_cast<std::int64_t>(u_exterior.size()) != cls.n2())
    throw DimensionMismatch("reconstruct: exterior size mismatch");

  const UniformGrid& grid = spec.grid;
  std::vector<double> u(grid.node_count(), 0.0);
  for (std::int64_t lin = 0; lin < grid.node_count(); ++lin) {
    const Point x = grid.coord(grid.node_at(lin));
    switch (cls.per_node[lin]) {
      case Region::Boundary:
        u[lin] = spec.boundary(x);
        break;
      case Region::Omega1: {
        double v = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i)
          v += k[i] *
               detail::mode_value_with_center_limit(spec.basis.modes[i], x);
        u[lin] = v;
        break;
      }
      case Region::Omega2:
        u[lin] = u_exterior[cls.row_of[lin] - cls.n1()];
        break;
    }
  }
  return u;
}

/// Full pipeline result for one case and one recovery path.
struct RecoveryResult {
  std::vector<double> k;
  Method method;
  double ls_residual_norm = 0.0;
  std::vector<double> u_full;      // over all grid nodes
  std::vector<double> u_exterior;  // over I2
};

/// assemble -> recover k -> exterior solve -> reconstruct.
inline RecoveryResult solve_case(const CaseSpec& spec, Method method) {
  const BlockSystem blocks = assemble(spec);
  RecoveryResult out;
  out.method = method;
  if (method == Method::Schur) {
    auto rec = schur_recover_k(blocks);
    out.k = std::move(rec.k);
    out.ls_residual_norm = rec.ls_residual_norm;
    out.u_exterior = exterior_solve(blocks, out.k, &rec.d_factor);
  } else {
    auto [k, res] = fixed_point_recover_k(blocks);
    out.k = std::move(k);
    out.ls_residual_norm = res;
    out.u_exterior = exterior_solve(blocks, out.k);
  }
  out.u_full = reconstruct(spec, blocks.partition, out.k, out.u_exterior);
  return out;
}

}  // namespace modesub
