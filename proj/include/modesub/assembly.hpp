#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "modesub/errors.hpp"
#include "modesub/geometry.hpp"
#include "modesub/linalg.hpp"
#include "modesub/modes.hpp"

namespace modesub {

using ScalarField = std::function<double(Point)>;

/// Everything needed to pose one problem: grid, interface, subtraction
/// basis, stencil order, source f, Dirichlet data g, and (optionally) the
/// exact solution / exact coefficients for error measurement. The diffusion
/// coefficient is identically 1 by construction.
struct CaseSpec {
  UniformGrid grid;
  InterfaceGeometry iface;
  ModeBasis basis;
  int order;  // 2 or 4
  ScalarField source;
  ScalarField boundary;
  ScalarField exact_solution;               // may be empty
  std::vector<double> exact_coefficients;   // may be empty

  CaseSpec(UniformGrid g, InterfaceGeometry ifc, ModeBasis b, int ord,
           ScalarField f, ScalarField bdry, ScalarField exact = {},
           std::vector<double> exact_k = {})
      : grid(std::move(g)),
        iface(std::move(ifc)),
        basis(std::move(b)),
        order(ord),
        source(std::move(f)),
        boundary(std::move(bdry)),
        exact_solution(std::move(exact)),
        exact_coefficients(std::move(exact_k)) {
    if (order != 2 && order != 4)
      throw ValidationError("CaseSpec: order must be 2 or 4");
    if (!source || !boundary)
      throw ValidationError("CaseSpec: source and boundary fields required");
  }
};

/// The assembled partitioned system S u = F + E k over interior unknowns in
/// I1-then-I2 ordering: the leading n1 rows/columns form the A block, the
/// trailing n2 the D block.
struct BlockSystem {
  SparseMatrix S;
  std::vector<double> F;
  DenseMatrix E;  // one column per mode
  NodeClassification partition;
  UniformGrid grid;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;

  SparseMatrix A() const { return S.submatrix(0, n1, 0, n1); }
  SparseMatrix B() const { return S.submatrix(0, n1, n1, n1 + n2); }
  SparseMatrix C() const { return S.submatrix(n1, n1 + n2, 0, n1); }
  SparseMatrix D() const { return S.submatrix(n1, n1 + n2, n1, n1 + n2); }
};

/// Finite-difference weights for the m-th derivative on the nodes
/// {offset_j * h}: sum_j w_j q(offset_j h) = q^(m)(0) exactly for every
/// polynomial q up to degree |offsets|-1. Computed by a Vandermonde solve in
/// the dimensionless offsets, then scaled by h^-m.
inline std::vector<double> fd_weights(std::span<const int> offsets, int m,
                                      double h = 1.0) {
  const int s = static_cast<int>(offsets.size());
  if (s <= m)
    throw ValidationError("fd_weights: need more offsets than derivative order");
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j)
      if (offsets[i] == offsets[j])
        throw SingularVandermonde("fd_weights: repeated offsets");

  // Row k of V demands sum_j w_j offset_j^k = m! * delta_{k,m}.
  Eigen::MatrixXd v(s, s);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s);
  for (int k = 0; k < s; ++k)
    for (int j = 0; j < s; ++j)
      v(k, j) = std::pow(static_cast<double>(offsets[j]), k);
  double mfact = 1.0;
  for (int j = 2; j <= m; ++j) mfact *= j;
  rhs(m) = mfact;

  Eigen::VectorXd w = v.partialPivLu().solve(rhs);
  const double scale = std::pow(h, -m);
  std::vector<double> out(s);
  for (int j = 0; j < s; ++j) out[j] = w(j) * scale;
  return out;
}

namespace detail {

/// Stencil offsets along one axis for a node at distance `i` from the low
/// edge (of `n` divisions): central stencils everywhere at order 2; at
/// order 4 the nodes adjacent to the boundary take one-sided 6-point
/// stencils that keep the fourth-order truncation.
inline std::vector<int> axis_offsets(int order, int i, int n) {
  if (order == 2) return {-1, 0, 1};
  if (i == 1) return {-1, 0, 1, 2, 3, 4};
  if (i == n - 1) return {-4, -3, -2, -1, 0, 1};
  return {-2, -1, 0, 1, 2};
}

inline double mode_value_with_center_limit(const SingularMode& mode, Point p) {
  const Point c = mode.center();
  if (std::hypot(p[0] - c[0], p[1] - c[1]) < 1e-12) {
    if (mode.vanishes_at_center()) return 0.0;
    throw EvalAtSingularCenter(
        "mode with no limit value evaluated at its center");
  }
  return eval_value(mode, p);
}

}  // namespace detail

/// Build the block system by dimension-by-dimension stencils with interface
/// corrections by direct cross-side evaluation:
///
///  * every interior row gets the order-2 or order-4 Laplacian stencil along
///    each axis; Dirichlet neighbors are folded into F (F_row -= w_b g(x_b));
///  * an Omega1 row's source is the subtracted one: F_row = f(x), and column
///    i of E receives -lap(mode_i)(x) (so that RHS = F + E k);
///  * wherever a stencil arm crosses the interface, the smooth extension of
///    the unknown across it differs from the neighbor's own unknown by
///    exactly sum_i k_i mode_i(neighbor), which lands in E: a row centered
///    in Omega2 with an arm at y in Omega1 gets E[row, i] -= w_y mode_i(y);
///    a row centered in Omega1 with an arm at z in Omega2 gets
///    E[row, i] += w_z mode_i(z). The corrections are exact - no Taylor
///    truncation is introduced at the interface - so the same machinery
///    serves both stencil orders;
///  * at an Omega1 node within 1e-12 of a singular-mode center, the f and
///    lap(mode) source terms are dropped (they cancel analytically for the
///    exact coefficients; the stencil itself is untouched).
///
/// The Dirichlet folding assumes every mode vanishes at any boundary node
/// reachable from an Omega1 row (true whenever the interface separates the
/// mode centers' singular behavior from the boundary, and checked here);
/// BoundaryInsideOmega1 is thrown otherwise.
inline BlockSystem assemble(const CaseSpec& spec) {
  const UniformGrid& grid = spec.grid;
  const int dim = grid.dim();
  if (spec.order == 4)
    for (int axis = 0; axis < dim; ++axis)
      if (grid.divisions(axis) < 5)
        throw ValidationError(
            "assemble: order-4 boundary closure needs at least 5 divisions");
  NodeClassification cls = classify_nodes(grid, spec.iface);

  // The mode centers must lie strictly inside the interface.
  for (const auto& mode : spec.basis.modes) {
    if (mode.singular() && !(spec.iface.level(mode.center()) < 0.0))
      throw BoundaryInsideOmega1(
          "singular mode center must lie strictly inside the interface");
  }

  const std::int64_t n1 = cls.n1(), n2 = cls.n2();
  const std::int64_t n = n1 + n2;
  const std::size_t m = spec.basis.size();

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * (dim * (spec.order + 1) + 1));
  std::vector<double> load(n, 0.0);
  DenseMatrix e(n, static_cast<std::int64_t>(m));

  auto require_smooth = [&](const SingularMode& mode, Point p) {
    const Point c = mode.center();
    const double dist = std::hypot(p[0] - c[0], p[1] - c[1]);
    if (dist <= mode.smoothness_radius() || !mode.smooth_at(p))
      throw ModeNotSmoothAcrossInterface(
          "subtraction mode is not smooth at a required evaluation point");
  };

  auto fold_boundary = [&](std::int64_t row, Region side, double w, Point pb) {
    load[row] -= w * spec.boundary(pb);
    if (side == Region::Omega1) {
      // The unknown at an Omega1 row is the subtracted field, so folding g
      // alone is exact only when the modes contribute nothing at pb.
      for (const auto& mode : spec.basis.modes)
        if (detail::mode_value_with_center_limit(mode, pb) != 0.0)
          throw BoundaryInsideOmega1(
              "a mode is nonzero at a boundary node coupled to the subtracted "
              "region; the interface must separate them");
    }
  };

  for (std::int64_t lin = 0; lin < grid.node_count(); ++lin) {
    if (cls.per_node[lin] == Region::Boundary) continue;
    const Region side = cls.per_node[lin];
    const NodeIndex center = grid.node_at(lin);
    const std::int64_t row = cls.row_of[lin];
    const Point x = grid.coord(center);

    for (int axis = 0; axis < dim; ++axis) {
      const int ci = axis == 0 ? center.i : center.j;
      const auto offsets =
          detail::axis_offsets(spec.order, ci, grid.divisions(axis));
      const auto weights = fd_weights(offsets, 2, grid.spacing(axis));

      for (std::size_t t = 0; t < offsets.size(); ++t) {
        NodeIndex nb = center;
        (axis == 0 ? nb.i : nb.j) += offsets[t];
        const double w = weights[t];
        const std::int64_t nb_lin = grid.linear_index(nb);

        if (cls.per_node[nb_lin] == Region::Boundary) {
          fold_boundary(row, side, w, grid.coord(nb));
          continue;
        }
        triplets.push_back({row, cls.row_of[nb_lin], w});

        if (cls.per_node[nb_lin] != side) {
          const Point y = grid.coord(nb);
          for (std::size_t i = 0; i < m; ++i) {
            const auto& mode = spec.basis.modes[i];
            require_smooth(mode, y);
            const double v = eval_value(mode, y);
            // Omega2 center, arm in Omega1: the arm's unknown is short of
            // the smooth extension by the mode sum. Omega1 center, arm in
            // Omega2: the arm's unknown exceeds it by the same amount.
            e.at(row, static_cast<std::int64_t>(i)) +=
                (side == Region::Omega2 ? -w : w) * v;
          }
        }
      }
    }

    // Source terms.
    if (side == Region::Omega1) {
      bool singular_node = false;
      for (const auto& mode : spec.basis.modes) {
        const Point c = mode.center();
        if (mode.singular() &&
            std::hypot(x[0] - c[0], x[1] - c[1]) < 1e-12) {
          singular_node = true;
          break;
        }
      }
      if (!singular_node) {
        load[row] += spec.source(x);
        for (std::size_t i = 0; i < m; ++i) {
          const auto& mode = spec.basis.modes[i];
          require_smooth(mode, x);
          e.at(row, static_cast<std::int64_t>(i)) -= eval_laplacian(mode, x);
        }
      }
    } else {
      load[row] += spec.source(x);
    }
  }

  BlockSystem out{SparseMatrix::from_triplets(n, n, triplets),
                  std::move(load),
                  std::move(e),
                  std::move(cls),
                  grid,
                  n1,
                  n2};
  return out;
}

/// Block product (A u1 + B u2, C u1 + D u2) through the extracted blocks;
/// a verification utility for the partition invariant.
inline std::pair<std::vector<double>, std::vector<double>> apply_blocks(
    const BlockSystem& blocks, std::span<const double> u1,
    std::span<const double> u2) {
  if (static_cast<std::int64_t>(u1.size()) != blocks.n1 ||
      static_cast<std::int64_t>(u2.size()) != blocks.n2)
    throw DimensionMismatch("apply_blocks: block size mismatch");
  auto r1 = blocks.A().matvec(u1);
  const auto bu2 = blocks.B().matvec(u2);
  for (std::int64_t i = 0; i < blocks.n1; ++i) r1[i] += bu2[i];
  auto r2 = blocks.C().matvec(u1);
  const auto du2 = blocks.D().matvec(u2);
  for (std::int64_t i = 0; i < blocks.n2; ++i) r2[i] += du2[i];
  return {std::move(r1), std::move(r2)};
}

/// Plain-text coordinate dump of S, F, E ("S,i,j,v" / "F,i,v" / "E,i,j,v"
/// lines) for external comparison; a debug format, not load-bearing.
inline void dump_block_system(const BlockSystem& blocks, std::ostream& os) {
  os.precision(17);
  for (std::int64_t r = 0; r < blocks.S.rows(); ++r) {
    const auto cs = blocks.S.row_cols(r);
    const auto vs = blocks.S.row_values(r);
    for (std::size_t i = 0; i < cs.size(); ++i)
      os << "S," << r << "," << cs[i] << "," << vs[i] << "\n";
  }
  for (std::size_t i = 0; i < blocks.F.size(); ++i)
    os << "F," << i << "," << blocks.F[i] << "\n";
  for (std::int64_t r = 0; r < blocks.E.rows(); ++r)
    for (std::int64_t c = 0; c < blocks.E.cols(); ++c)
      if (blocks.E.at(r, c) != 0.0)
        os << "E," << r << "," << c << "," << blocks.E.at(r, c) << "\n";
  if (!os) throw IoFailure("dump_block_system: stream write failed");
}

}  // namespace modesub
