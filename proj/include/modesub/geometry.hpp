#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "modesub/errors.hpp"

namespace modesub {

/// A point in at most two dimensions; the second coordinate is 0 in 1-D.
using Point = std::array<double, 2>;

/// Grid node index; `j` is unused (0) in 1-D.
struct NodeIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

enum class Region : unsigned char { Omega1, Omega2, Boundary };

/// Uniform tensor-product grid: N divisions (N+1 nodes) per axis with
/// spacing h = (b - a)/N, so node coordinates are exactly a + i*h.
class UniformGrid {
 public:
  static UniformGrid line(double a, double b, int n) {
    return UniformGrid(1, {a, 0.0}, {b, 0.0}, {n, 0});
  }
  /// Square grid with the same number of divisions along both axes.
  static UniformGrid square(Point lo, Point hi, int n) {
    return UniformGrid(2, lo, hi, {n, n});
  }

  int dim() const { return dim_; }
  int divisions(int axis) const { return n_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double lower(int axis) const { return lo_[axis]; }
  double upper(int axis) const { return hi_[axis]; }
  int nodes_per_axis(int axis) const { return n_[axis] + 1; }

  std::int64_t node_count() const {
    std::int64_t c = nodes_per_axis(0);
    if (dim_ == 2) c *= nodes_per_axis(1);
    return c;
  }

  /// Linear node index in lexicographic (x-major) order.
  std::int64_t linear_index(NodeIndex n) const {
    if (dim_ == 1) return n.i;
    return static_cast<std::int64_t>(n.i) * nodes_per_axis(1) + n.j;
  }

  NodeIndex node_at(std::int64_t lin) const {
    if (dim_ == 1) return {static_cast<int>(lin), 0};
    const int ny = nodes_per_axis(1);
    return {static_cast<int>(lin / ny), static_cast<int>(lin % ny)};
  }

  Point coord(NodeIndex n) const {
    Point p{lo_[0] + n.i * h_[0], 0.0};
    if (dim_ == 2) p[1] = lo_[1] + n.j * h_[1];
    return p;
  }

  bool contains(NodeIndex n) const {
    if (n.i < 0 || n.i > n_[0]) return false;
    if (dim_ == 2 && (n.j < 0 || n.j > n_[1])) return false;
    return dim_ == 1 ? n.j == 0 : true;
  }

  bool on_boundary(NodeIndex n) const {
    if (n.i == 0 || n.i == n_[0]) return true;
    return dim_ == 2 && (n.j == 0 || n.j == n_[1]);
  }

 private:
  UniformGrid(int dim, Point lo, Point hi, std::array<int, 2> n)
      : dim_(dim), lo_(lo), hi_(hi), n_(n) {
    for (int ax = 0; ax < dim_; ++ax) {
      if (n_[ax] < 4)
        throw ValidationError("UniformGrid: need at least 4 divisions per axis");
      if (!(hi_[ax] > lo_[ax]))
        throw ValidationError("UniformGrid: bounds must satisfy a < b");
      h_[ax] = (hi_[ax] - lo_[ax]) / n_[ax];
    }
  }

  int dim_;
  Point lo_, hi_;
  std::array<int, 2> n_;
  std::array<double, 2> h_{0.0, 0.0};
};

/// Artificial interface: a point x_c in 1-D or a circle in 2-D, exposed as
/// the level function phi with phi < 0 inside (Omega1) and phi >= 0 outside.
class InterfaceGeometry {
 public:
  struct Point1D {
    double x_c;
  };
  struct Circle2D {
    Point center;
    double radius;
  };

  static InterfaceGeometry point(double x_c) {
    return InterfaceGeometry(Point1D{x_c});
  }
  static InterfaceGeometry circle(Point center, double radius) {
    if (!(radius > 0.0))
      throw ValidationError("InterfaceGeometry: radius must be positive");
    return InterfaceGeometry(Circle2D{center, radius});
  }

  int dim() const { return std::holds_alternative<Point1D>(shape_) ? 1 : 2; }

  double level(Point p) const {
    if (const auto* pt = std::get_if<Point1D>(&shape_)) return p[0] - pt->x_c;
    const auto& c = std::get<Circle2D>(shape_);
    return std::hypot(p[0] - c.center[0], p[1] - c.center[1]) - c.radius;
  }

  const Point1D* as_point() const { return std::get_if<Point1D>(&shape_); }
  const Circle2D* as_circle() const { return std::get_if<Circle2D>(&shape_); }

 private:
  template <class S>
  explicit InterfaceGeometry(S s) : shape_(s) {}
  std::variant<Point1D, Circle2D> shape_;
};

/// Region label per node plus the ordered interior index sets I1 and I2.
/// Unknown ordering everywhere in this library is I1 first, then I2, each
/// in lexicographic (linear-index) node order.
struct NodeClassification {
  std::vector<Region> per_node;          // by linear node index
  std::vector<std::int64_t> interior1;   // linear ids of Omega1 interior nodes
  std::vector<std::int64_t> interior2;   // linear ids of Omega2 interior nodes
  std::vector<std::int64_t> row_of;      // linear id -> unknown row; -1 = boundary

  std::int64_t n1() const { return static_cast<std::int64_t>(interior1.size()); }
  std::int64_t n2() const { return static_cast<std::int64_t>(interior2.size()); }
};

/// Classify every node: boundary nodes are Boundary regardless of phi;
/// interior nodes go to Omega1 when phi < 0 and Omega2 when phi >= 0
/// (the tie lands in Omega2 on purpose, keeping on-interface nodes out of
/// the subtracted region). Sign comparisons are exact IEEE comparisons.
inline NodeClassification classify_nodes(const UniformGrid& grid,
                                         const InterfaceGeometry& iface) {
  if (grid.dim() != iface.dim())
    throw DimensionMismatch("classify_nodes: grid/interface dimension mismatch");

  // The interface must sit strictly inside the domain interior.
  if (const auto* pt = iface.as_point()) {
    if (!(pt->x_c > grid.lower(0) && pt->x_c < grid.upper(0)))
      throw InterfaceOutsideDomain("interface point outside the open domain");
  } else if (const auto* c = iface.as_circle()) {
    for (int ax = 0; ax < 2; ++ax) {
      if (!(c->center[ax] - c->radius > grid.lower(ax) &&
            c->center[ax] + c->radius < grid.upper(ax)))
        throw InterfaceOutsideDomain("interface circle touches the domain boundary");
    }
  }

  const std::int64_t total = grid.node_count();
  NodeClassification cls;
  cls.per_node.resize(total);
  cls.row_of.assign(total, -1);

  bool saw_neg = false, saw_nonneg = false;
  for (std::int64_t lin = 0; lin < total; ++lin) {
    const NodeIndex n = grid.node_at(lin);
    if (grid.on_boundary(n)) {
      cls.per_node[lin] = Region::Boundary;
      continue;
    }
    const double phi = iface.level(grid.coord(n));
    if (phi < 0.0) {
      cls.per_node[lin] = Region::Omega1;
      cls.interior1.push_back(lin);
      saw_neg = true;
    } else {
      cls.per_node[lin] = Region::Omega2;
      cls.interior2.push_back(lin);
      saw_nonneg = true;
    }
  }
  if (!saw_neg || !saw_nonneg)
    throw InterfaceOutsideDomain(
        "level function does not change sign over interior nodes");

  std::int64_t row = 0;
  for (std::int64_t lin : cls.interior1) cls.row_of[lin] = row++;
  for (std::int64_t lin : cls.interior2) cls.row_of[lin] = row++;
  return cls;
}

/// The stencil neighbors of `center` (along each axis, at the given integer
/// offsets) whose region label differs from the center's own label.
/// Boundary neighbors are excluded; offset 0 is ignored.
inline std::vector<NodeIndex> stencil_arm_crossings(
    const UniformGrid& grid, const NodeClassification& cls, NodeIndex center,
    std::span<const int> offsets) {
  if (grid.on_boundary(center) || !grid.contains(center))
    throw ValidationError("stencil_arm_crossings: center must be an interior node");
  const Region mine = cls.per_node[grid.linear_index(center)];

  std::vector<NodeIndex> out;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    for (int off : offsets) {
      if (off == 0) continue;
      NodeIndex nb = center;
      (axis == 0 ? nb.i : nb.j) += off;
      if (!grid.contains(nb))
        throw ValidationError("stencil_arm_crossings: offset leaves the grid");
      const std::int64_t lin = grid.linear_index(nb);
      const Region theirs = cls.per_node[lin];
      if (theirs == Region::Boundary || theirs == mine) continue;
      out.push_back(nb);
    }
  }
  return out;
}

}  // namespace modesub
