#include "modesub/geometry.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <vector>

#include "modesub/errors.hpp"

namespace modesub {
namespace {

TEST(UniformGridTest, LineBasics) {
  const UniformGrid g = UniformGrid::line(0.0, 2.0, 10);
  EXPECT_EQ(g.dim(), 1);
  EXPECT_EQ(g.divisions(0), 10);
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.2);
  EXPECT_EQ(g.nodes_per_axis(0), 11);
  EXPECT_EQ(g.node_count(), 11);
  EXPECT_EQ(g.coord({0, 0})[0], 0.0);
  EXPECT_NEAR(g.coord({7, 0})[0], 1.4, 1e-15);
  EXPECT_TRUE(g.on_boundary({0, 0}));
  EXPECT_TRUE(g.on_boundary({10, 0}));
  EXPECT_FALSE(g.on_boundary({5, 0}));
  EXPECT_TRUE(g.contains({10, 0}));
  EXPECT_FALSE(g.contains({11, 0}));
  EXPECT_FALSE(g.contains({5, 1}));  // no second axis in 1-D
}

TEST(UniformGridTest, SquareIndexingIsLexicographicXMajor) {
  const UniformGrid g = UniformGrid::square({-1.0, -1.0}, {1.0, 1.0}, 4);
  EXPECT_EQ(g.dim(), 2);
  EXPECT_EQ(g.node_count(), 25);
  EXPECT_EQ(g.linear_index({0, 0}), 0);
  EXPECT_EQ(g.linear_index({0, 4}), 4);
  EXPECT_EQ(g.linear_index({1, 0}), 5);
  EXPECT_EQ(g.linear_index({3, 2}), 17);
  for (std::int64_t lin = 0; lin < g.node_count(); ++lin)
    EXPECT_EQ(g.linear_index(g.node_at(lin)), lin);
  EXPECT_TRUE(g.on_boundary({0, 2}));
  EXPECT_TRUE(g.on_boundary({2, 4}));
  EXPECT_FALSE(g.on_boundary({2, 2}));
}

// The 2-D sweeps place nodes exactly on the circle x^2 + y^2 = 1/4 whenever
// N is divisible by 4; the coordinates must come out as exact IEEE values so
// the tie rule below is deterministic.
TEST(UniformGridTest, QuarterPointsAreExactOnSymmetricSquare) {
  for (int n : {20, 40, 80, 160, 320}) {
    const UniformGrid g = UniformGrid::square({-1.0, -1.0}, {1.0, 1.0}, n);
    EXPECT_EQ(g.coord({n / 4, 0})[0], -0.5) << "n=" << n;
    EXPECT_EQ(g.coord({n / 2, 0})[0], 0.0) << "n=" << n;
    EXPECT_EQ(g.coord({3 * n / 4, 0})[0], 0.5) << "n=" << n;
    EXPECT_EQ(g.coord({n, 0})[0], 1.0) << "n=" << n;
  }
}

TEST(UniformGridTest, RejectsDegenerateInput) {
  EXPECT_THROW(UniformGrid::line(0.0, 1.0, 3), ValidationError);
  EXPECT_THROW(UniformGrid::line(1.0, 1.0, 10), ValidationError);
  EXPECT_THROW(UniformGrid::line(2.0, 1.0, 10), ValidationError);
  EXPECT_THROW(UniformGrid::square({0.0, 0.0}, {1.0, 1.0}, 2), ValidationError);
}

TEST(InterfaceGeometryTest, LevelFunctionSigns) {
  const InterfaceGeometry pt = InterfaceGeometry::point(0.5);
  EXPECT_EQ(pt.dim(), 1);
  EXPECT_LT(pt.level({0.2, 0.0}), 0.0);
  EXPECT_GT(pt.level({0.8, 0.0}), 0.0);
  EXPECT_EQ(pt.level({0.5, 0.0}), 0.0);

  const InterfaceGeometry circ = InterfaceGeometry::circle({0.0, 0.0}, 0.5);
  EXPECT_EQ(circ.dim(), 2);
  EXPECT_LT(circ.level({0.1, 0.1}), 0.0);
  EXPECT_GT(circ.level({1.0, 0.0}), 0.0);
  EXPECT_EQ(circ.level({0.5, 0.0}), 0.0);
  EXPECT_EQ(circ.level({0.0, -0.5}), 0.0);

  EXPECT_THROW(InterfaceGeometry::circle({0.0, 0.0}, 0.0), ValidationError);
  EXPECT_THROW(InterfaceGeometry::circle({0.0, 0.0}, -1.0), ValidationError);
}

TEST(ClassifyNodesTest, OneDimensionalPartition) {
  const UniformGrid g = UniformGrid::line(0.0, std::numbers::pi, 20);
  const NodeClassification cls =
      classify_nodes(g, InterfaceGeometry::point(0.5));

  // Interior nodes at x = i*pi/20: i in {1,2,3} lie left of 0.5.
  EXPECT_EQ(cls.n1(), 3);
  EXPECT_EQ(cls.n2(), 16);
  EXPECT_EQ(cls.per_node[0], Region::Boundary);
  EXPECT_EQ(cls.per_node[20], Region::Boundary);
  EXPECT_EQ(cls.per_node[3], Region::Omega1);
  EXPECT_EQ(cls.per_node[4], Region::Omega2);

  // Unknown ordering: I1 first then I2, both in node order.
  EXPECT_EQ(cls.row_of[1], 0);
  EXPECT_EQ(cls.row_of[2], 1);
  EXPECT_EQ(cls.row_of[3], 2);
  EXPECT_EQ(cls.row_of[4], 3);
  EXPECT_EQ(cls.row_of[19], 18);
  EXPECT_EQ(cls.row_of[0], -1);
  EXPECT_EQ(cls.interior1, (std::vector<std::int64_t>{1, 2, 3}));
}

TEST(ClassifyNodesTest, NodeExactlyOnThePointGoesToOmega2) {
  // Node 5 of [0,1]/10 sits at exactly 0.5; the tie is exterior by rule.
  const UniformGrid g = UniformGrid::line(0.0, 1.0, 10);
  ASSERT_EQ(g.coord({5, 0})[0], 0.5);
  const NodeClassification cls =
      classify_nodes(g, InterfaceGeometry::point(0.5));
  EXPECT_EQ(cls.per_node[5], Region::Omega2);
  EXPECT_EQ(cls.n1(), 4);
}

TEST(ClassifyNodesTest, NodesExactlyOnTheCircleGoToOmega2) {
  const UniformGrid g = UniformGrid::square({-1.0, -1.0}, {1.0, 1.0}, 4);
  const NodeClassification cls =
      classify_nodes(g, InterfaceGeometry::circle({0.0, 0.0}, 0.5));
  // Interior nodes have coordinates in {-0.5, 0, 0.5}: only the origin is
  // strictly inside; the four compass nodes sit exactly on the circle.
  EXPECT_EQ(cls.n1(), 1);
  EXPECT_EQ(cls.n2(), 8);
  EXPECT_EQ(cls.per_node[g.linear_index({2, 2})], Region::Omega1);
  EXPECT_EQ(cls.per_node[g.linear_index({1, 2})], Region::Omega2);
  EXPECT_EQ(cls.per_node[g.linear_index({2, 1})], Region::Omega2);
  EXPECT_EQ(cls.per_node[g.linear_index({2, 3})], Region::Omega2);
  EXPECT_EQ(cls.per_node[g.linear_index({3, 2})], Region::Omega2);
  EXPECT_EQ(cls.row_of[g.linear_index({2, 2})], 0);
}

TEST(ClassifyNodesTest, RowOrderWithinEachSideIsLexicographic) {
  const UniformGrid g = UniformGrid::square({-1.0, -1.0}, {1.0, 1.0}, 8);
  const NodeClassification cls =
      classify_nodes(g, InterfaceGeometry::circle({0.0, 0.0}, 0.5));
  for (std::size_t i = 1; i < cls.interior1.size(); ++i)
    EXPECT_LT(cls.interior1[i - 1], cls.interior1[i]);
  for (std::size_t i = 1; i < cls.interior2.size(); ++i)
    EXPECT_LT(cls.interior2[i - 1], cls.interior2[i]);
  for (std::int64_t r = 0; r < cls.n1(); ++r)
    EXPECT_EQ(cls.row_of[cls.interior1[r]], r);
  for (std::int64_t r = 0; r < cls.n2(); ++r)
    EXPECT_EQ(cls.row_of[cls.interior2[r]], cls.n1() + r);
}

TEST(ClassifyNodesTest, RejectsMismatchedAndDegenerateInterfaces) {
  const UniformGrid line = UniformGrid::line(0.0, 1.0, 10);
  const UniformGrid square = UniformGrid::square({-1.0, -1.0}, {1.0, 1.0}, 8);

  EXPECT_THROW(classify_nodes(line, InterfaceGeometry::circle({0.5, 0.5}, 0.1)),
               DimensionMismatch);
  EXPECT_THROW(classify_nodes(square, InterfaceGeometry::point(0.5)),
               DimensionMismatch);

  // Point outside the open interval.
  EXPECT_THROW(classify_nodes(line, InterfaceGeometry::point(1.5)),
               InterfaceOutsideDomain);
  EXPECT_THROW(classify_nodes(line, InterfaceGeometry::point(0.0)),
               InterfaceOutsideDomain);
  // Circle touching the boundary.
  EXPECT_THROW(classify_nodes(square, InterfaceGeometry::circle({0.0, 0.0}, 1.0)),
               InterfaceOutsideDomain);
  EXPECT_THROW(
      classify_nodes(square, InterfaceGeometry::circle({0.6, 0.0}, 0.5)),
      InterfaceOutsideDomain);

  // Interfaces that fit inside the domain but fail to separate any interior
  // nodes: all interior nodes land on one side.
  EXPECT_THROW(classify_nodes(line, InterfaceGeometry::point(0.05)),
               InterfaceOutsideDomain);
  const UniformGrid coarse = UniformGrid::square({-1.0, -1.0}, {1.0, 1.0}, 10);
  EXPECT_THROW(
      classify_nodes(coarse, InterfaceGeometry::circle({0.1, 0.1}, 0.05)),
      InterfaceOutsideDomain);
}

TEST(StencilArmCrossingsTest, FindsCrossSideNeighborsOneDimensional) {
  const UniformGrid g = UniformGrid::line(0.0, std::numbers::pi, 20);
  const NodeClassification cls =
      classify_nodes(g, InterfaceGeometry::point(0.5));
  const std::vector<int> wide{-2, -1, 0, 1, 2};
  const std::vector<int> narrow{-1, 0, 1};

  // Node 3 is the last Omega1 node; nodes 4 and 5 lie across the interface.
  const auto from3 = stencil_arm_crossings(g, cls, {3, 0}, wide);
  ASSERT_EQ(from3.size(), 2u);
  EXPECT_EQ(from3[0], (NodeIndex{4, 0}));
  EXPECT_EQ(from3[1], (NodeIndex{5, 0}));

  // Node 4 is the first Omega2 node; nodes 2 and 3 are across.
  const auto from4 = stencil_arm_crossings(g, cls, {4, 0}, wide);
  ASSERT_EQ(from4.size(), 2u);
  EXPECT_EQ(from4[0], (NodeIndex{2, 0}));
  EXPECT_EQ(from4[1], (NodeIndex{3, 0}));

  // Deep in Omega2 nothing crosses.
  EXPECT_TRUE(stencil_arm_crossings(g, cls, {10, 0}, wide).empty());

  // Node 1's narrow stencil touches only the boundary and Omega1.
  EXPECT_TRUE(stencil_arm_crossings(g, cls, {1, 0}, narrow).empty());
}

TEST(StencilArmCrossingsTest, FindsCrossSideNeighborsPerAxisTwoDimensional) {
  const UniformGrid g = UniformGrid::square({-1.0, -1.0}, {1.0, 1.0}, 4);
  const NodeClassification cls =
      classify_nodes(g, InterfaceGeometry::circle({0.0, 0.0}, 0.5));
  const std::vector<int> narrow{-1, 0, 1};

  // The center node is the lone Omega1 node; all four arms cross (x-axis
  // neighbors first, then y-axis).
  const auto crossings = stencil_arm_crossings(g, cls, {2, 2}, narrow);
  ASSERT_EQ(crossings.size(), 4u);
  EXPECT_EQ(crossings[0], (NodeIndex{1, 2}));
  EXPECT_EQ(crossings[1], (NodeIndex{3, 2}));
  EXPECT_EQ(crossings[2], (NodeIndex{2, 1}));
  EXPECT_EQ(crossings[3], (NodeIndex{2, 3}));

  // A compass node sees the center across the interface on one arm only.
  const auto from_east = stencil_arm_crossings(g, cls, {3, 2}, narrow);
  ASSERT_EQ(from_east.size(), 1u);
  EXPECT_EQ(from_east[0], (NodeIndex{2, 2}));
}

TEST(StencilArmCrossingsTest, RejectsBoundaryCentersAndOffGridArms) {
  const UniformGrid g = UniformGrid::line(0.0, std::numbers::pi, 20);
  const NodeClassification cls =
      classify_nodes(g, InterfaceGeometry::point(0.5));
  const std::vector<int> narrow{-1, 0, 1};
  EXPECT_THROW(stencil_arm_crossings(g, cls, {0, 0}, narrow), ValidationError);
  const std::vector<int> huge{-25, 0, 25};
  EXPECT_THROW(stencil_arm_crossings(g, cls, {10, 0}, huge), ValidationError);
}

}  // namespace
}  // namespace modesub
