#include <gtest/gtest.h>

#include "oracles.hpp"
#include "touchsim/mesh.hpp"
#include "touchsim/meshgen.hpp"

using namespace touchsim;

namespace {

TriangleMesh unit_cube() {
  MeshParams p;
  p.object_class = ObjectClass::kCube;
  p.values = {{"width", 1.0}, {"depth", 1.0}, {"height", 1.0}};
  return generate_object(p);
}

}  // namespace

TEST(MeshVolume, UnitCubeIsExactlyOne) {
  EXPECT_EQ(mesh_volume(unit_cube()), 1.0);
  EXPECT_EQ(mesh_volume(oracle::centered_cube(1.0)), 1.0);
}

TEST(MeshVolume, CornerTetrahedronIsOneSixth) {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  EXPECT_DOUBLE_EQ(mesh_volume(m), 1.0 / 6.0);
  EXPECT_TRUE(validate_mesh(m).passed());
}

TEST(MeshVolume, InvertedWindingIsNegative) {
  TriangleMesh m = unit_cube();
  for (auto& t : m.triangles) std::swap(t[1], t[2]);
  EXPECT_EQ(mesh_volume(m), -1.0);
  const auto r = validate_mesh(m);
  EXPECT_TRUE(r.watertight());
  EXPECT_TRUE(r.consistently_oriented());
  EXPECT_FALSE(r.passed());
}

TEST(MeshVolume, TranslationInvariant) {
  const TriangleMesh m = oracle::centered_cube(0.3);
  EXPECT_NEAR(mesh_volume(translated(m, {5, -2, 7})), mesh_volume(m), 1e-12);
}

TEST(SolidCentroid, OffsetBox) {
  const TriangleMesh m = oracle::box({1, 2, 3}, {3, 4, 7});
  const Vec3 c = solid_centroid(m);
  EXPECT_NEAR(c.x, 2.0, 1e-12);
  EXPECT_NEAR(c.y, 3.0, 1e-12);
  EXPECT_NEAR(c.z, 5.0, 1e-12);
}

TEST(ValidateMesh, GeneratedCubePasses) {
  const TriangleMesh m = unit_cube();
  EXPECT_EQ(m.vertices.size(), 8u);
  EXPECT_EQ(m.triangles.size(), 12u);
  const auto r = validate_mesh(m);
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(r.failures().empty());
}

TEST(ValidateMesh, DeletedTriangleLeavesThreeBoundaryEdges) {
  TriangleMesh m = unit_cube();
  m.triangles.pop_back();
  const auto r = validate_mesh(m);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.boundary_edges, 3u);
  EXPECT_FALSE(r.failures().empty());
}

TEST(ValidateMesh, FlippedTriangleIsInconsistent) {
  TriangleMesh m = unit_cube();
  std::swap(m.triangles[4][1], m.triangles[4][2]);
  const auto r = validate_mesh(m);
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.consistently_oriented());
  EXPECT_EQ(r.inconsistent_edges, 3u);
  EXPECT_TRUE(r.watertight());
}

TEST(ValidateMesh, OutOfRangeIndex) {
  TriangleMesh m = unit_cube();
  m.triangles[0][0] = 99;
  const auto r = validate_mesh(m);
  EXPECT_EQ(r.out_of_range_indices, 1u);
  EXPECT_FALSE(r.passed());
}

TEST(ValidateMesh, DegenerateTriangle) {
  TriangleMesh m = unit_cube();
  // Collapse one corner onto another: several triangles lose their area.
  m.vertices[1] = m.vertices[0];
  const auto r = validate_mesh(m);
  EXPECT_GT(r.degenerate_triangles, 0u);
  EXPECT_FALSE(r.passed());
}

TEST(ValidateMesh, NonManifoldEdge) {
  TriangleMesh m = unit_cube();
  const Triangle extra = m.triangles[0];
  m.triangles.push_back(extra);
  std::swap(m.triangles.back()[1], m.triangles.back()[2]);
  m.triangles.push_back(extra);
  EXPECT_GT(validate_mesh(m).nonmanifold_edges, 0u);
}

TEST(ValidateMesh, EmptyMeshFails) {
  const auto r = validate_mesh(TriangleMesh{});
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.failures().empty());
}

TEST(MeshBounds, MatchesBox) {
  const Aabb b = mesh_bounds(oracle::box({-1, 0, 2}, {1, 3, 4}));
  EXPECT_EQ(b.lo, (Vec3{-1, 0, 2}));
  EXPECT_EQ(b.hi, (Vec3{1, 3, 4}));
}
