#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "touchsim/math.hpp"

namespace touchsim {

using Triangle = std::array<std::uint32_t, 3>;

// Indexed triangle surface in meters. Triangles wind counter-clockwise when
// seen from outside.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;

  std::size_t triangle_count() const { return triangles.size(); }
  std::array<Vec3, 3> corners(std::size_t t) const {
    const Triangle& tri = triangles[t];
    return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
  }

  friend bool operator==(const TriangleMesh&, const TriangleMesh&) = default;
};

inline constexpr double kMinTriangleArea = 1e-12;

// Sum of det(v0, v1, v2) / 6 over all triangles. Negative means inverted winding.
double mesh_volume(const TriangleMesh& mesh);

// Centroid of the enclosed solid. Requires a nonzero volume.
Vec3 solid_centroid(const TriangleMesh& mesh);

Aabb mesh_bounds(const TriangleMesh& mesh);

TriangleMesh translated(TriangleMesh mesh, const Vec3& offset);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

struct ValidationReport {
  std::size_t vertex_count = 0;
  std::size_t triangle_count = 0;
  std::size_t out_of_range_indices = 0;
  std::size_t boundary_edges = 0;      // edges used by one triangle
  std::size_t nonmanifold_edges = 0;   // edges used by three or more triangles
  std::size_t inconsistent_edges = 0;  // edges traversed twice in the same direction
  std::size_t degenerate_triangles = 0;
  double signed_volume = 0.0;

  bool watertight() const { return boundary_edges == 0 && nonmanifold_edges == 0; }
  bool consistently_oriented() const { return inconsistent_edges == 0; }
  bool passed() const;
  // Human-readable list of violated invariants; empty iff passed().
  std::vector<std::string> failures() const;
};

ValidationReport validate_mesh(const TriangleMesh& mesh);

}  // namespace touchsim
