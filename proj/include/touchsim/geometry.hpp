#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "touchsim/math.hpp"
#include "touchsim/mesh.hpp"

namespace touchsim {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length within kGeomEps
  double max_distance;
};

struct Hit {
  double distance;
  std::uint32_t triangle;
  Vec3 point;
  Vec3 normal;  // unit, outward by winding
};

struct SurfacePoint {
  double distance;
  std::uint32_t triangle;
  Vec3 point;
};

// Axis-aligned bounding-box tree over a watertight mesh. Median split of
// triangle centroids on the node's longest axis, at most four triangles per
// leaf. Immutable after construction, so concurrent queries are safe.
class SpatialIndex {
 public:
  static constexpr std::size_t kMaxLeafSize = 4;

  struct Node {
    Aabb box;
    std::uint32_t first = 0;  // leaf: offset into triangle order; inner: left child
    std::uint32_t count = 0;  // 0 for inner nodes, whose right child is first + 1
    bool leaf() const { return count > 0; }
  };

  // Throws std::invalid_argument if the mesh fails validate_mesh.
  explicit SpatialIndex(TriangleMesh mesh);

  const TriangleMesh& mesh() const { return mesh_; }
  const Aabb& bounds() const { return nodes_.front().box; }
  std::span<const Node> nodes() const { return nodes_; }
  // Triangle ids in leaf order; a leaf owns order()[first, first + count).
  std::span<const std::uint32_t> order() const { return order_; }

  // Nearest hit within max_distance; equal distances go to the lowest
  // triangle index. Throws std::invalid_argument for a malformed ray.
  std::optional<Hit> raycast(const Ray& ray) const;
  // True iff raycast would return a hit.
  bool any_hit(const Ray& ray) const;

  // Closest surface point if it lies within search_radius.
  std::optional<SurfacePoint> distance_to_surface(const Vec3& point, double search_radius) const;

  // Crossing-parity containment. Points within kGeomEps of the surface count
  // as outside.
  bool contains_point(const Vec3& point) const;
  // Parity along one direction, or nullopt if the ray grazes an edge, a
  // vertex, or a triangle plane.
  std::optional<bool> contains_point_along(const Vec3& point, const Vec3& direction) const;
  // Fixed sequence of parity directions tried by contains_point.
  static std::span<const Vec3> parity_directions();

  // Conservative: false guarantees the planar convex quad stays farther than
  // kGeomEps from every triangle.
  bool may_intersect_quad(const std::array<Vec3, 4>& quad) const;

  void triangles_overlapping(const Aabb& box, std::vector<std::uint32_t>& out) const;

 private:
  struct TriangleData {
    Vec3 a, e1, e2;  // a, b - a, c - a
  };

  void build(std::uint32_t node, std::uint32_t begin, std::uint32_t end,
             const std::vector<Vec3>& centroids);
  double winding_number(const Vec3& point) const;

  TriangleMesh mesh_;
  std::vector<TriangleData> tris_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

SpatialIndex build_index(TriangleMesh mesh);

// Closest point on triangle abc to p (Voronoi-region method).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace touchsim
