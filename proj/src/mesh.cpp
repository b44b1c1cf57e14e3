#include "touchsim/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace touchsim {

namespace {

double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
}

}  // namespace

double mesh_volume(const TriangleMesh& mesh) {
  double six_volume = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto [a, b, c] = mesh.corners(t);
    six_volume += det3(a, b, c);
  }
  return six_volume / 6.0;
}

Vec3 solid_centroid(const TriangleMesh& mesh) {
  double six_volume = 0.0;
  Vec3 weighted;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto [a, b, c] = mesh.corners(t);
    const double d = det3(a, b, c);
    six_volume += d;
    weighted += (a + b + c) * d;
  }
  if (six_volume == 0.0) throw std::invalid_argument("solid_centroid: zero volume");
  // Tetrahedron (0, a, b, c) has centroid (a + b + c) / 4.
  return weighted * (1.0 / (4.0 * six_volume));
}

Aabb mesh_bounds(const TriangleMesh& mesh) {
  Aabb box;
  for (const Vec3& v : mesh.vertices) box.expand(v);
  return box;
}

TriangleMesh translated(TriangleMesh mesh, const Vec3& offset) {
  for (Vec3& v : mesh.vertices) v += offset;
  return mesh;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

bool ValidationReport::passed() const {
  return triangle_count > 0 && out_of_range_indices == 0 && watertight() &&
         consistently_oriented() && degenerate_triangles == 0 && signed_volume > 0.0;
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  if (triangle_count == 0) out.emplace_back("empty mesh");
  if (out_of_range_indices > 0)
    out.push_back(std::to_string(out_of_range_indices) + " out-of-range vertex indices");
  if (boundary_edges > 0) out.push_back(std::to_string(boundary_edges) + " boundary edges");
  if (nonmanifold_edges > 0)
    out.push_back(std::to_string(nonmanifold_edges) + " non-manifold edges");
  if (inconsistent_edges > 0)
    out.push_back("inconsistent orientation on " + std::to_string(inconsistent_edges) + " edges");
  if (degenerate_triangles > 0)
    out.push_back(std::to_string(degenerate_triangles) + " degenerate triangles");
  if (triangle_count > 0 && out_of_range_indices == 0 && !(signed_volume > 0.0))
    out.push_back("non-positive signed volume " + std::to_string(signed_volume));
  return out;
}

ValidationReport validate_mesh(const TriangleMesh& mesh) {
  ValidationReport report;
  report.vertex_count = mesh.vertices.size();
  report.triangle_count = mesh.triangles.size();

  const auto n = static_cast<std::uint32_t>(mesh.vertices.size());
  for (const Triangle& tri : mesh.triangles) {
    for (std::uint32_t idx : tri) {
      if (idx >= n) ++report.out_of_range_indices;
    }
  }
  // Geometry is meaningless with dangling indices.
  if (report.out_of_range_indices > 0) return report;

  struct EdgeUse {
    std::uint32_t count = 0;
    std::uint32_t forward = 0;  // uses traversed low -> high
  };
  std::unordered_map<std::uint64_t, EdgeUse> edges;
  edges.reserve(mesh.triangles.size() * 2);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = tri[k];
      const std::uint32_t b = tri[(k + 1) % 3];
      EdgeUse& use = edges[edge_key(a, b)];
      ++use.count;
      if (a < b) ++use.forward;
    }
    const auto [p, q, r] = mesh.corners(t);
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] ||
        triangle_area(p, q, r) <= kMinTriangleArea) {
      ++report.degenerate_triangles;
    }
  }
  for (const auto& [key, use] : edges) {
    if (use.count == 1) {
      ++report.boundary_edges;
    } else if (use.count > 2) {
      ++report.nonmanifold_edges;
    } else if (use.forward != 1) {
      ++report.inconsistent_edges;
    }
  }
  report.signed_volume = mesh_volume(mesh);
  return report;
}

}  // namespace touchsim
