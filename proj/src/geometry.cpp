#include "touchsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace touchsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Node boxes are padded so triangles lying on a box face are never culled.
constexpr double kBoxPad = 1e-10;
constexpr std::size_t kMaxParityDirections = 32;

// Entry/exit parameters of a ray against a box, or false on a miss.
bool ray_box(const Aabb& box, const Vec3& origin, const Vec3& dir, double t_max, double& t_enter) {
  double lo = 0.0;
  double hi = t_max;
  for (int i = 0; i < 3; ++i) {
    if (dir[i] == 0.0) {
      if (origin[i] < box.lo[i] || origin[i] > box.hi[i]) return false;
      continue;
    }
    const double inv = 1.0 / dir[i];
    double t0 = (box.lo[i] - origin[i]) * inv;
    double t1 = (box.hi[i] - origin[i]) * inv;
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
    if (lo > hi) return false;
  }
  t_enter = lo;
  return true;
}

struct RawHit {
  double t;
  double u;
  double v;
  double det;
};

// Moller-Trumbore without early outs; caller decides what counts as inside.
std::optional<RawHit> intersect_plane(const Vec3& a, const Vec3& e1, const Vec3& e2, const Vec3& origin,
                                      const Vec3& dir) {
  const Vec3 p = cross(dir, e2);
  const double det = dot(e1, p);
  if (det == 0.0) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = dot(s, p) * inv;
  const Vec3 q = cross(s, e1);
  const double v = dot(dir, q) * inv;
  const double t = dot(e2, q) * inv;
  return RawHit{t, u, v, det};
}

std::optional<double> intersect_triangle(const Vec3& a, const Vec3& e1, const Vec3& e2,
                                         const Vec3& origin, const Vec3& dir, double t_max) {
  const auto hit = intersect_plane(a, e1, e2, origin, dir);
  if (!hit) return std::nullopt;
  if (hit->u < 0.0 || hit->v < 0.0 || hit->u + hit->v > 1.0) return std::nullopt;
  if (hit->t < 0.0 || hit->t > t_max) return std::nullopt;
  return hit->t;
}

void check_ray(const Ray& ray) {
  if (!(std::abs(norm(ray.direction) - 1.0) <= kGeomEps)) {
    throw std::invalid_argument("ray direction must be unit length");
  }
  if (!(ray.max_distance > 0.0)) throw std::invalid_argument("ray max_distance must be positive");
}

std::vector<Vec3> make_parity_directions() {
  std::vector<Vec3> dirs;
  Vec3 d = normalized(Vec3{0.30901699, 0.52573111, 0.79256065});
  const Vec3 axis = normalized(Vec3{3.0, -1.0, 2.0});
  const double angle = 2.0;
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t k = 0; k < kMaxParityDirections; ++k) {
    dirs.push_back(d);
    // Rodrigues rotation about the fixed axis.
    d = d * c + cross(axis, d) * s + axis * (dot(axis, d) * (1.0 - c));
    d = normalized(d);
  }
  return dirs;
}

}  // namespace

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

SpatialIndex::SpatialIndex(TriangleMesh mesh) : mesh_(std::move(mesh)) {
  const ValidationReport report = validate_mesh(mesh_);
  if (!report.passed()) {
    std::string msg = "build_index: mesh is not a valid watertight solid:";
    for (const std::string& f : report.failures()) msg += " " + f + ";";
    throw std::invalid_argument(msg);
  }
  const auto n = static_cast<std::uint32_t>(mesh_.triangles.size());
  tris_.reserve(n);
  std::vector<Vec3> centroids(n);
  for (std::uint32_t t = 0; t < n; ++t) {
    const auto [a, b, c] = mesh_.corners(t);
    tris_.push_back({a, b - a, c - a});
    centroids[t] = (a + b + c) * (1.0 / 3.0);
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * n / kMaxLeafSize + 2);
  nodes_.emplace_back();
  build(0, 0, n, centroids);
}

void SpatialIndex::build(std::uint32_t node, std::uint32_t begin, std::uint32_t end,
                         const std::vector<Vec3>& centroids) {
  Aabb box;
  for (std::uint32_t i = begin; i < end; ++i) {
    const TriangleData& t = tris_[order_[i]];
    box.expand(t.a);
    box.expand(t.a + t.e1);
    box.expand(t.a + t.e2);
  }
  box.lo -= Vec3{kBoxPad, kBoxPad, kBoxPad};
  box.hi += Vec3{kBoxPad, kBoxPad, kBoxPad};
  nodes_[node].box = box;
  if (end - begin <= kMaxLeafSize) {
    nodes_[node].first = begin;
    nodes_[node].count = end - begin;
    return;
  }
  const int axis = box.longest_axis();
  // Full sort with an index tie-break keeps the tree identical across
  // standard library implementations.
  std::sort(order_.begin() + begin, order_.begin() + end, [&](std::uint32_t l, std::uint32_t r) {
    const double cl = centroids[l][axis], cr = centroids[r][axis];
    return cl < cr || (cl == cr && l < r);
  });
  const std::uint32_t mid = begin + (end - begin) / 2;
  const auto left = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  nodes_.emplace_back();
  nodes_[node].first = left;
  nodes_[node].count = 0;
  build(left, begin, mid, centroids);
  build(left + 1, mid, end, centroids);
}

std::optional<Hit> SpatialIndex::raycast(const Ray& ray) const {
  check_ray(ray);
  double best_t = kInf;
  std::uint32_t best_tri = 0;
  bool found = false;

  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double t_enter;
    if (!ray_box(node.box, ray.origin, ray.direction, ray.max_distance, t_enter)) continue;
    if (found && t_enter > best_t) continue;
    if (node.leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t tri = order_[i];
        const TriangleData& td = tris_[tri];
        const auto t = intersect_triangle(td.a, td.e1, td.e2, ray.origin, ray.direction, ray.max_distance);
        if (!t) continue;
        if (!found || *t < best_t || (*t == best_t && tri < best_tri)) {
          best_t = *t;
          best_tri = tri;
          found = true;
        }
      }
      continue;
    }
    // Push the far child first so the near one is popped next.
    const Node& l = nodes_[node.first];
    const Node& r = nodes_[node.first + 1];
    const double dl = squared_norm(l.box.center() - ray.origin);
    const double dr = squared_norm(r.box.center() - ray.origin);
    if (dl <= dr) {
      stack[top++] = node.first + 1;
      stack[top++] = node.first;
    } else {
      stack[top++] = node.first;
      stack[top++] = node.first + 1;
    }
  }
  if (!found) return std::nullopt;
  const TriangleData& td = tris_[best_tri];
  return Hit{best_t, best_tri, ray.origin + ray.direction * best_t, normalized(cross(td.e1, td.e2))};
}

bool SpatialIndex::any_hit(const Ray& ray) const {
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double t_enter;
    if (!ray_box(node.box, ray.origin, ray.direction, ray.max_distance, t_enter)) continue;
    if (node.leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const TriangleData& td = tris_[order_[i]];
        if (intersect_triangle(td.a, td.e1, td.e2, ray.origin, ray.direction, ray.max_distance)) {
          return true;
        }
      }
      continue;
    }
    stack[top++] = node.first;
    stack[top++] = node.first + 1;
  }
  return false;
}

std::optional<SurfacePoint> SpatialIndex::distance_to_surface(const Vec3& point, double search_radius) const {
  if (!(search_radius > 0.0)) throw std::invalid_argument("search_radius must be positive");
  double best_sq = search_radius * search_radius;
  std::optional<SurfacePoint> best;

  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.squared_distance(point) > best_sq) continue;
    if (node.leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t tri = order_[i];
        const TriangleData& td = tris_[tri];
        const Vec3 q = closest_point_on_triangle(point, td.a, td.a + td.e1, td.a + td.e2);
        const double d2 = squared_norm(q - point);
        if (d2 < best_sq || (d2 == best_sq && (!best || tri < best->triangle))) {
          best_sq = d2;
          best = SurfacePoint{0.0, tri, q};
        }
      }
      continue;
    }
    const Node& l = nodes_[node.first];
    const Node& r = nodes_[node.first + 1];
    if (l.box.squared_distance(point) <= r.box.squared_distance(point)) {
      stack[top++] = node.first + 1;
      stack[top++] = node.first;
    } else {
      stack[top++] = node.first;
      stack[top++] = node.first + 1;
    }
  }
  if (best) best->distance = std::sqrt(best_sq);
  return best;
}

std::span<const Vec3> SpatialIndex::parity_directions() {
  static const std::vector<Vec3> dirs = make_parity_directions();
  return dirs;
}

std::optional<bool> SpatialIndex::contains_point_along(const Vec3& point, const Vec3& direction) const {
  bool inside = false;
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double t_enter;
    if (!ray_box(node.box, point, direction, kInf, t_enter)) continue;
    if (!node.leaf()) {
      stack[top++] = node.first;
      stack[top++] = node.first + 1;
      continue;
    }
    for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
      const TriangleData& td = tris_[order_[i]];
      const Vec3 n = cross(td.e1, td.e2);
      const double cos_angle = dot(n, direction) / norm(n);
      const auto hit = intersect_plane(td.a, td.e1, td.e2, point, direction);
      if (std::abs(cos_angle) < kGeomEps) {
        // Ray runs (nearly) inside this triangle's plane; only safe if it
        // passes well clear of the triangle's box.
        Aabb tb;
        tb.expand(td.a);
        tb.expand(td.a + td.e1);
        tb.expand(td.a + td.e2);
        tb.lo -= Vec3{kGeomEps, kGeomEps, kGeomEps};
        tb.hi += Vec3{kGeomEps, kGeomEps, kGeomEps};
        double t;
        if (ray_box(tb, point, direction, kInf, t)) return std::nullopt;
        continue;
      }
      if (!hit) continue;
      const double w = 1.0 - hit->u - hit->v;
      const double margin = std::min({hit->u, hit->v, w});
      if (margin < -kGeomEps) continue;  // clearly outside the triangle
      if (hit->t < -kGeomEps) continue;  // clearly behind the point
      if (hit->t <= kGeomEps && margin >= -kGeomEps) {
        // The point sits on the surface: boundary counts as outside.
        return false;
      }
      if (margin <= kGeomEps) return std::nullopt;  // grazes an edge or vertex
      inside = !inside;
    }
  }
  return inside;
}

bool SpatialIndex::contains_point(const Vec3& point) const {
  if (!bounds().contains(point)) return false;
  for (const Vec3& dir : parity_directions()) {
    if (auto inside = contains_point_along(point, dir)) return *inside;
  }
  // Every direction grazed something; fall back to the winding number.
  return std::abs(winding_number(point)) > 0.5;
}

double SpatialIndex::winding_number(const Vec3& point) const {
  double total = 0.0;
  for (const TriangleData& td : tris_) {
    const Vec3 a = td.a - point;
    const Vec3 b = td.a + td.e1 - point;
    const Vec3 c = td.a + td.e2 - point;
    const double la = norm(a), lb = norm(b), lc = norm(c);
    const double numer = dot(a, cross(b, c));
    const double denom = la * lb * lc + dot(a, b) * lc + dot(b, c) * la + dot(c, a) * lb;
    total += 2.0 * std::atan2(numer, denom);
  }
  return total / (4.0 * kPi);
}

bool SpatialIndex::may_intersect_quad(const std::array<Vec3, 4>& quad) const {
  Aabb qbox;
  for (const Vec3& p : quad) qbox.expand(p);
  qbox.lo -= Vec3{kGeomEps, kGeomEps, kGeomEps};
  qbox.hi += Vec3{kGeomEps, kGeomEps, kGeomEps};
  if (!qbox.overlaps(bounds())) return false;

  std::vector<std::uint32_t> candidates;
  triangles_overlapping(qbox, candidates);
  const Vec3 qe[2] = {quad[1] - quad[0], quad[3] - quad[0]};
  const Vec3 qn = cross(qe[0], qe[1]);

  auto separated = [&](const Vec3& axis, const std::array<Vec3, 3>& tri) {
    const double len = norm(axis);
    if (len < kAlgebraEps) return false;
    double tmin = kInf, tmax = -kInf, qmin = kInf, qmax = -kInf;
    for (const Vec3& p : tri) {
      const double d = dot(p, axis);
      tmin = std::min(tmin, d);
      tmax = std::max(tmax, d);
    }
    for (const Vec3& p : quad) {
      const double d = dot(p, axis);
      qmin = std::min(qmin, d);
      qmax = std::max(qmax, d);
    }
    const double margin = kGeomEps * len;
    return tmin > qmax + margin || qmin > tmax + margin;
  };

  for (std::uint32_t tri : candidates) {
    const TriangleData& td = tris_[tri];
    const std::array<Vec3, 3> t = {td.a, td.a + td.e1, td.a + td.e2};
    const Vec3 te[3] = {td.e1, td.e2 - td.e1, -td.e2};
    const Vec3 tn = cross(td.e1, td.e2);
    bool apart = separated(tn, t) || separated(qn, t);
    for (int i = 0; i < 3 && !apart; ++i) {
      apart = separated(cross(tn, te[i]), t);
      for (int j = 0; j < 2 && !apart; ++j) apart = separated(cross(te[i], qe[j]), t);
    }
    for (int j = 0; j < 2 && !apart; ++j) apart = separated(cross(qn, qe[j]), t);
    if (!apart) return true;
  }
  return false;
}

void SpatialIndex::triangles_overlapping(const Aabb& box, std::vector<std::uint32_t>& out) const {
  out.clear();
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!node.box.overlaps(box)) continue;
    if (node.leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) out.push_back(order_[i]);
      continue;
    }
    stack[top++] = node.first + 1;
    stack[top++] = node.first;
  }
}

SpatialIndex build_index(TriangleMesh mesh) { return SpatialIndex(std::move(mesh)); }

}  // namespace touchsim
