#include "touchsim/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "touchsim/rng.hpp"

namespace touchsim {

namespace {

constexpr std::array<ObjectClass, kClassCount> kAllClasses = {
    ObjectClass::kCup,    ObjectClass::kCube,   ObjectClass::kMissile, ObjectClass::kVase,
    ObjectClass::kPyramid, ObjectClass::kCylinder, ObjectClass::kPlate, ObjectClass::kBowl,
    ObjectClass::kPencil, ObjectClass::kBottle, ObjectClass::kSphere, ObjectClass::kSpoon,
    ObjectClass::kHammer,
};

constexpr std::array<std::string_view, kClassCount> kClassNames = {
    "cup", "cube", "missile", "vase", "pyramid", "cylinder", "plate",
    "bowl", "pencil", "bottle", "sphere", "spoon", "hammer",
};

// Lengths in meters. Valid ranges are loose physical limits; sample ranges keep
// every object inside a 0.3 m box.
constexpr ParamSpec kCubeParams[] = {
    {"width", 1e-3, 10.0, 0.04, 0.14},
    {"depth", 1e-3, 10.0, 0.04, 0.14},
    {"height", 1e-3, 10.0, 0.04, 0.14},
};
constexpr ParamSpec kPyramidParams[] = {
    {"base", 1e-3, 10.0, 0.05, 0.14},
    {"height", 1e-3, 10.0, 0.04, 0.14},
};
constexpr ParamSpec kPencilParams[] = {
    {"radius", 1e-3, 1.0, 0.003, 0.006},
    {"length", 1e-2, 10.0, 0.12, 0.19},
    {"tip_length", 1e-3, 1.0, 0.015, 0.03},
};
constexpr ParamSpec kSpoonParams[] = {
    {"length", 1e-2, 10.0, 0.12, 0.2},
    {"head_length", 1e-3, 1.0, 0.04, 0.07},
    {"head_width", 1e-3, 1.0, 0.025, 0.045},
    {"handle_width", 1e-3, 1.0, 0.008, 0.014},
    {"thickness", 1e-3, 1.0, 0.003, 0.008},
    {"segments", 3, 512, 12, 32, true},
};
constexpr ParamSpec kHammerParams[] = {
    {"handle_width", 1e-3, 1.0, 0.015, 0.03},
    {"handle_depth", 1e-3, 1.0, 0.012, 0.025},
    {"handle_length", 1e-2, 10.0, 0.15, 0.22},
    {"head_length", 1e-3, 1.0, 0.08, 0.13},
    {"head_depth", 1e-3, 1.0, 0.03, 0.04},
    {"head_height", 1e-3, 1.0, 0.025, 0.04},
};
constexpr ParamSpec kSphereParams[] = {
    {"radius", 1e-3, 10.0, 0.02, 0.1},
    {"segments", 4, 1024, 16, 48, true},
};
constexpr ParamSpec kCylinderParams[] = {
    {"radius", 1e-3, 10.0, 0.015, 0.06},
    {"height", 1e-3, 10.0, 0.05, 0.2},
    {"segments", 3, 1024, 16, 48, true},
};
constexpr ParamSpec kCupParams[] = {
    {"outer_radius", 1e-3, 10.0, 0.03, 0.05},
    {"wall", 1e-4, 1.0, 0.002, 0.006},
    {"height", 1e-3, 10.0, 0.06, 0.12},
    {"segments", 3, 1024, 16, 48, true},
};
constexpr ParamSpec kBowlParams[] = {
    {"radius", 1e-3, 10.0, 0.05, 0.1},
    {"wall", 1e-4, 1.0, 0.003, 0.008},
    {"segments", 8, 1024, 16, 48, true},
};
constexpr ParamSpec kVaseParams[] = {
    {"base_radius", 1e-3, 10.0, 0.03, 0.06},
    {"height", 1e-2, 10.0, 0.12, 0.25},
    {"wave_amplitude", 0.0, 0.5, 0.1, 0.35},
    {"neck_ratio", 0.2, 1.0, 0.4, 0.7},
    {"wall", 1e-4, 1.0, 0.003, 0.006},
    {"segments", 3, 1024, 16, 48, true},
};
constexpr ParamSpec kPlateParams[] = {
    {"radius", 1e-3, 10.0, 0.08, 0.14},
    {"thickness", 1e-4, 1.0, 0.003, 0.006},
    {"rim_height", 1e-4, 1.0, 0.01, 0.025},
    {"foot_ratio", 0.1, 0.95, 0.5, 0.75},
    {"segments", 3, 1024, 24, 64, true},
};
constexpr ParamSpec kBottleParams[] = {
    {"radius", 1e-3, 10.0, 0.025, 0.045},
    {"height", 1e-2, 10.0, 0.15, 0.28},
    {"neck_radius", 1e-4, 10.0, 0.008, 0.015},
    {"neck_length", 1e-3, 10.0, 0.02, 0.05},
    {"body_fraction", 0.1, 0.95, 0.55, 0.75},
    {"segments", 3, 1024, 16, 48, true},
};
constexpr ParamSpec kMissileParams[] = {
    {"radius", 1e-3, 10.0, 0.01, 0.03},
    {"body_length", 1e-3, 10.0, 0.08, 0.2},
    {"nose_length", 1e-3, 10.0, 0.02, 0.06},
    {"segments", 3, 1024, 12, 32, true},
};

std::invalid_argument param_error(const MeshParams& p, const std::string& what) {
  return std::invalid_argument(std::string(class_name(p.object_class)) + ": " + what);
}

void require(bool ok, const MeshParams& p, const std::string& what) {
  if (!ok) throw param_error(p, what);
}

// --- revolution helpers ---------------------------------------------------

double orient2d(const ProfilePoint& a, const ProfilePoint& b, const ProfilePoint& c) {
  return (b.radius - a.radius) * (c.z - a.z) - (b.z - a.z) * (c.radius - a.radius);
}

bool on_segment(const ProfilePoint& a, const ProfilePoint& b, const ProfilePoint& p) {
  return std::min(a.radius, b.radius) <= p.radius && p.radius <= std::max(a.radius, b.radius) &&
         std::min(a.z, b.z) <= p.z && p.z <= std::max(a.z, b.z);
}

// Closed-segment intersection including touching and collinear overlap.
bool segments_touch(const ProfilePoint& a, const ProfilePoint& b, const ProfilePoint& c,
                    const ProfilePoint& d) {
  const double o1 = orient2d(a, b, c);
  const double o2 = orient2d(a, b, d);
  const double o3 = orient2d(c, d, a);
  const double o4 = orient2d(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return true;
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
         (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

void check_profile(std::span<const ProfilePoint> profile, int segments) {
  if (segments < 3) throw std::invalid_argument("revolve_profile: segments must be >= 3");
  if (profile.size() < 2) throw std::invalid_argument("revolve_profile: need >= 2 profile points");
  for (const ProfilePoint& p : profile) {
    if (!(p.radius >= 0.0)) throw std::invalid_argument("revolve_profile: negative radius");
    if (!std::isfinite(p.radius) || !std::isfinite(p.z))
      throw std::invalid_argument("revolve_profile: non-finite profile point");
  }
  if (profile.front().radius != 0.0 || profile.back().radius != 0.0)
    throw std::invalid_argument("revolve_profile: profile endpoints must lie on the axis");
  if (profile.size() < 3)
    throw std::invalid_argument("revolve_profile: profile encloses no area");
  for (std::size_t i = 1; i + 1 < profile.size(); ++i) {
    if (profile[i].radius <= 0.0)
      throw std::invalid_argument("revolve_profile: interior profile point on the axis");
  }

  // Closed polygon: profile edges plus the axis edge from back() to front().
  const std::size_t n = profile.size();
  auto vertex = [&](std::size_t i) { return profile[i % n]; };
  for (std::size_t i = 0; i < n; ++i) {
    const ProfilePoint a = vertex(i);
    const ProfilePoint b = vertex(i + 1);
    if (a.radius == b.radius && a.z == b.z)
      throw std::invalid_argument("revolve_profile: repeated profile point");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const ProfilePoint a = vertex(i), b = vertex(i + 1);
      const ProfilePoint c = vertex(j), d = vertex(j + 1);
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Shared endpoint is fine; folding back along the same line is not.
        const ProfilePoint& shared = (j == i + 1) ? b : a;
        const ProfilePoint& p = (j == i + 1) ? a : b;
        const ProfilePoint& q = (j == i + 1) ? d : c;
        const double dp = (p.radius - shared.radius) * (q.radius - shared.radius) +
                          (p.z - shared.z) * (q.z - shared.z);
        if (orient2d(p, shared, q) == 0.0 && dp > 0.0)
          throw std::invalid_argument("revolve_profile: profile folds back on itself");
        continue;
      }
      if (segments_touch(a, b, c, d))
        throw std::invalid_argument("revolve_profile: profile self-intersects");
    }
  }
}

double profile_signed_area(std::span<const ProfilePoint> profile) {
  double twice = 0.0;
  const std::size_t n = profile.size();
  for (std::size_t i = 0; i < n; ++i) {
    const ProfilePoint& a = profile[i];
    const ProfilePoint& b = profile[(i + 1) % n];
    twice += a.radius * b.z - b.radius * a.z;
  }
  return 0.5 * twice;
}

// --- prism helpers ----------------------------------------------------------

void add_quad(TriangleMesh& m, std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
  m.triangles.push_back({a, b, c});
  m.triangles.push_back({a, c, d});
}

TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.push_back({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z});
  }
  add_quad(m, 0, 2, 3, 1);  // -z
  add_quad(m, 4, 5, 7, 6);  // +z
  add_quad(m, 0, 1, 5, 4);  // -y
  add_quad(m, 2, 6, 7, 3);  // +y
  add_quad(m, 0, 4, 6, 2);  // -x
  add_quad(m, 1, 3, 7, 5);  // +x
  return m;
}

// Extrudes a polygon (counter-clockwise in xy, star-shaped about `center`)
// from z0 to z1. The top is either a flat fan cap or a pyramid tip.
TriangleMesh extrude_star(std::span<const std::array<double, 2>> outline,
                          std::array<double, 2> center, double z0, double z1,
                          std::optional<double> apex_height) {
  TriangleMesh m;
  const auto n = static_cast<std::uint32_t>(outline.size());
  for (const auto& p : outline) m.vertices.push_back({p[0], p[1], z0});
  for (const auto& p : outline) m.vertices.push_back({p[0], p[1], z1});
  const std::uint32_t bottom_center = 2 * n;
  const std::uint32_t top_center = 2 * n + 1;
  m.vertices.push_back({center[0], center[1], z0});
  m.vertices.push_back({center[0], center[1], apex_height ? z1 + *apex_height : z1});
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    m.triangles.push_back({bottom_center, j, i});
    add_quad(m, i, j, n + j, n + i);
    m.triangles.push_back({top_center, n + i, n + j});
  }
  return m;
}

// --- class recipes ----------------------------------------------------------

int segments_of(const MeshParams& p) { return static_cast<int>(p.get("segments")); }

TriangleMesh make_cube(const MeshParams& p) {
  const Vec3 half{p.get("width") / 2, p.get("depth") / 2, p.get("height") / 2};
  return make_box(-half, half);
}

TriangleMesh make_pyramid(const MeshParams& p) {
  const double h = p.get("base") / 2;
  TriangleMesh m;
  m.vertices = {{-h, -h, 0}, {h, -h, 0}, {h, h, 0}, {-h, h, 0}, {0, 0, p.get("height")}};
  m.triangles = {{0, 2, 1}, {0, 3, 2}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  return m;
}

TriangleMesh make_pencil(const MeshParams& p) {
  const double r = p.get("radius");
  const double length = p.get("length");
  const double tip = p.get("tip_length");
  require(tip < length, p, "tip_length must be shorter than length");
  std::array<std::array<double, 2>, 6> hex;
  for (int k = 0; k < 6; ++k) {
    const double a = kPi / 3.0 * k;
    hex[k] = {r * std::cos(a), r * std::sin(a)};
  }
  return extrude_star(hex, {0.0, 0.0}, 0.0, length - tip, tip);
}

TriangleMesh make_spoon(const MeshParams& p) {
  const double a = p.get("head_length") / 2;
  const double b = p.get("head_width") / 2;
  const double w = p.get("handle_width") / 2;
  const double t = p.get("thickness");
  const int segments = segments_of(p);
  require(w < b, p, "handle_width must be narrower than head_width");
  const double alpha = std::asin(w / b);
  const double x_join = -a * std::cos(alpha);
  const double x_end = x_join - (p.get("length") - a + x_join);
  require(x_end < x_join, p, "length too short for the head");

  // Counter-clockwise outline: handle bottom edge, head ellipse, handle top edge.
  std::vector<std::array<double, 2>> outline;
  outline.push_back({x_end, -w});
  outline.push_back({x_join, -w});
  const double phi0 = kPi + alpha;
  const double phi1 = 3.0 * kPi - alpha;
  for (int k = 1; k < segments; ++k) {
    const double phi = phi0 + (phi1 - phi0) * k / segments;
    outline.push_back({a * std::cos(phi), b * std::sin(phi)});
  }
  outline.push_back({x_join, w});
  outline.push_back({x_end, w});

  TriangleMesh m = extrude_star(outline, {x_join / 2, 0.0}, -t / 2, t / 2, std::nullopt);
  // Stand the spoon up: rotate +90 degrees about x so its bowl faces -y.
  for (Vec3& v : m.vertices) v = {v.x, -v.z, v.y};
  return m;
}

TriangleMesh make_hammer(const MeshParams& p) {
  const double hw = p.get("handle_width") / 2, hd = p.get("handle_depth") / 2;
  const double length = p.get("handle_length");
  const double HW = p.get("head_length") / 2, HD = p.get("head_depth") / 2;
  const double top = length + p.get("head_height");
  require(HW > hw && HD > hd, p, "head must overhang the handle on all sides");

  TriangleMesh m;
  auto ring = [&](double x, double y, double z) {
    m.vertices.push_back({-x, -y, z});
    m.vertices.push_back({x, -y, z});
    m.vertices.push_back({x, y, z});
    m.vertices.push_back({-x, y, z});
  };
  ring(hw, hd, 0.0);     // 0..3 handle bottom
  ring(hw, hd, length);  // 4..7 welded interface
  ring(HW, HD, length);  // 8..11 head underside
  ring(HW, HD, top);     // 12..15 head top
  add_quad(m, 0, 3, 2, 1);
  for (std::uint32_t i = 0; i < 4; ++i) {
    const std::uint32_t j = (i + 1) % 4;
    add_quad(m, i, j, 4 + j, 4 + i);
    add_quad(m, 8 + i, 4 + i, 4 + j, 8 + j);
    add_quad(m, 8 + i, 8 + j, 12 + j, 12 + i);
  }
  add_quad(m, 12, 13, 14, 15);
  return m;
}

TriangleMesh make_sphere(const MeshParams& p) {
  const double r = p.get("radius");
  const int segments = segments_of(p);
  const int rings = std::max(2, segments / 2);
  std::vector<ProfilePoint> profile;
  for (int k = 0; k <= rings; ++k) {
    const double phi = kPi * k / rings;
    const bool pole = (k == 0 || k == rings);
    profile.push_back({pole ? 0.0 : r * std::sin(phi), -r * std::cos(phi)});
  }
  return revolve_profile(profile, segments);
}

TriangleMesh make_cylinder(const MeshParams& p) {
  const double r = p.get("radius"), h = p.get("height");
  const ProfilePoint profile[] = {{0, 0}, {r, 0}, {r, h}, {0, h}};
  return revolve_profile(profile, segments_of(p));
}

TriangleMesh make_cup(const MeshParams& p) {
  const double r = p.get("outer_radius"), w = p.get("wall"), h = p.get("height");
  require(w < r, p, "wall must be thinner than outer_radius");
  require(w < h, p, "wall must be thinner than height");
  const ProfilePoint profile[] = {{0, 0}, {r, 0}, {r, h}, {r - w, h}, {r - w, w}, {0, w}};
  return revolve_profile(profile, segments_of(p));
}

TriangleMesh make_bowl(const MeshParams& p) {
  const double r = p.get("radius"), w = p.get("wall");
  const int segments = segments_of(p);
  require(w < r, p, "wall must be thinner than radius");
  const int quarter = std::max(4, segments / 4);
  std::vector<ProfilePoint> profile;
  // Outer arc about (0, r) from the bottom pole up to the rim, then back down inside.
  for (int k = 0; k <= quarter; ++k) {
    const double phi = kPi / 2 * k / quarter;
    profile.push_back({k == 0 ? 0.0 : r * std::sin(phi), r - r * std::cos(phi)});
  }
  const double ri = r - w;
  for (int k = quarter; k >= 0; --k) {
    const double phi = kPi / 2 * k / quarter;
    profile.push_back({k == 0 ? 0.0 : ri * std::sin(phi), r - ri * std::cos(phi)});
  }
  return revolve_profile(profile, segments);
}

TriangleMesh make_vase(const MeshParams& p) {
  const double r0 = p.get("base_radius"), h = p.get("height");
  const double amp = p.get("wave_amplitude"), neck = p.get("neck_ratio");
  const double w = p.get("wall");
  const double floor = 2 * w;
  require(floor < h, p, "wall too thick for height");
  auto outer = [&](double s) {
    return r0 * (1.0 + amp * std::sin(2.0 * kPi * s)) * (1.0 - (1.0 - neck) * s);
  };
  require(r0 * (1.0 - amp) * neck > w, p, "wall must be thinner than the narrowest radius");

  constexpr int kSamples = 24;
  std::vector<ProfilePoint> profile{{0.0, 0.0}};
  for (int k = 0; k <= kSamples; ++k) {
    const double s = static_cast<double>(k) / kSamples;
    profile.push_back({outer(s), h * s});
  }
  for (int k = kSamples; k >= 0; --k) {
    const double z = floor + (h - floor) * k / kSamples;
    profile.push_back({outer(z / h) - w, z});
  }
  profile.push_back({0.0, floor});
  return revolve_profile(profile, segments_of(p));
}

TriangleMesh make_plate(const MeshParams& p) {
  const double r = p.get("radius"), t = p.get("thickness");
  const double rim = p.get("rim_height"), foot = r * p.get("foot_ratio");
  const ProfilePoint profile[] = {{0, 0}, {foot, 0}, {r, rim}, {r, rim + t}, {foot, t}, {0, t}};
  return revolve_profile(profile, segments_of(p));
}

TriangleMesh make_bottle(const MeshParams& p) {
  const double r = p.get("radius"), h = p.get("height");
  const double rn = p.get("neck_radius"), neck = p.get("neck_length");
  require(rn < r, p, "neck_radius must be smaller than radius");
  require(neck < h, p, "neck_length must be shorter than height");
  const double z_neck = h - neck;
  const double z_body = p.get("body_fraction") * z_neck;

  constexpr int kShoulder = 6;
  std::vector<ProfilePoint> profile{{0, 0}, {r, 0}, {r, z_body}};
  for (int k = 1; k <= kShoulder; ++k) {
    const double u = static_cast<double>(k) / kShoulder;
    profile.push_back({rn + (r - rn) * 0.5 * (1.0 + std::cos(kPi * u)),
                       z_body + u * (z_neck - z_body)});
  }
  profile.push_back({rn, h});
  profile.push_back({0, h});
  return revolve_profile(profile, segments_of(p));
}

TriangleMesh make_missile(const MeshParams& p) {
  const double r = p.get("radius"), body = p.get("body_length"), nose = p.get("nose_length");
  const ProfilePoint profile[] = {{0, 0}, {r, 0}, {r, body}, {0, body + nose}};
  return revolve_profile(profile, segments_of(p));
}

}  // namespace

std::span<const ObjectClass> all_classes() { return kAllClasses; }

std::string_view class_name(ObjectClass cls) { return kClassNames[static_cast<std::size_t>(cls)]; }

std::optional<ObjectClass> parse_class(std::string_view name) {
  for (std::size_t i = 0; i < kClassCount; ++i) {
    if (kClassNames[i] == name) return kAllClasses[i];
  }
  return std::nullopt;
}

ObjectClass class_from_name(std::string_view name) {
  if (auto cls = parse_class(name)) return *cls;
  throw std::invalid_argument("unknown object class '" + std::string(name) + "'");
}

std::span<const ParamSpec> param_specs(ObjectClass cls) {
  switch (cls) {
    case ObjectClass::kCup: return kCupParams;
    case ObjectClass::kCube: return kCubeParams;
    case ObjectClass::kMissile: return kMissileParams;
    case ObjectClass::kVase: return kVaseParams;
    case ObjectClass::kPyramid: return kPyramidParams;
    case ObjectClass::kCylinder: return kCylinderParams;
    case ObjectClass::kPlate: return kPlateParams;
    case ObjectClass::kBowl: return kBowlParams;
    case ObjectClass::kPencil: return kPencilParams;
    case ObjectClass::kBottle: return kBottleParams;
    case ObjectClass::kSphere: return kSphereParams;
    case ObjectClass::kSpoon: return kSpoonParams;
    case ObjectClass::kHammer: return kHammerParams;
  }
  throw std::invalid_argument("unknown object class");
}

double MeshParams::get(std::string_view name) const {
  auto it = values.find(std::string(name));
  if (it == values.end()) {
    throw std::invalid_argument(std::string(class_name(object_class)) + ": missing parameter '" +
                                std::string(name) + "'");
  }
  return it->second;
}

void check_params(const MeshParams& params) {
  const auto specs = param_specs(params.object_class);
  for (const ParamSpec& spec : specs) {
    const double v = params.get(spec.name);
    require(std::isfinite(v) && v >= spec.valid_min && v <= spec.valid_max, params,
            "parameter '" + std::string(spec.name) + "' = " + std::to_string(v) +
                " outside [" + std::to_string(spec.valid_min) + ", " +
                std::to_string(spec.valid_max) + "]");
    require(!spec.integral || v == std::floor(v), params,
            "parameter '" + std::string(spec.name) + "' must be an integer");
  }
  for (const auto& [name, value] : params.values) {
    const bool known = std::any_of(specs.begin(), specs.end(),
                                   [&](const ParamSpec& s) { return s.name == name; });
    require(known, params, "unexpected parameter '" + name + "'");
  }
}

MeshParams sample_params(ObjectClass cls, std::uint64_t seed) {
  MeshParams params;
  params.object_class = cls;
  params.seed = seed;
  Rng rng(mix_seed(seed, hash_name(class_name(cls))));
  for (const ParamSpec& spec : param_specs(cls)) {
    double v;
    if (spec.integral) {
      v = static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(std::ceil(spec.sample_min)),
                                              static_cast<std::int64_t>(std::floor(spec.sample_max))));
    } else {
      v = rng.uniform(spec.sample_min, spec.sample_max);
    }
    params.values.emplace(spec.name, v);
  }
  return params;
}

TriangleMesh revolve_profile(std::span<const ProfilePoint> profile, int segments) {
  check_profile(profile, segments);
  const bool flip = profile_signed_area(profile) < 0.0;
  const std::size_t n = profile.size();
  const auto seg = static_cast<std::uint32_t>(segments);

  TriangleMesh m;
  std::vector<double> cos_t(seg), sin_t(seg);
  for (std::uint32_t j = 0; j < seg; ++j) {
    const double theta = 2.0 * kPi * j / segments;
    cos_t[j] = std::cos(theta);
    sin_t[j] = std::sin(theta);
  }
  // Vertex layout: first pole, one ring per interior point, last pole.
  m.vertices.push_back({0.0, 0.0, profile.front().z});
  for (std::size_t i = 1; i + 1 < n; ++i) {
    for (std::uint32_t j = 0; j < seg; ++j) {
      m.vertices.push_back({profile[i].radius * cos_t[j], profile[i].radius * sin_t[j], profile[i].z});
    }
  }
  m.vertices.push_back({0.0, 0.0, profile.back().z});
  const auto last_pole = static_cast<std::uint32_t>(m.vertices.size() - 1);

  auto ring_vertex = [&](std::size_t i, std::uint32_t j) -> std::uint32_t {
    if (i == 0) return 0;
    if (i == n - 1) return last_pole;
    return 1 + static_cast<std::uint32_t>(i - 1) * seg + (j % seg);
  };
  auto emit = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    if (flip) {
      m.triangles.push_back({a, c, b});
    } else {
      m.triangles.push_back({a, b, c});
    }
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::uint32_t j = 0; j < seg; ++j) {
      const std::uint32_t a = ring_vertex(i, j), b = ring_vertex(i, j + 1);
      const std::uint32_t c = ring_vertex(i + 1, j + 1), d = ring_vertex(i + 1, j);
      if (i == 0) {
        emit(a, c, d);
      } else if (i + 1 == n - 1) {
        emit(a, b, c);
      } else {
        emit(a, b, c);
        emit(a, c, d);
      }
    }
  }
  return m;
}

TriangleMesh generate_object(const MeshParams& params) {
  check_params(params);
  switch (params.object_class) {
    case ObjectClass::kCup: return make_cup(params);
    case ObjectClass::kCube: return make_cube(params);
    case ObjectClass::kMissile: return make_missile(params);
    case ObjectClass::kVase: return make_vase(params);
    case ObjectClass::kPyramid: return make_pyramid(params);
    case ObjectClass::kCylinder: return make_cylinder(params);
    case ObjectClass::kPlate: return make_plate(params);
    case ObjectClass::kBowl: return make_bowl(params);
    case ObjectClass::kPencil: return make_pencil(params);
    case ObjectClass::kBottle: return make_bottle(params);
    case ObjectClass::kSphere: return make_sphere(params);
    case ObjectClass::kSpoon: return make_spoon(params);
    case ObjectClass::kHammer: return make_hammer(params);
  }
  throw param_error(params, "unknown class");
}

}  // namespace touchsim
