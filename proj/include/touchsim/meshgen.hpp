#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "touchsim/mesh.hpp"

namespace touchsim {

// The launch object classes, in a fixed order.
enum class ObjectClass {
  kCup,
  kCube,
  kMissile,
  kVase,
  kPyramid,
  kCylinder,
  kPlate,
  kBowl,
  kPencil,
  kBottle,
  kSphere,
  kSpoon,
  kHammer,
};

inline constexpr std::size_t kClassCount = 13;

std::span<const ObjectClass> all_classes();
std::string_view class_name(ObjectClass cls);
std::optional<ObjectClass> parse_class(std::string_view name);
// Throws std::invalid_argument for unknown names.
ObjectClass class_from_name(std::string_view name);

// One tunable scalar of a class recipe. `valid_*` bounds what generate_object
// accepts; `sample_*` is the handheld range sample_params draws from.
struct ParamSpec {
  std::string_view name;
  double valid_min;
  double valid_max;
  double sample_min;
  double sample_max;
  bool integral = false;
};

std::span<const ParamSpec> param_specs(ObjectClass cls);

struct MeshParams {
  ObjectClass object_class = ObjectClass::kCube;
  std::map<std::string, double> values;
  std::uint64_t seed = 0;

  double get(std::string_view name) const;
  friend bool operator==(const MeshParams&, const MeshParams&) = default;
};

// Throws std::invalid_argument naming the first offending parameter.
void check_params(const MeshParams& params);

// Largest bounding-box extent allowed for sampled objects (m).
inline constexpr double kHandheldExtent = 0.3;

MeshParams sample_params(ObjectClass cls, std::uint64_t seed);

// A point of a revolution profile in the (radius, z) half-plane.
struct ProfilePoint {
  double radius;
  double z;
};

// Revolves a polyline about +z. Both endpoints must sit on the axis (radius 0)
// and close the poles; interior points must have positive radius. The closed
// profile must not self-intersect. Winding follows the profile orientation so
// the result always has positive volume.
TriangleMesh revolve_profile(std::span<const ProfilePoint> profile, int segments);

TriangleMesh generate_object(const MeshParams& params);

}  // namespace touchsim
