#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "touchsim/math.hpp"

namespace touchsim {

enum class Finger { kThumb = 0, kIndex = 1, kMiddle = 2, kRing = 3, kPinky = 4 };
inline constexpr std::size_t kFingerCount = 5;
inline constexpr std::size_t kJointsPerFinger = 2;
inline constexpr std::size_t kJointCount = kFingerCount * kJointsPerFinger;

inline constexpr std::size_t kTaxelRows = 40;
inline constexpr std::size_t kTaxelCols = 40;
inline constexpr std::size_t kTaxelCount = kTaxelRows * kTaxelCols;

// Version of the frozen constants returned by default_hand().
inline constexpr const char* kHandModelVersion = "touch-hand-1";

struct JointLimit {
  double low;
  double high;
};

// Frame conventions (hand frame = world frame translated to the palm centre;
// the hand never rotates):
//   +x  across the palm, thumb on the -x side
//   +y  palm-forward: straight fingers point this way
//   +z  dorsal; flexion curls fingers toward -z
// Each finger is attach point -> metacarpal joint -> proximal link ->
// interphalangeal joint -> distal link, both joints rotating about +x.
struct FingerModel {
  Vec3 attach;  // metacarpal joint position relative to the palm centre
  std::array<double, 2> link_lengths;
  std::array<JointLimit, 2> limits;
};

// Fingertip sensor patch on the index distal link. Centred on the link tip
// and facing along the link, so at zero joint angles it faces +y.
struct SensorPatchModel {
  double size = 0.012;  // square edge (m)
  std::size_t rows = kTaxelRows;
  std::size_t cols = kTaxelCols;
  double ray_length = 0.0015;  // sensing reach along the outward normal (m)

  double pitch() const { return size / static_cast<double>(cols); }
};

struct HandModel {
  std::string version = kHandModelVersion;
  Vec3 palm_size;  // extents along x, y, z
  std::array<FingerModel, kFingerCount> fingers;
  SensorPatchModel sensor;
  Aabb workspace{{-1, -1, -1}, {1, 1, 1}};

  const FingerModel& finger(Finger f) const { return fingers[static_cast<std::size_t>(f)]; }
};

struct HandState {
  Vec3 base_position;
  std::array<double, kJointCount> joint_angles{};  // index finger * 2 + joint

  double angle(Finger f, std::size_t joint) const {
    return joint_angles[static_cast<std::size_t>(f) * kJointsPerFinger + joint];
  }
  friend bool operator==(const HandState&, const HandState&) = default;
};

// 40x40 taxel sample points in world coordinates, row-major. Row 0 is the
// palmar (-z at rest) edge, column 0 the thumb (-x) edge.
struct SensorFrame {
  std::vector<Vec3> points;
  Vec3 normal;      // outward unit normal shared by every taxel
  Vec3 row_axis;    // unit step direction from row r to r + 1
  Vec3 col_axis;    // unit step direction from column c to c + 1
  Vec3 center;
  std::array<Vec3, 4> corners;  // patch outline, counter-clockwise seen from outside
};

struct FingerPose {
  Pose proximal;  // frame at the metacarpal joint, after its rotation
  Pose distal;    // frame at the interphalangeal joint, after its rotation
  Vec3 tip;
};

struct HandPose {
  Pose palm;
  std::array<FingerPose, kFingerCount> fingers;
  SensorFrame sensor;
};

HandModel default_hand();

bool is_valid_state(const HandModel& model, const HandState& state);
// Throws std::invalid_argument when a joint or the base is out of range.
void check_state(const HandModel& model, const HandState& state);
HandState clamp_state(const HandModel& model, HandState state);

// Throws std::invalid_argument for states failing check_state.
HandPose forward_kinematics(const HandModel& model, const HandState& state);

// Points whose penetration into an object rejects a motion, besides the taxels:
// the index interphalangeal joint and the index fingertip.
std::array<Vec3, 2> fingertip_probes(const HandPose& pose);

nlohmann::json hand_model_to_json(const HandModel& model);

}  // namespace touchsim
