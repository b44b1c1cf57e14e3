#include "touchsim/hand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace touchsim {

namespace {

constexpr std::array<const char*, kFingerCount> kFingerNames = {"thumb", "index", "middle", "ring",
                                                                "pinky"};

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

}  // namespace

HandModel default_hand() {
  HandModel model;
  model.palm_size = {0.08, 0.02, 0.08};
  const double front = model.palm_size.y / 2;
  const JointLimit flex{0.0, kPi / 2};
  const double index_proximal = 0.04;
  const double index_distal = 0.03;
  struct Layout {
    Vec3 attach;
    double scale;
  };
  const std::array<Layout, kFingerCount> layout = {{
      {{-0.045, 0.0, -0.02}, 0.75},  // thumb sits low on the -x side
      {{-0.024, front, 0.0}, 1.0},
      {{-0.008, front, 0.0}, 1.1},
      {{0.008, front, 0.0}, 1.0},
      {{0.024, front, 0.0}, 0.8},
  }};
  for (std::size_t f = 0; f < kFingerCount; ++f) {
    model.fingers[f].attach = layout[f].attach;
    model.fingers[f].link_lengths = {index_proximal * layout[f].scale, index_distal * layout[f].scale};
    model.fingers[f].limits = {flex, flex};
  }
  return model;
}

bool is_valid_state(const HandModel& model, const HandState& state) {
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const JointLimit& lim = model.fingers[j / kJointsPerFinger].limits[j % kJointsPerFinger];
    const double a = state.joint_angles[j];
    if (!(a >= lim.low && a <= lim.high)) return false;
  }
  return model.workspace.contains(state.base_position);
}

void check_state(const HandModel& model, const HandState& state) {
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const JointLimit& lim = model.fingers[j / kJointsPerFinger].limits[j % kJointsPerFinger];
    const double a = state.joint_angles[j];
    if (!(a >= lim.low && a <= lim.high)) {
      throw std::invalid_argument("joint " + std::to_string(j) + " angle " + std::to_string(a) +
                                  " outside its limits");
    }
  }
  if (!model.workspace.contains(state.base_position)) {
    throw std::invalid_argument("hand base outside the workspace box");
  }
}

HandState clamp_state(const HandModel& model, HandState state) {
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const JointLimit& lim = model.fingers[j / kJointsPerFinger].limits[j % kJointsPerFinger];
    state.joint_angles[j] = std::clamp(state.joint_angles[j], lim.low, lim.high);
  }
  for (int i = 0; i < 3; ++i) {
    state.base_position[i] =
        std::clamp(state.base_position[i], model.workspace.lo[i], model.workspace.hi[i]);
  }
  return state;
}

HandPose forward_kinematics(const HandModel& model, const HandState& state) {
  check_state(model, state);
  const Vec3& base = state.base_position;
  HandPose pose;
  pose.palm = Pose{Mat3::identity(), base};

  // Chains are evaluated relative to the palm centre and translated last, so
  // moving the base moves every point by exactly the same offset.
  std::array<FingerPose, kFingerCount> rel;
  for (std::size_t f = 0; f < kFingerCount; ++f) {
    const FingerModel& fm = model.fingers[f];
    const double flex0 = state.joint_angles[f * 2];
    const double flex1 = state.joint_angles[f * 2 + 1];
    rel[f].proximal = Pose{Mat3::rotation_x(-flex0), fm.attach};
    rel[f].distal = rel[f].proximal * Pose{Mat3::rotation_x(-flex1), {0.0, fm.link_lengths[0], 0.0}};
    rel[f].tip = rel[f].distal.apply({0.0, fm.link_lengths[1], 0.0});
    pose.fingers[f] = rel[f];
    pose.fingers[f].proximal.translation += base;
    pose.fingers[f].distal.translation += base;
    pose.fingers[f].tip += base;
  }

  const FingerPose& index = rel[static_cast<std::size_t>(Finger::kIndex)];
  const SensorPatchModel& sp = model.sensor;
  SensorFrame& sf = pose.sensor;
  sf.col_axis = index.distal.rotation.column(0);
  sf.normal = index.distal.rotation.column(1);
  sf.row_axis = index.distal.rotation.column(2);
  sf.center = index.tip + base;
  const double pitch = sp.pitch();
  const double half = sp.size / 2;
  sf.points.resize(sp.rows * sp.cols);
  for (std::size_t r = 0; r < sp.rows; ++r) {
    const Vec3 row_offset = index.tip + sf.row_axis * (-half + (static_cast<double>(r) + 0.5) * pitch);
    for (std::size_t c = 0; c < sp.cols; ++c) {
      sf.points[r * sp.cols + c] =
          row_offset + sf.col_axis * (-half + (static_cast<double>(c) + 0.5) * pitch) + base;
    }
  }
  const Vec3 corner = sf.center - sf.row_axis * half - sf.col_axis * half;
  sf.corners = {corner, corner + sf.row_axis * sp.size,
                corner + sf.row_axis * sp.size + sf.col_axis * sp.size, corner + sf.col_axis * sp.size};
  return pose;
}

std::array<Vec3, 2> fingertip_probes(const HandPose& pose) {
  const FingerPose& index = pose.fingers[static_cast<std::size_t>(Finger::kIndex)];
  return {index.distal.translation, index.tip};
}

nlohmann::json hand_model_to_json(const HandModel& model) {
  nlohmann::json fingers = nlohmann::json::array();
  for (std::size_t f = 0; f < kFingerCount; ++f) {
    const FingerModel& fm = model.fingers[f];
    fingers.push_back({{"name", kFingerNames[f]},
                       {"attach", vec_json(fm.attach)},
                       {"link_lengths", fm.link_lengths},
                       {"limits", {{fm.limits[0].low, fm.limits[0].high}, {fm.limits[1].low, fm.limits[1].high}}}});
  }
  return {{"version", model.version},
          {"frame", {{"x", "across palm, thumb at -x"}, {"y", "palm-forward"}, {"z", "dorsal"}}},
          {"palm_size", vec_json(model.palm_size)},
          {"fingers", fingers},
          {"sensor",
           {{"finger", "index"},
            {"size", model.sensor.size},
            {"rows", model.sensor.rows},
            {"cols", model.sensor.cols},
            {"pitch", model.sensor.pitch()},
            {"ray_length", model.sensor.ray_length}}},
          {"workspace", {{"lo", vec_json(model.workspace.lo)}, {"hi", vec_json(model.workspace.hi)}}}};
}

}  // namespace touchsim
