#include "touchsim/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "touchsim/meshgen.hpp"
#include "touchsim/rng.hpp"

namespace touchsim {

Motion decode_action(int code) {
  if (code < 0 || code >= kActionCount) {
    throw EnvError("invalid_action", "action " + std::to_string(code) + " outside [0, 26]");
  }
  if (code < 20) {
    return JointMove{static_cast<std::size_t>(code / 4), static_cast<std::size_t>((code % 4) / 2),
                     code % 2 == 0 ? 1 : -1};
  }
  if (code < action::kNoOp) return BaseMove{(code - 20) / 2, code % 2 == 0 ? 1 : -1};
  return NoOp{};
}

int encode_action(const Motion& motion) {
  if (const auto* j = std::get_if<JointMove>(&motion)) {
    return static_cast<int>(j->finger * 4 + j->joint * 2) + (j->sign > 0 ? 0 : 1);
  }
  if (const auto* b = std::get_if<BaseMove>(&motion)) return 20 + b->axis * 2 + (b->sign > 0 ? 0 : 1);
  return action::kNoOp;
}

std::size_t TaxelGrid::count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

std::shared_ptr<const SceneObject> make_scene_object(const TriangleMesh& mesh, std::string id,
                                                     std::optional<std::string> class_label) {
  const ValidationReport report = validate_mesh(mesh);
  if (!report.passed()) {
    std::string msg = "object " + id + " is not a valid solid:";
    for (const auto& f : report.failures()) msg += " " + f + ";";
    throw EnvError("invalid_config", msg);
  }
  const Vec3 centroid = solid_centroid(mesh);
  return std::make_shared<const SceneObject>(
      SceneObject{std::move(id), std::move(class_label), SpatialIndex(translated(mesh, -centroid))});
}

void check_config(const EnvConfig& c) {
  auto fail = [](const std::string& what) { throw EnvError("invalid_config", what); };
  if (!c.object) fail("no object");
  if (!(c.joint_step > 0.0)) fail("joint_step must be positive");
  if (!(c.base_step > 0.0)) fail("base_step must be positive");
  if (!(c.sensor_reach > 0.0)) fail("sensor_reach must be positive");
  if (c.max_steps < 1) fail("max_steps must be >= 1");
  if (!(c.start_distance > 0.0) || !(c.start_distance < 1.0)) fail("start_distance must be in (0, 1)");
  if (!(c.start_jitter >= 0.0) || c.start_jitter > 0.1) fail("start_jitter must be in [0, 0.1]");
  if (!std::isfinite(c.touch_reward) || !std::isfinite(c.step_penalty)) fail("reward constants must be finite");
}

TaxelGrid sense_taxels(const SensorFrame& sensor, const SpatialIndex& object, double reach) {
  TaxelGrid grid;
  // Box swept by all taxel rays; if it misses the object every taxel is off.
  Aabb swept;
  for (const Vec3& c : sensor.corners) {
    swept.expand(c - sensor.normal * kGeomEps);
    swept.expand(c + sensor.normal * reach);
  }
  if (!swept.overlaps(object.bounds())) return grid;
  const double max_distance = reach + kGeomEps;
  for (std::size_t i = 0; i < kTaxelCount; ++i) {
    const Ray ray{sensor.points[i] - sensor.normal * kGeomEps, sensor.normal, max_distance};
    grid.cells[i] = object.any_hit(ray) ? 1 : 0;
  }
  return grid;
}

TaxelGrid sense_taxels(const HandModel& model, const HandState& state, const SpatialIndex& object,
                       double reach) {
  return sense_taxels(forward_kinematics(model, state).sensor, object, reach);
}

bool hand_penetrates(const HandPose& pose, const SpatialIndex& object) {
  for (const Vec3& p : fingertip_probes(pose)) {
    if (object.contains_point(p)) return true;
  }
  const SensorFrame& sensor = pose.sensor;
  Aabb patch;
  for (const Vec3& c : sensor.corners) patch.expand(c);
  if (!patch.overlaps(object.bounds())) return false;
  // A patch clear of the surface is entirely inside or entirely outside.
  if (!object.may_intersect_quad(sensor.corners)) return object.contains_point(sensor.points.front());
  return std::any_of(sensor.points.begin(), sensor.points.end(),
                     [&](const Vec3& p) { return object.contains_point(p); });
}

TouchEnv::TouchEnv(HandModel model) : model_(std::move(model)) {}

HandState TouchEnv::start_state() const {
  const Vec3 sensor_offset = forward_kinematics(model_, HandState{}).sensor.center;
  HandState start;
  start.base_position = Vec3{0.0, -config_.start_distance, 0.0} - sensor_offset;
  if (config_.start_jitter > 0.0) {
    Rng rng(mix_seed(config_.seed, hash_name("start_jitter")));
    for (int i = 0; i < 3; ++i) {
      start.base_position[i] += rng.uniform(-config_.start_jitter, config_.start_jitter);
    }
  }
  return start;
}

Observation TouchEnv::reset(const EnvConfig& config) {
  check_config(config);
  config_ = config;
  model_.sensor.ray_length = config.sensor_reach;
  const HandState start = start_state();
  if (!is_valid_state(model_, start)) throw EnvError("invalid_config", "start pose outside the workspace");
  const HandPose pose = forward_kinematics(model_, start);
  if (hand_penetrates(pose, config_.object->index)) {
    throw EnvError("invalid_config", "start pose penetrates the object");
  }
  state_ = start;
  last_obs_ = Observation{sense_taxels(pose.sensor, config_.object->index, config_.sensor_reach), 0};
  last_reward_ = 0.0;
  char id[48];
  std::snprintf(id, sizeof(id), "ep-%016llx-%llu", static_cast<unsigned long long>(config.seed),
                static_cast<unsigned long long>(resets_++));
  episode_id_ = id;
  started_ = true;
  active_ = true;
  return last_obs_;
}

void TouchEnv::require_active() const {
  if (!started_) throw EnvError("no_episode", "no episode in progress; call reset first");
  if (!active_) throw EnvError("episode_done", "episode is over; call reset to start a new one");
}

StepResult TouchEnv::step(int action_code) {
  require_active();
  const Motion motion = decode_action(action_code);

  HandState proposed = state_;
  if (const auto* j = std::get_if<JointMove>(&motion)) {
    proposed.joint_angles[j->finger * kJointsPerFinger + j->joint] += j->sign * config_.joint_step;
  } else if (const auto* b = std::get_if<BaseMove>(&motion)) {
    proposed.base_position[b->axis] += b->sign * config_.base_step;
  }
  proposed = clamp_state(model_, proposed);

  const SpatialIndex& object = config_.object->index;
  bool rejected = false;
  HandPose pose = forward_kinematics(model_, proposed);
  if (!std::holds_alternative<NoOp>(motion) && proposed != state_) {
    if (hand_penetrates(pose, object)) {
      rejected = true;
      pose = forward_kinematics(model_, state_);
    } else {
      state_ = proposed;
    }
  }

  StepResult result;
  result.observation.taxels = sense_taxels(pose.sensor, object, config_.sensor_reach);
  result.observation.step_index = last_obs_.step_index + 1;
  const std::size_t contacts = result.observation.taxels.count();
  result.reward = (contacts > 0 ? config_.touch_reward : 0.0) - config_.step_penalty;
  result.done = result.observation.step_index >= config_.max_steps;
  result.info = StepInfo{contacts, rejected, episode_id_, std::nullopt, state_};

  last_obs_ = result.observation;
  last_reward_ = result.reward;
  if (result.done) active_ = false;
  return result;
}

StepResult TouchEnv::submit_classification(std::string_view label) {
  require_active();
  if (!parse_class(label)) throw EnvError("unknown_label", "unknown class label '" + std::string(label) + "'");
  const auto& truth = config_.object->class_label;
  if (!truth) throw EnvError("no_ground_truth", "object has no class label");
  active_ = false;
  StepResult result;
  result.observation = last_obs_;
  result.reward = last_reward_;
  result.done = true;
  result.info = StepInfo{last_obs_.taxels.count(), false, episode_id_, label == *truth, state_};
  return result;
}

}  // namespace touchsim
