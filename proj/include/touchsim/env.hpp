#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "touchsim/geometry.hpp"
#include "touchsim/hand.hpp"
#include "touchsim/mesh.hpp"

namespace touchsim {

// Bump the suffix whenever observable behaviour changes.
inline constexpr const char* kEnvId = "SenseNetTouch-v0";
inline constexpr int kActionCount = 27;
inline constexpr int kDefaultMaxSteps = 500;

// Action codes:
//   0..19  joint increment, code = finger * 4 + joint * 2 + direction
//          (direction 0 = +joint_step, 1 = -joint_step)
//   20..25 base translation +x, -x, +y, -y, +z, -z
//   26     no-op
namespace action {
inline constexpr int kBasePlusX = 20;
inline constexpr int kBaseMinusX = 21;
inline constexpr int kBasePlusY = 22;
inline constexpr int kBaseMinusY = 23;
inline constexpr int kBasePlusZ = 24;
inline constexpr int kBaseMinusZ = 25;
inline constexpr int kNoOp = 26;
}  // namespace action

struct JointMove {
  std::size_t finger;
  std::size_t joint;
  int sign;
  friend bool operator==(const JointMove&, const JointMove&) = default;
};
struct BaseMove {
  int axis;
  int sign;
  friend bool operator==(const BaseMove&, const BaseMove&) = default;
};
struct NoOp {
  friend bool operator==(const NoOp&, const NoOp&) = default;
};
using Motion = std::variant<JointMove, BaseMove, NoOp>;

// Throws EnvError("invalid_action") outside [0, 26].
Motion decode_action(int code);
int encode_action(const Motion& motion);

class EnvError : public std::runtime_error {
 public:
  EnvError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  // Machine-readable: no_episode, episode_done, invalid_action, unknown_label,
  // no_ground_truth, invalid_config.
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct TaxelGrid {
  std::array<std::uint8_t, kTaxelCount> cells{};

  std::uint8_t at(std::size_t row, std::size_t col) const { return cells[row * kTaxelCols + col]; }
  void set(std::size_t row, std::size_t col, bool on) { cells[row * kTaxelCols + col] = on ? 1 : 0; }
  std::size_t count() const;
  bool any() const { return count() > 0; }
  friend bool operator==(const TaxelGrid&, const TaxelGrid&) = default;
};

struct Observation {
  TaxelGrid taxels;
  int step_index = 0;
  friend bool operator==(const Observation&, const Observation&) = default;
};

// A static object placed with its solid centroid at the origin.
struct SceneObject {
  std::string id;
  std::optional<std::string> class_label;  // ground truth for classification
  SpatialIndex index;
};

// Validates and recentres the mesh, then builds its index.
std::shared_ptr<const SceneObject> make_scene_object(const TriangleMesh& mesh, std::string id,
                                                     std::optional<std::string> class_label);

struct EnvConfig {
  std::shared_ptr<const SceneObject> object;
  double joint_step = 0.05;     // rad per joint action
  double base_step = 0.005;     // m per base action
  double sensor_reach = 0.0015; // m, taxel ray length
  int max_steps = kDefaultMaxSteps;
  std::uint64_t seed = 0;
  // Start: zero joint angles, sensor centre at (0, -start_distance, 0)
  // facing +y, base jittered uniformly by up to start_jitter per axis.
  double start_distance = 0.2;
  double start_jitter = 0.0;
  double touch_reward = 1.0;
  double step_penalty = 0.0;
};

// Throws EnvError("invalid_config").
void check_config(const EnvConfig& config);

struct StepInfo {
  std::size_t contact_count = 0;
  bool rejected_motion = false;
  std::string episode_id;
  std::optional<bool> correct;  // set by submit_classification
  HandState state;              // debugging only; not part of the observation
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

// One taxel per sample point: on iff a ray along the sensor normal hits the
// object within `reach`. The ray starts kGeomEps behind the sample point so a
// taxel resting exactly on the surface still reads contact.
TaxelGrid sense_taxels(const SensorFrame& sensor, const SpatialIndex& object, double reach);
TaxelGrid sense_taxels(const HandModel& model, const HandState& state, const SpatialIndex& object,
                       double reach);

// True if any taxel point or fingertip probe lies inside the object.
bool hand_penetrates(const HandPose& pose, const SpatialIndex& object);

// Single-threaded episode state machine; separate instances are independent.
class TouchEnv {
 public:
  explicit TouchEnv(HandModel model = default_hand());

  static constexpr int action_space() { return kActionCount; }
  static constexpr std::array<std::size_t, 2> observation_space() { return {kTaxelRows, kTaxelCols}; }
  static constexpr std::string_view env_id() { return kEnvId; }

  Observation reset(const EnvConfig& config);
  StepResult step(int action);
  // Ends the episode; reports correctness in info.correct.
  StepResult submit_classification(std::string_view label);

  bool active() const { return active_; }
  bool has_episode() const { return started_; }
  const HandState& state() const { return state_; }
  const HandModel& model() const { return model_; }
  const EnvConfig& config() const { return config_; }
  const Observation& last_observation() const { return last_obs_; }
  const std::string& episode_id() const { return episode_id_; }
  HandState start_state() const;

 private:
  void require_active() const;

  HandModel model_;
  EnvConfig config_;
  HandState state_;
  Observation last_obs_;
  double last_reward_ = 0.0;
  std::string episode_id_;
  std::uint64_t resets_ = 0;
  bool started_ = false;
  bool active_ = false;
};

}  // namespace touchsim
