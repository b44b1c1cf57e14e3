#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "touchsim/dataset.hpp"
#include "touchsim/env.hpp"

namespace touchsim {

// Error codes carried by {"type":"error"} responses.
namespace wire_error {
inline constexpr const char* kBadJson = "bad_json";
inline constexpr const char* kBadRequest = "bad_request";
inline constexpr const char* kUnknownObject = "unknown_object";
inline constexpr const char* kInternal = "internal";
}  // namespace wire_error

nlohmann::json spaces_message();
nlohmann::json error_message(std::string_view code, std::string_view message);
nlohmann::json observation_message(const Observation& observation, double reward, bool done,
                                   nlohmann::json info);
nlohmann::json step_message(const StepResult& result);

// Reset config on the wire. Every field is optional:
//   object        dataset object id; default picks objects[seed % count]
//   seed, max_steps, joint_step, base_step, sensor_reach, start_distance,
//   start_jitter, touch_reward, step_penalty   as in EnvConfig
// The object pointer is left empty; the session resolves "object".
EnvConfig env_config_from_json(const nlohmann::json& config);

// One environment session: parses a request line, returns exactly one
// response line (without the trailing newline). Never throws.
class Session {
 public:
  explicit Session(std::shared_ptr<const Dataset> dataset);

  std::string handle_line(std::string_view line);
  nlohmann::json handle(const nlohmann::json& request);

  bool closed() const { return closed_; }
  const TouchEnv& env() const { return env_; }

 private:
  nlohmann::json reset(const nlohmann::json& request);
  std::shared_ptr<const SceneObject> scene(const std::string& id);

  std::shared_ptr<const Dataset> dataset_;
  std::map<std::string, std::shared_ptr<const SceneObject>> scenes_;  // per session
  TouchEnv env_;
  bool closed_ = false;
};

}  // namespace touchsim
