#include "touchsim/protocol.hpp"

#include <limits>

#include "touchsim/meshgen.hpp"
#include "touchsim/taxel_codec.hpp"

namespace touchsim {

namespace {

class RequestError : public std::runtime_error {
 public:
  RequestError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] void bad_request(const std::string& what) {
  throw RequestError(wire_error::kBadRequest, what);
}

double number_field(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) bad_request(std::string("config.") + key + " must be a number");
  return v.get<double>();
}

template <class Int>
Int integer_field(const nlohmann::json& j, const char* key, Int fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) {
      bad_request(std::string("config.") + key + " out of range");
    }
    return static_cast<Int>(u);
  }
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i < 0 && std::numeric_limits<Int>::is_signed == false) {
      bad_request(std::string("config.") + key + " must be non-negative");
    }
    if (i < static_cast<std::int64_t>(std::numeric_limits<Int>::min()) ||
        (i > 0 && static_cast<std::uint64_t>(i) > static_cast<std::uint64_t>(std::numeric_limits<Int>::max()))) {
      bad_request(std::string("config.") + key + " out of range");
    }
    return static_cast<Int>(i);
  }
  bad_request(std::string("config.") + key + " must be an integer");
}

nlohmann::json state_json(const HandState& s) {
  return {{"base", {s.base_position.x, s.base_position.y, s.base_position.z}},
          {"joints", s.joint_angles}};
}

}  // namespace

nlohmann::json spaces_message() {
  return {{"type", "spaces"},
          {"actions", kActionCount},
          {"obs_shape", {kTaxelRows, kTaxelCols}},
          {"env_id", kEnvId}};
}

nlohmann::json error_message(std::string_view code, std::string_view message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

nlohmann::json observation_message(const Observation& observation, double reward, bool done,
                                   nlohmann::json info) {
  return {{"type", "obs"},
          {"taxels", encode_taxels(observation.taxels)},
          {"step", observation.step_index},
          {"reward", reward},
          {"done", done},
          {"info", std::move(info)}};
}

nlohmann::json step_message(const StepResult& r) {
  nlohmann::json info = {{"contact_count", r.info.contact_count},
                         {"rejected_motion", r.info.rejected_motion},
                         {"episode_id", r.info.episode_id},
                         {"state", state_json(r.info.state)}};
  if (r.info.correct) info["correct"] = *r.info.correct;
  return observation_message(r.observation, r.reward, r.done, std::move(info));
}

EnvConfig env_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad_request("config must be an object");
  EnvConfig c;
  c.seed = integer_field<std::uint64_t>(j, "seed", c.seed);
  c.max_steps = integer_field<int>(j, "max_steps", c.max_steps);
  c.joint_step = number_field(j, "joint_step", c.joint_step);
  c.base_step = number_field(j, "base_step", c.base_step);
  c.sensor_reach = number_field(j, "sensor_reach", c.sensor_reach);
  c.start_distance = number_field(j, "start_distance", c.start_distance);
  c.start_jitter = number_field(j, "start_jitter", c.start_jitter);
  c.touch_reward = number_field(j, "touch_reward", c.touch_reward);
  c.step_penalty = number_field(j, "step_penalty", c.step_penalty);
  return c;
}

Session::Session(std::shared_ptr<const Dataset> dataset) : dataset_(std::move(dataset)) {}

std::shared_ptr<const SceneObject> Session::scene(const std::string& id) {
  if (auto it = scenes_.find(id); it != scenes_.end()) return it->second;
  const DatasetObject* obj = dataset_ ? dataset_->find(id) : nullptr;
  if (!obj || !obj->mesh) throw RequestError(wire_error::kUnknownObject, "no object '" + id + "' in the dataset");
  auto s = make_scene_object(*obj->mesh, id, obj->record.class_name);
  scenes_.emplace(id, s);
  return s;
}

nlohmann::json Session::reset(const nlohmann::json& request) {
  const nlohmann::json config = request.contains("config") ? request.at("config") : nlohmann::json::object();
  EnvConfig c = env_config_from_json(config);
  std::string id;
  if (config.contains("object")) {
    if (!config.at("object").is_string()) bad_request("config.object must be a string");
    id = config.at("object").get<std::string>();
  } else {
    if (!dataset_ || dataset_->objects.empty()) {
      throw RequestError(wire_error::kUnknownObject, "the dataset is empty");
    }
    id = dataset_->objects[c.seed % dataset_->objects.size()].record.id;
  }
  c.object = scene(id);
  const Observation obs = env_.reset(c);
  nlohmann::json info = {{"contact_count", obs.taxels.count()},
                         {"episode_id", env_.episode_id()},
                         {"object_id", id},
                         {"state", state_json(env_.state())}};
  return observation_message(obs, 0.0, false, std::move(info));
}

nlohmann::json Session::handle(const nlohmann::json& request) {
  try {
    if (!request.is_object()) bad_request("request must be a JSON object");
    if (!request.contains("type") || !request.at("type").is_string()) bad_request("missing string field 'type'");
    const std::string type = request.at("type").get<std::string>();
    if (type == "spaces") return spaces_message();
    if (type == "reset") return reset(request);
    if (type == "step") {
      // Checked before the action field so a bare {"type":"step"} without an
      // episode reports no_episode.
      if (!env_.has_episode()) throw EnvError("no_episode", "no episode in progress; send reset first");
      if (!request.contains("action") || !request.at("action").is_number_integer()) {
        bad_request("step needs an integer 'action'");
      }
      const auto a = request.at("action").get<std::int64_t>();
      if (a < 0 || a >= kActionCount) {
        throw EnvError("invalid_action", "action " + std::to_string(a) + " outside [0, 26]");
      }
      return step_message(env_.step(static_cast<int>(a)));
    }
    if (type == "classify") {
      if (!env_.has_episode()) throw EnvError("no_episode", "no episode in progress; send reset first");
      if (!request.contains("label") || !request.at("label").is_string()) {
        bad_request("classify needs a string 'label'");
      }
      return step_message(env_.submit_classification(request.at("label").get<std::string>()));
    }
    if (type == "close") {
      closed_ = true;
      return {{"type", "closed"}};
    }
    bad_request("unknown request type '" + type + "'");
  } catch (const RequestError& e) {
    return error_message(e.code(), e.what());
  } catch (const EnvError& e) {
    return error_message(e.code(), e.what());
  } catch (const std::exception& e) {
    return error_message(wire_error::kInternal, e.what());
  }
}

std::string Session::handle_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  nlohmann::json request = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (request.is_discarded()) return error_message(wire_error::kBadJson, "line is not valid JSON").dump();
  return handle(request).dump();
}

}  // namespace touchsim
