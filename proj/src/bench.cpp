#include "touchsim/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "touchsim/meshgen.hpp"
#include "touchsim/rng.hpp"
#include "touchsim/taxel_codec.hpp"

namespace touchsim {

void check_benchmark_config(const BenchmarkConfig& c) {
  auto fail = [](const std::string& what) { throw BenchError(what); };
  if (c.classes.empty()) fail("no classes selected");
  std::set<std::string> seen;
  for (const auto& name : c.classes) {
    if (!parse_class(name)) fail("unknown class '" + name + "'");
    if (!seen.insert(name).second) fail("class '" + name + "' listed twice");
  }
  if (c.objects_per_class < (c.test_on_train ? 1u : 2u)) {
    fail("objects_per_class must leave at least one object for training and one for testing");
  }
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) fail("split_ratio must be in (0, 1)");
  if (c.episodes_per_object < 1) fail("episodes_per_object must be >= 1");
  if (c.max_steps < 2) fail("max_steps must be >= 2");
  if (!(c.start_jitter >= 0.0 && c.start_jitter <= 0.1)) fail("start_jitter must be in [0, 0.1]");
}

void to_json(nlohmann::json& j, const BenchmarkConfig& c) {
  j = {{"classes", c.classes},
       {"objects_per_class", c.objects_per_class},
       {"split_ratio", c.split_ratio},
       {"episodes_per_object", c.episodes_per_object},
       {"max_steps", c.max_steps},
       {"seed", c.seed},
       {"start_jitter", c.start_jitter},
       {"test_on_train", c.test_on_train}};
}

void from_json(const nlohmann::json& j, BenchmarkConfig& c) {
  if (!j.is_object()) throw BenchError("benchmark config must be a JSON object");
  static const std::set<std::string> known = {"classes",     "objects_per_class", "split_ratio",
                                              "episodes_per_object", "max_steps", "seed",
                                              "start_jitter", "test_on_train"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw BenchError("unknown benchmark config key '" + key + "'");
  }
  try {
    c.classes = j.value("classes", c.classes);
    c.objects_per_class = j.value("objects_per_class", c.objects_per_class);
    c.split_ratio = j.value("split_ratio", c.split_ratio);
    c.episodes_per_object = j.value("episodes_per_object", c.episodes_per_object);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.seed = j.value("seed", c.seed);
    c.start_jitter = j.value("start_jitter", c.start_jitter);
    c.test_on_train = j.value("test_on_train", c.test_on_train);
  } catch (const nlohmann::json::exception& e) {
    throw BenchError(std::string("benchmark config: ") + e.what());
  }
}

Split make_split(const DatasetManifest& manifest, const BenchmarkConfig& config) {
  check_benchmark_config(config);
  Split split;
  for (const auto& cls : config.classes) {
    std::vector<std::string> ids;
    for (const auto& rec : manifest.objects) {
      if (rec.class_name == cls) ids.push_back(rec.id);
    }
    if (ids.size() < config.objects_per_class) {
      throw BenchError("class '" + cls + "' has " + std::to_string(ids.size()) + " objects, need " +
                       std::to_string(config.objects_per_class));
    }
    std::sort(ids.begin(), ids.end());
    ids.resize(config.objects_per_class);
    if (config.test_on_train) {
      split.train.insert(split.train.end(), ids.begin(), ids.end());
      split.test.insert(split.test.end(), ids.begin(), ids.end());
      continue;
    }
    Rng rng(mix_seed(config.seed, hash_name(cls)));
    for (std::size_t i = ids.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(ids[i], ids[j]);
    }
    const auto n = static_cast<double>(ids.size());
    const auto n_train = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(n * config.split_ratio)),
                                                 1, ids.size() - 1);
    std::vector<std::string> train(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::string> test(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    split.train.insert(split.train.end(), train.begin(), train.end());
    split.test.insert(split.test.end(), test.begin(), test.end());
  }
  return split;
}

namespace {

// Index finger joint actions (finger 1): proximal +/-, distal +/-.
constexpr int kProximalFlex = 4;
constexpr int kProximalExtend = 5;
constexpr int kDistalFlex = 6;
constexpr int kDistalExtend = 7;

constexpr std::array<int, 4> kSweepLegs = {action::kBasePlusX, action::kBaseMinusX, action::kBasePlusZ,
                                           action::kBaseMinusZ};

constexpr int opposite(int base_action) { return base_action % 2 == 0 ? base_action + 1 : base_action - 1; }

}  // namespace

ScriptedPolicy::ScriptedPolicy(ScriptedPolicyParams params) : params_(params) {
  if (params_.approach_limit < 1 || params_.tilt_steps < 1 || params_.lift_steps < 0 ||
      params_.scan_start < 0 || params_.sweep_length < 1 || params_.raster_rows < 1 ||
      params_.row_spacing < 1) {
    throw std::invalid_argument("invalid scripted policy parameters");
  }
  // Raster: from the top-left corner, serpentine rows downwards.
  const auto w = static_cast<std::size_t>(params_.sweep_length);
  raster_plan_.assign(w / 2, action::kBaseMinusX);
  raster_plan_.insert(raster_plan_.end(),
                      static_cast<std::size_t>(params_.raster_rows / 2 * params_.row_spacing),
                      action::kBasePlusZ);
  int dir = action::kBasePlusX;
  for (int row = 0; row < params_.raster_rows; ++row) {
    raster_plan_.insert(raster_plan_.end(), w, dir);
    if (row + 1 < params_.raster_rows) {
      raster_plan_.insert(raster_plan_.end(), static_cast<std::size_t>(params_.row_spacing),
                          action::kBaseMinusZ);
    }
    dir = opposite(dir);
  }
  reset();
}

void ScriptedPolicy::reset() {
  phase_ = Phase::kApproach;
  stage_ = Stage::kApproach;
  queue_.clear();
  last_action_ = action::kNoOp;
  proximal_steps_ = 0;
  approach_steps_ = 0;
  settle_stage_ = 0;
  scan_pos_ = 0;
  leg_ = 0;
  leg_emitted_ = 0;
  leg_accepted_ = 0;
  returning_ = false;
}

int ScriptedPolicy::emit(int a) {
  last_action_ = a;
  return a;
}

int ScriptedPolicy::next_scan_action() {
  if (params_.pattern == ScanPattern::kRaster) {
    if (scan_pos_ < raster_plan_.size()) return raster_plan_[scan_pos_++];
    stage_ = Stage::kDone;
    return action::kNoOp;
  }
  // Cross: out-and-back legs. The way back undoes exactly the accepted moves
  // and then idles, so every leg takes 2 * sweep_length steps.
  while (leg_ < kSweepLegs.size()) {
    if (leg_emitted_ < params_.sweep_length) {
      ++leg_emitted_;
      if (!returning_) return kSweepLegs[leg_];
      return leg_emitted_ <= leg_accepted_ ? opposite(kSweepLegs[leg_]) : action::kNoOp;
    }
    leg_emitted_ = 0;
    if (!returning_) {
      returning_ = true;
    } else {
      returning_ = false;
      leg_accepted_ = 0;
      ++leg_;
    }
  }
  stage_ = Stage::kDone;
  return action::kNoOp;
}

int ScriptedPolicy::act(const Observation& observation, bool rejected) {
  const bool lit = observation.taxels.any();
  if (!rejected) {
    if (last_action_ == kProximalFlex) ++proximal_steps_;
    if (last_action_ == kProximalExtend) --proximal_steps_;
    if (stage_ == Stage::kScan && !returning_ && leg_ < kSweepLegs.size() &&
        last_action_ == kSweepLegs[leg_]) {
      ++leg_accepted_;
    }
  }
  auto pop = [this] {
    const int a = queue_.front();
    queue_.pop_front();
    return emit(a);
  };

  for (;;) {
    switch (stage_) {
      case Stage::kApproach:
        if (lit || (rejected && last_action_ == action::kBasePlusY)) {
          phase_ = Phase::kRaster;
          stage_ = Stage::kPosture;
          // Back off first if touching, so tilting cannot push into the surface.
          if (lit) queue_.push_back(action::kBaseMinusY);
          queue_.insert(queue_.end(), static_cast<std::size_t>(params_.tilt_steps), kProximalFlex);
          queue_.insert(queue_.end(), static_cast<std::size_t>(params_.lift_steps), action::kBasePlusZ);
          break;
        }
        if (approach_steps_ >= params_.approach_limit) {
          phase_ = Phase::kExhausted;
          stage_ = Stage::kDone;
          break;
        }
        ++approach_steps_;
        return emit(action::kBasePlusY);

      case Stage::kPosture:
        if (!queue_.empty()) return pop();
        stage_ = Stage::kCoarse;
        break;

      case Stage::kCoarse:
        if (lit) {
          stage_ = Stage::kSettle;
        } else if (rejected && last_action_ == action::kBasePlusY) {
          stage_ = Stage::kLadder;
        } else {
          return emit(action::kBasePlusY);
        }
        break;

      case Stage::kLadder:
        if (lit) {
          queue_.clear();
          stage_ = Stage::kSettle;
          break;
        }
        if (rejected) {
          // The proximal half of a rung was blocked: undo the distal half.
          queue_.clear();
          if (last_action_ == kProximalExtend) queue_.push_back(kDistalExtend);
          stage_ = Stage::kSettle;
          break;
        }
        if (!queue_.empty()) return pop();
        if (proximal_steps_ > 0) {
          // One rung closer: distal first, so the intermediate pose retreats.
          queue_ = {kDistalFlex, kProximalExtend};
          break;
        }
        stage_ = Stage::kSettle;  // ladder exhausted without a touch
        break;

      case Stage::kSettle:
        if (!queue_.empty()) return pop();
        if (settle_stage_ == 0) {
          settle_stage_ = 1;
          return emit(action::kBaseMinusY);
        }
        if (settle_stage_ == 1) {
          if (observation.step_index + 1 < params_.scan_start) return emit(action::kNoOp);
          settle_stage_ = 2;
          return emit(action::kBasePlusY);
        }
        stage_ = Stage::kScan;
        break;

      case Stage::kScan: {
        const int a = next_scan_action();
        if (stage_ == Stage::kScan) return emit(a);
        break;
      }

      case Stage::kDone:
        phase_ = Phase::kExhausted;
        return emit(action::kNoOp);
    }
    rejected = false;  // consumed by the stage that looked at it
  }
}

std::optional<int> EpisodeLog::first_touch() const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].taxels.any()) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

void to_json(nlohmann::json& j, const EpisodeLog& log) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : log.steps) {
    steps.push_back({{"action", s.action},
                     {"taxels", encode_taxels(s.taxels)},
                     {"reward", s.reward},
                     {"rejected", s.rejected}});
  }
  const auto ft = log.first_touch();
  j = {{"object_id", log.object_id},
       {"class", log.class_name},
       {"split", log.split},
       {"episode", log.episode},
       {"seed", log.seed},
       {"max_steps", log.max_steps},
       {"first_touch", ft ? nlohmann::json(*ft) : nlohmann::json()},
       {"prediction", log.prediction ? nlohmann::json(*log.prediction) : nlohmann::json()},
       {"correct", log.correct ? nlohmann::json(*log.correct) : nlohmann::json()},
       {"steps", std::move(steps)}};
}

FeatureVector featurize(const EpisodeLog& log) {
  FeatureVector f(kFeatureSize, 0.0);
  const auto ft = log.first_touch();
  if (!ft) return f;
  const double horizon = static_cast<double>(log.max_steps);
  const double window = horizon / static_cast<double>(kTimeBins);
  std::size_t contact_steps = 0;
  for (std::size_t i = 0; i < log.steps.size(); ++i) {
    const TaxelGrid& g = log.steps[i].taxels;
    const std::size_t n = g.count();
    if (n == 0) continue;
    ++contact_steps;
    for (std::size_t t = 0; t < kTaxelCount; ++t) f[t] += g.cells[t];
    const auto bin = std::min(kTimeBins - 1,
                              static_cast<std::size_t>(static_cast<double>(i) / window));
    f[kTaxelCount + bin] += 1.0;
  }
  for (std::size_t t = 0; t < kTaxelCount; ++t) f[t] /= static_cast<double>(contact_steps);
  f[kFeatureSize - 1] = static_cast<double>(*ft) / horizon;
  return f;
}

void NearestCentroidClassifier::fit(std::span<const FeatureVector> features,
                                    std::span<const std::string> labels) {
  if (features.size() != labels.size() || features.empty()) {
    throw std::invalid_argument("classifier needs one label per feature vector");
  }
  centroids_.clear();
  std::map<std::string, std::size_t> counts;
  const std::size_t dim = features.front().size();
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim) throw std::invalid_argument("feature vectors differ in length");
    auto [it, inserted] = centroids_.try_emplace(labels[i], dim, 0.0);
    for (std::size_t d = 0; d < dim; ++d) it->second[d] += features[i][d];
    ++counts[labels[i]];
  }
  for (auto& [label, c] : centroids_) {
    for (double& v : c) v /= static_cast<double>(counts[label]);
  }
}

std::string NearestCentroidClassifier::predict(const FeatureVector& features) const {
  if (centroids_.empty()) throw std::logic_error("classifier has not been fitted");
  const std::string* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [label, c] : centroids_) {  // map order = lexicographic
    if (c.size() != features.size()) throw std::invalid_argument("feature vector length mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) d += (c[i] - features[i]) * (c[i] - features[i]);
    if (d < best_d) {
      best_d = d;
      best = &label;
    }
  }
  return best ? *best : centroids_.begin()->first;
}

void to_json(nlohmann::json& j, const Metrics& m) {
  j = {{"accuracy", m.accuracy},
       {"classes", m.classes},
       {"confusion", m.confusion},
       {"mean_steps_to_first_touch",
        m.mean_steps_to_first_touch ? nlohmann::json(*m.mean_steps_to_first_touch) : nlohmann::json()},
       {"touch_rate", m.touch_rate},
       {"train_episodes", m.train_episodes},
       {"test_episodes", m.test_episodes},
       {"test_episodes_with_touch", m.test_episodes_with_touch}};
}

EpisodeLog run_episode(TouchEnv& env, const EnvConfig& env_config, Policy& policy) {
  EpisodeLog log;
  log.seed = env_config.seed;
  log.max_steps = env_config.max_steps;
  if (env_config.object) log.object_id = env_config.object->id;
  Observation obs = env.reset(env_config);
  policy.reset();
  bool rejected = false;
  while (obs.step_index < env_config.max_steps - 1) {
    const int a = policy.act(obs, rejected);
    if (policy.exhausted()) break;
    const StepResult r = env.step(a);
    log.steps.push_back({a, r.observation.taxels, r.reward, r.info.rejected_motion});
    obs = r.observation;
    rejected = r.info.rejected_motion;
  }
  return log;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config, const Dataset& dataset,
                              const BenchmarkHooks& hooks) {
  BenchmarkResult result;
  result.config = config;
  result.split = make_split(dataset.manifest, config);

  auto make_policy = [&]() -> std::unique_ptr<Policy> {
    if (hooks.make_policy) return hooks.make_policy();
    return std::make_unique<ScriptedPolicy>();
  };
  std::unique_ptr<Classifier> classifier = hooks.make_classifier
                                               ? hooks.make_classifier()
                                               : std::make_unique<NearestCentroidClassifier>();
  std::unique_ptr<Policy> policy = make_policy();

  std::map<std::string, std::shared_ptr<const SceneObject>> scenes;
  auto scene = [&](const std::string& id) {
    auto it = scenes.find(id);
    if (it != scenes.end()) return it->second;
    const DatasetObject* obj = dataset.find(id);
    if (!obj || !obj->mesh) throw BenchError("object " + id + " has no mesh loaded");
    auto s = make_scene_object(*obj->mesh, id, obj->record.class_name);
    scenes.emplace(id, s);
    return s;
  };

  TouchEnv env;
  auto run = [&](const std::string& id, std::size_t episode, const char* split) {
    EnvConfig ec;
    ec.object = scene(id);
    ec.max_steps = config.max_steps;
    ec.start_jitter = config.start_jitter;
    ec.seed = mix_seed(mix_seed(config.seed, hash_name(id)), episode);
    EpisodeLog log = run_episode(env, ec, *policy);
    log.class_name = *ec.object->class_label;
    log.split = split;
    log.episode = episode;
    return log;
  };

  std::vector<FeatureVector> train_x;
  std::vector<std::string> train_y;
  for (const auto& id : result.split.train) {
    for (std::size_t e = 0; e < config.episodes_per_object; ++e) {
      EpisodeLog log = run(id, e, "train");
      train_x.push_back(featurize(log));
      train_y.push_back(log.class_name);
      result.episodes.push_back(std::move(log));
    }
  }
  classifier->fit(train_x, train_y);

  Metrics& m = result.metrics;
  m.classes = config.classes;
  m.confusion.assign(m.classes.size(), std::vector<std::size_t>(m.classes.size(), 0));
  m.train_episodes = train_x.size();
  auto class_index = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(m.classes.begin(), m.classes.end(), name) - m.classes.begin());
  };
  std::size_t correct = 0;
  std::size_t touch_steps = 0;
  std::size_t total_steps = 0;
  double first_touch_sum = 0.0;
  for (const auto& id : result.split.test) {
    for (std::size_t e = 0; e < config.episodes_per_object; ++e) {
      EpisodeLog log = run(id, e, "test");
      const std::string predicted = classifier->predict(featurize(log));
      const StepResult verdict = env.submit_classification(predicted);
      log.prediction = predicted;
      log.correct = verdict.info.correct;
      if (*log.correct) ++correct;
      const std::size_t ti = class_index(log.class_name);
      const std::size_t pi = class_index(predicted);
      if (ti < m.classes.size() && pi < m.classes.size()) ++m.confusion[ti][pi];
      ++m.test_episodes;
      for (const auto& s : log.steps) touch_steps += s.taxels.any() ? 1 : 0;
      total_steps += log.steps.size();
      if (const auto ft = log.first_touch()) {
        ++m.test_episodes_with_touch;
        first_touch_sum += *ft;
      }
      result.episodes.push_back(std::move(log));
    }
  }
  m.accuracy = m.test_episodes ? static_cast<double>(correct) / static_cast<double>(m.test_episodes) : 0.0;
  m.touch_rate = total_steps ? static_cast<double>(touch_steps) / static_cast<double>(total_steps) : 0.0;
  if (m.test_episodes_with_touch) {
    m.mean_steps_to_first_touch = first_touch_sum / static_cast<double>(m.test_episodes_with_touch);
  }
  return result;
}

void write_benchmark(const BenchmarkResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json report = {{"env_id", kEnvId},
                           {"config", result.config},
                           {"split", {{"train", result.split.train}, {"test", result.split.test}}},
                           {"metrics", result.metrics}};
  std::ofstream rep(dir / "report.json");
  if (!rep) throw std::runtime_error("cannot write " + (dir / "report.json").string());
  rep << report.dump(2) << '\n';
  std::ofstream eps(dir / "episodes.jsonl");
  if (!eps) throw std::runtime_error("cannot write " + (dir / "episodes.jsonl").string());
  for (const auto& log : result.episodes) eps << nlohmann::json(log).dump() << '\n';
}

}  // namespace touchsim
