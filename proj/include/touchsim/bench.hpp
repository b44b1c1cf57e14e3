#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "touchsim/dataset.hpp"
#include "touchsim/env.hpp"

namespace touchsim {

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchmarkConfig {
  std::vector<std::string> classes;
  std::size_t objects_per_class = 10;
  double split_ratio = 0.8;
  std::size_t episodes_per_object = 1;
  int max_steps = kDefaultMaxSteps;
  std::uint64_t seed = 0;
  double start_jitter = 0.01;
  // Evaluate on the training objects instead of a held-out split.
  bool test_on_train = false;
};

// Throws BenchError.
void check_benchmark_config(const BenchmarkConfig& config);
void to_json(nlohmann::json& j, const BenchmarkConfig& config);
// Unknown keys and wrong types throw BenchError.
void from_json(const nlohmann::json& j, BenchmarkConfig& config);

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Per class: the first objects_per_class ids (sorted) are shuffled with a
// seeded Fisher-Yates pass and cut at round(n * split_ratio), keeping at least
// one object on each side.
Split make_split(const DatasetManifest& manifest, const BenchmarkConfig& config);

// Anything that picks actions from observations. `rejected` is the
// rejected_motion flag of the previous step (false right after reset).
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset() = 0;
  virtual int act(const Observation& observation, bool rejected) = 0;
  // No more useful actions; the harness may stop early.
  virtual bool exhausted() const { return false; }
};

enum class ScanPattern { kCross, kRaster };

struct ScriptedPolicyParams {
  int approach_limit = 90;  // +y steps before giving up the approach
  int tilt_steps = 11;      // fingertip tilt held during the scan, in joint steps
  int lift_steps = 6;       // +z moves that undo the drop caused by the tilt
  int scan_start = 110;     // step index at which the scan begins
  ScanPattern pattern = ScanPattern::kCross;
  int sweep_length = 30;    // lateral moves per sweep
  int raster_rows = 12;
  int row_spacing = 2;      // z moves between raster rows
};

// Contact-seeking exploration.
//
// Approach along +y until the first touch or until blocked. Base steps are
// longer than the sensing reach, so a surface square to the approach can stop
// the sensor just out of reach, and the touch image depends on where the
// surface falls between steps. After the approach the policy therefore backs
// off, tilts the fingertip by flexing the proximal joint, and closes in again
// by trading flexion from the proximal to the distal joint. The tilt stays
// constant while the leading sensor edge advances by less than the reach per
// exchange, so the touch is found at a repeatable depth. It then backs off,
// waits until scan_start so the schedule lines up across episodes, returns
// and scans at that depth with a fixed number of steps.
class ScriptedPolicy : public Policy {
 public:
  enum class Phase { kApproach, kRaster, kExhausted };

  explicit ScriptedPolicy(ScriptedPolicyParams params = {});
  void reset() override;
  int act(const Observation& observation, bool rejected) override;
  bool exhausted() const override { return phase_ == Phase::kExhausted; }
  Phase phase() const { return phase_; }

 private:
  enum class Stage { kApproach, kPosture, kCoarse, kLadder, kSettle, kScan, kDone };

  int emit(int action);
  int next_scan_action();

  ScriptedPolicyParams params_;
  Phase phase_ = Phase::kApproach;
  Stage stage_ = Stage::kApproach;
  std::deque<int> queue_;
  int last_action_ = action::kNoOp;
  int proximal_steps_ = 0;
  int approach_steps_ = 0;
  int settle_stage_ = 0;
  std::vector<int> raster_plan_;
  std::size_t scan_pos_ = 0;
  std::size_t leg_ = 0;
  int leg_emitted_ = 0;
  int leg_accepted_ = 0;
  bool returning_ = false;
};

struct EpisodeStep {
  int action = action::kNoOp;
  TaxelGrid taxels;
  double reward = 0.0;
  bool rejected = false;
};

struct EpisodeLog {
  std::string object_id;
  std::string class_name;
  std::string split;  // "train" or "test"
  std::size_t episode = 0;
  std::uint64_t seed = 0;
  int max_steps = kDefaultMaxSteps;
  std::vector<EpisodeStep> steps;
  std::optional<std::string> prediction;
  std::optional<bool> correct;

  // Index (1-based step) of the first observation with contact.
  std::optional<int> first_touch() const;
};

void to_json(nlohmann::json& j, const EpisodeLog& log);

inline constexpr std::size_t kTimeBins = 32;
inline constexpr std::size_t kFeatureSize = kTaxelCount + kTimeBins + 1;
using FeatureVector = std::vector<double>;

// [0, 1600): per-taxel mean over the steps with any contact.
// [1600, 1632): number of contact steps in each of 32 equal windows of
//   max_steps (a step belongs to window floor(i * 32 / max_steps)).
// 1632: first-touch step / max_steps.
// All zeros when the episode never touched.
FeatureVector featurize(const EpisodeLog& log);

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(std::span<const FeatureVector> features, std::span<const std::string> labels) = 0;
  virtual std::string predict(const FeatureVector& features) const = 0;
};

// Euclidean nearest class mean; exact ties go to the lexicographically
// smallest label.
class NearestCentroidClassifier : public Classifier {
 public:
  void fit(std::span<const FeatureVector> features, std::span<const std::string> labels) override;
  std::string predict(const FeatureVector& features) const override;
  const std::map<std::string, FeatureVector>& centroids() const { return centroids_; }

 private:
  std::map<std::string, FeatureVector> centroids_;
};

struct Metrics {
  double accuracy = 0.0;
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::optional<double> mean_steps_to_first_touch;
  double touch_rate = 0.0;  // fraction of test steps with contact
  std::size_t train_episodes = 0;
  std::size_t test_episodes = 0;
  std::size_t test_episodes_with_touch = 0;
};

void to_json(nlohmann::json& j, const Metrics& metrics);

struct BenchmarkHooks {
  std::function<std::unique_ptr<Policy>()> make_policy;
  std::function<std::unique_ptr<Classifier>()> make_classifier;
};

struct BenchmarkResult {
  BenchmarkConfig config;
  Split split;
  Metrics metrics;
  std::vector<EpisodeLog> episodes;
};

// Runs one episode for at most max_steps - 1 motions, leaving the final step
// for classification.
EpisodeLog run_episode(TouchEnv& env, const EnvConfig& env_config, Policy& policy);

BenchmarkResult run_benchmark(const BenchmarkConfig& config, const Dataset& dataset,
                              const BenchmarkHooks& hooks = {});

// Writes report.json and episodes.jsonl into `dir` (created if missing).
void write_benchmark(const BenchmarkResult& result, const std::filesystem::path& dir);

}  // namespace touchsim
