#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "touchsim/bench.hpp"

using namespace touchsim;
namespace fs = std::filesystem;

namespace {

DatasetManifest manifest_with(const std::vector<std::string>& classes, std::size_t per_class) {
  DatasetManifest m;
  for (const auto& cls : classes) {
    for (std::size_t i = 0; i < per_class; ++i) {
      ObjectRecord r;
      r.id = object_id(class_from_name(cls), i);
      r.class_name = cls;
      m.objects.push_back(r);
    }
  }
  return m;
}

BenchmarkConfig config_for(std::vector<std::string> classes, std::size_t per_class) {
  BenchmarkConfig c;
  c.classes = std::move(classes);
  c.objects_per_class = per_class;
  return c;
}

EpisodeLog log_of(const std::vector<std::size_t>& lit_counts, int max_steps = 500) {
  EpisodeLog log;
  log.max_steps = max_steps;
  for (std::size_t n : lit_counts) {
    EpisodeStep s;
    for (std::size_t k = 0; k < n; ++k) s.taxels.cells[k] = 1;
    s.reward = n > 0 ? 1.0 : 0.0;
    log.steps.push_back(s);
  }
  return log;
}

// Direct transcription of the documented feature layout.
FeatureVector reference_features(const EpisodeLog& log) {
  FeatureVector f(kTaxelCount + 32 + 1, 0.0);
  int first = -1;
  std::vector<std::size_t> contact;
  for (std::size_t i = 0; i < log.steps.size(); ++i) {
    if (log.steps[i].taxels.count() > 0) {
      contact.push_back(i);
      if (first < 0) first = static_cast<int>(i) + 1;
    }
  }
  if (contact.empty()) return f;
  for (std::size_t t = 0; t < kTaxelCount; ++t) {
    double sum = 0;
    for (std::size_t i : contact) sum += log.steps[i].taxels.cells[t];
    f[t] = sum / static_cast<double>(contact.size());
  }
  for (std::size_t i : contact) {
    const std::size_t bin = std::min<std::size_t>(31, i * 32 / static_cast<std::size_t>(log.max_steps));
    f[kTaxelCount + bin] += 1;
  }
  f.back() = static_cast<double>(first) / log.max_steps;
  return f;
}

Observation lit_observation(int step) {
  Observation o;
  o.step_index = step;
  o.taxels.set(20, 20, true);
  return o;
}

}  // namespace

TEST(BenchConfig, Validation) {
  EXPECT_NO_THROW(check_benchmark_config(config_for({"cube", "sphere"}, 10)));
  EXPECT_THROW(check_benchmark_config(config_for({}, 10)), BenchError);
  EXPECT_THROW(check_benchmark_config(config_for({"cube", "teapot"}, 10)), BenchError);
  EXPECT_THROW(check_benchmark_config(config_for({"cube", "cube"}, 10)), BenchError);
  EXPECT_THROW(check_benchmark_config(config_for({"cube"}, 1)), BenchError);
  auto c = config_for({"cube"}, 4);
  c.split_ratio = 1.0;
  EXPECT_THROW(check_benchmark_config(c), BenchError);
  c.split_ratio = 0.0;
  EXPECT_THROW(check_benchmark_config(c), BenchError);
  c = config_for({"cube"}, 4);
  c.episodes_per_object = 0;
  EXPECT_THROW(check_benchmark_config(c), BenchError);
}

TEST(BenchConfig, JsonRoundTripAndStrictKeys) {
  auto c = config_for({"cube", "cup"}, 6);
  c.seed = 77;
  c.split_ratio = 0.5;
  const nlohmann::json j = c;
  const auto back = j.get<BenchmarkConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_THROW((nlohmann::json{{"classes", {"cube"}}, {"bogus", 1}}.get<BenchmarkConfig>()), BenchError);
  EXPECT_THROW((nlohmann::json{{"classes", "cube"}}.get<BenchmarkConfig>()), BenchError);
  EXPECT_THROW(nlohmann::json::array().get<BenchmarkConfig>(), BenchError);
}

TEST(MakeSplit, EightTwoPerClass) {
  const auto m = manifest_with({"cube", "sphere", "cup"}, 10);
  const Split s = make_split(m, config_for({"cube", "sphere", "cup"}, 10));
  EXPECT_EQ(s.train.size(), 24u);
  EXPECT_EQ(s.test.size(), 6u);
  for (const char* cls : {"cube", "sphere", "cup"}) {
    const auto count = [&](const std::vector<std::string>& ids) {
      return std::count_if(ids.begin(), ids.end(), [&](const std::string& id) { return id.rfind(cls, 0) == 0; });
    };
    EXPECT_EQ(count(s.train), 8);
    EXPECT_EQ(count(s.test), 2);
  }
}

TEST(MakeSplit, DeterministicDisjointAndComplete) {
  const auto m = manifest_with({"cube", "bowl"}, 12);
  std::set<std::string> all;
  for (const auto& r : m.objects) all.insert(r.id);
  std::set<std::vector<std::string>> distinct;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto c = config_for({"cube", "bowl"}, 12);
    c.seed = seed;
    const Split a = make_split(m, c);
    const Split b = make_split(m, c);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    std::set<std::string> seen;
    for (const auto& id : a.train) EXPECT_TRUE(seen.insert(id).second);
    for (const auto& id : a.test) EXPECT_TRUE(seen.insert(id).second);
    for (const auto& id : seen) EXPECT_TRUE(all.count(id));
    EXPECT_EQ(seen.size(), 24u);
    distinct.insert(a.test);
  }
  EXPECT_GT(distinct.size(), 10u);
}

TEST(MakeSplit, UsesFirstObjectsAndNeedsEnough) {
  const auto m = manifest_with({"cube"}, 5);
  const Split s = make_split(m, config_for({"cube"}, 3));
  for (const auto& id : s.train) EXPECT_LT(id, "cube_0003");
  for (const auto& id : s.test) EXPECT_LT(id, "cube_0003");
  EXPECT_THROW(make_split(m, config_for({"cube"}, 6)), BenchError);
  EXPECT_THROW(make_split(m, config_for({"cube", "cup"}, 2)), BenchError);
}

TEST(ScriptedPolicy, FirstActionIsApproach) {
  ScriptedPolicy p;
  EXPECT_EQ(p.act(Observation{}, false), action::kBasePlusY);
  EXPECT_EQ(p.phase(), ScriptedPolicy::Phase::kApproach);
}

TEST(ScriptedPolicy, FirstContactSwitchesPhase) {
  ScriptedPolicy p;
  Observation o;
  for (int i = 0; i < 5; ++i) {
    o.step_index = i;
    EXPECT_EQ(p.act(o, false), action::kBasePlusY);
  }
  p.act(lit_observation(5), false);
  EXPECT_EQ(p.phase(), ScriptedPolicy::Phase::kRaster);
  p.reset();
  EXPECT_EQ(p.phase(), ScriptedPolicy::Phase::kApproach);
  EXPECT_EQ(p.act(Observation{}, false), action::kBasePlusY);
}

TEST(ScriptedPolicy, GivesUpAfterApproachLimit) {
  ScriptedPolicyParams params;
  params.approach_limit = 5;
  ScriptedPolicy p(params);
  Observation o;
  for (int i = 0; i < 5; ++i) {
    o.step_index = i;
    EXPECT_EQ(p.act(o, false), action::kBasePlusY);
  }
  o.step_index = 5;
  EXPECT_EQ(p.act(o, false), action::kNoOp);
  EXPECT_TRUE(p.exhausted());
}

TEST(ScriptedPolicy, ActionsAlwaysInRange) {
  std::mt19937_64 g(5);
  for (auto pattern : {ScanPattern::kCross, ScanPattern::kRaster}) {
    ScriptedPolicyParams params;
    params.pattern = pattern;
    ScriptedPolicy p(params);
    for (int episode = 0; episode < 50; ++episode) {
      p.reset();
      Observation o;
      for (int step = 0; step < 500; ++step) {
        o.step_index = step;
        o.taxels = TaxelGrid{};
        if (g() % 3 == 0) o.taxels.set(g() % 40, g() % 40, true);
        const int a = p.act(o, g() % 4 == 0);
        ASSERT_GE(a, 0);
        ASSERT_LT(a, kActionCount);
      }
    }
  }
}

TEST(ScriptedPolicy, CubeFirstTouchMatchesApproachDistance) {
  const double half = 0.05;
  const double eps = 0.0015, delta = 0.005;
  const int want = static_cast<int>(std::ceil((0.2 - half - eps) / delta));
  ASSERT_EQ(want, 30);
  TouchEnv env;
  EnvConfig c;
  c.object = make_scene_object(oracle::centered_cube(2 * half), "cube", "cube");
  ScriptedPolicy p;
  const EpisodeLog log = run_episode(env, c, p);
  ASSERT_TRUE(log.first_touch());
  EXPECT_NEAR(*log.first_touch(), want, 2);
  for (int i = 0; i + 1 < *log.first_touch(); ++i) EXPECT_EQ(log.steps[i].action, action::kBasePlusY);
}

TEST(RunEpisode, LengthAndRewardConsistency) {
  TouchEnv env;
  EnvConfig c;
  c.object = make_scene_object(generate_object(sample_params(ObjectClass::kCylinder, 2)), "cyl", "cylinder");
  c.max_steps = 300;
  ScriptedPolicy p;
  const EpisodeLog log = run_episode(env, c, p);
  EXPECT_LE(log.steps.size(), 299u);
  EXPECT_TRUE(env.active());  // one step left for classification
  std::size_t touched = 0;
  for (const auto& s : log.steps) {
    EXPECT_EQ(s.reward == 1.0, s.taxels.any());
    touched += s.taxels.any();
  }
  EXPECT_GT(touched, 20u);
}

TEST(Featurize, NoContactIsZero) {
  const FeatureVector f = featurize(log_of({0, 0, 0, 0}));
  ASSERT_EQ(f.size(), kFeatureSize);
  EXPECT_TRUE(std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; }));
}

TEST(Featurize, FullGridEveryStep) {
  const FeatureVector f = featurize(log_of(std::vector<std::size_t>(64, kTaxelCount), 64));
  for (std::size_t t = 0; t < kTaxelCount; ++t) ASSERT_EQ(f[t], 1.0);
  for (std::size_t b = 0; b < 32; ++b) EXPECT_EQ(f[kTaxelCount + b], 2.0);
  EXPECT_EQ(f.back(), 1.0 / 64);
}

TEST(Featurize, MatchesReference) {
  std::mt19937_64 g(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int max_steps = 40 + static_cast<int>(g() % 500);
    std::vector<std::size_t> counts(static_cast<std::size_t>(max_steps - 1 - static_cast<int>(g() % 20)));
    for (auto& n : counts) n = (g() % 3 == 0) ? g() % kTaxelCount : 0;
    EpisodeLog log = log_of(counts, max_steps);
    // Scatter the lit cells so the mean is not a prefix pattern.
    for (auto& s : log.steps) std::shuffle(s.taxels.cells.begin(), s.taxels.cells.end(), g);
    const FeatureVector got = featurize(log);
    const FeatureVector want = reference_features(log);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) ASSERT_NEAR(got[i], want[i], 1e-12) << trial << " " << i;
  }
}

TEST(Featurize, PermutingDarkStepsKeepsTaxelMeans) {
  std::mt19937_64 g(3);
  EpisodeLog log = log_of({0, 5, 0, 0, 800, 0, 0, 12, 0, 1600, 0});
  for (auto& s : log.steps) std::shuffle(s.taxels.cells.begin(), s.taxels.cells.end(), g);
  const FeatureVector base = featurize(log);
  // Swap two dark steps and move a dark step elsewhere among the dark ones.
  EpisodeLog perm = log;
  std::swap(perm.steps[0], perm.steps[10]);
  std::swap(perm.steps[2], perm.steps[8]);
  const FeatureVector f = featurize(perm);
  for (std::size_t t = 0; t < kTaxelCount; ++t) ASSERT_EQ(f[t], base[t]);
}

TEST(Featurize, TrailingDarkStepsDoNotMatter) {
  EpisodeLog log = log_of({0, 0, 40, 0, 1600, 3});
  const FeatureVector base = featurize(log);
  for (int pad : {1, 10, 300}) {
    EpisodeLog padded = log;
    padded.steps.resize(log.steps.size() + static_cast<std::size_t>(pad));
    EXPECT_EQ(featurize(padded), base) << pad;
  }
}

TEST(NearestCentroid, MemorisesOneExamplePerClass) {
  NearestCentroidClassifier c;
  const std::vector<FeatureVector> x = {{0, 0, 1}, {5, 1, 0}, {2, 9, 3}};
  const std::vector<std::string> y = {"cube", "cup", "sphere"};
  c.fit(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(c.predict(x[i]), y[i]);
  EXPECT_EQ(c.centroids().size(), 3u);
}

TEST(NearestCentroid, TiesGoToSmallerLabel) {
  NearestCentroidClassifier c;
  const std::vector<FeatureVector> x = {{1, 0}, {-1, 0}};
  const std::vector<std::string> y = {"sphere", "cube"};
  c.fit(x, y);
  EXPECT_EQ(c.predict({0, 0}), "cube");
  EXPECT_EQ(c.predict({0, 7}), "cube");
  EXPECT_EQ(c.predict({0.1, 0}), "sphere");
}

TEST(NearestCentroid, CentroidsAreClassMeans) {
  NearestCentroidClassifier c;
  const std::vector<FeatureVector> x = {{0, 0}, {2, 4}, {10, 10}};
  const std::vector<std::string> y = {"a", "a", "b"};
  c.fit(x, y);
  EXPECT_EQ(c.centroids().at("a"), (FeatureVector{1, 2}));
  EXPECT_EQ(c.centroids().at("b"), (FeatureVector{10, 10}));
}

TEST(NearestCentroid, SeparatedClusters) {
  std::mt19937_64 g(11);
  std::normal_distribution<double> noise(0.0, 0.05);
  const std::vector<std::string> labels = {"bowl", "cube", "cup", "plate"};
  std::vector<FeatureVector> centres;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    FeatureVector v(8, 0.0);
    v[k] = 3.0;
    v[k + 4] = -3.0;
    centres.push_back(v);
  }
  auto draw = [&](std::size_t k) {
    FeatureVector v = centres[k];
    for (double& x : v) x += noise(g);
    return v;
  };
  std::vector<FeatureVector> x;
  std::vector<std::string> y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(draw(static_cast<std::size_t>(i) % 4));
    y.push_back(labels[static_cast<std::size_t>(i) % 4]);
  }
  NearestCentroidClassifier c;
  c.fit(x, y);
  int correct = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = g() % 4;
    correct += c.predict(draw(k)) == labels[k];
  }
  EXPECT_EQ(correct, 1000);
}

TEST(NearestCentroid, Errors) {
  NearestCentroidClassifier c;
  EXPECT_THROW(c.predict({1.0}), std::logic_error);
  const std::vector<FeatureVector> none;
  const std::vector<std::string> no_labels;
  EXPECT_THROW(c.fit(none, no_labels), std::invalid_argument);
  const std::vector<FeatureVector> ragged = {{1, 2}, {3}};
  const std::vector<std::string> two = {"a", "b"};
  EXPECT_THROW(c.fit(ragged, two), std::invalid_argument);
  const std::vector<FeatureVector> one = {{1, 2}};
  EXPECT_THROW(c.fit(one, two), std::invalid_argument);
}

class BenchRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const ObjectClass classes[] = {ObjectClass::kCube, ObjectClass::kSphere};
    dataset_ = new Dataset(generate_dataset(classes, 4, 3));
  }
  static void TearDownTestSuite() {
    delete dataset_;
    dataset_ = nullptr;
  }
  static Dataset* dataset_;
};
Dataset* BenchRun::dataset_ = nullptr;

TEST_F(BenchRun, MetricsInvariantsAndDeterminism) {
  auto c = config_for({"cube", "sphere"}, 4);
  c.split_ratio = 0.5;
  c.max_steps = 200;
  const BenchmarkResult a = run_benchmark(c, *dataset_);
  const BenchmarkResult b = run_benchmark(c, *dataset_);
  EXPECT_EQ(nlohmann::json(a.metrics), nlohmann::json(b.metrics));
  ASSERT_EQ(a.episodes.size(), b.episodes.size());
  for (std::size_t i = 0; i < a.episodes.size(); ++i) EXPECT_EQ(nlohmann::json(a.episodes[i]), nlohmann::json(b.episodes[i]));

  const Metrics& m = a.metrics;
  EXPECT_EQ(m.train_episodes, 4u);
  EXPECT_EQ(m.test_episodes, 4u);
  std::size_t trace = 0, total = 0;
  for (std::size_t i = 0; i < m.classes.size(); ++i) {
    std::size_t row = 0;
    for (std::size_t v : m.confusion[i]) row += v;
    EXPECT_EQ(row, 2u);  // two test objects per class, one episode each
    trace += m.confusion[i][i];
    total += row;
  }
  EXPECT_DOUBLE_EQ(m.accuracy, static_cast<double>(trace) / static_cast<double>(total));
  EXPECT_GE(m.touch_rate, 0.0);
  EXPECT_LE(m.touch_rate, 1.0);
  for (const auto& e : a.episodes) {
    EXPECT_LE(static_cast<int>(e.steps.size()), c.max_steps);
    if (e.split == "test") {
      ASSERT_TRUE(e.prediction && e.correct);
      EXPECT_EQ(*e.correct, *e.prediction == e.class_name);
    }
  }
}

TEST_F(BenchRun, SingleClassIsPerfect) {
  auto c = config_for({"sphere"}, 4);
  c.max_steps = 120;
  EXPECT_EQ(run_benchmark(c, *dataset_).metrics.accuracy, 1.0);
}

TEST_F(BenchRun, TestOnTrainWithOneObjectPerClass) {
  auto c = config_for({"cube", "sphere"}, 1);
  c.test_on_train = true;
  c.max_steps = 250;
  const BenchmarkResult r = run_benchmark(c, *dataset_);
  EXPECT_EQ(r.split.train, r.split.test);
  EXPECT_EQ(r.metrics.accuracy, 1.0);
}

TEST_F(BenchRun, PluggableHooks) {
  struct Idle : Policy {
    void reset() override {}
    int act(const Observation&, bool) override { return action::kNoOp; }
  };
  int policies = 0;
  BenchmarkHooks hooks;
  hooks.make_policy = [&] {
    ++policies;
    return std::make_unique<Idle>();
  };
  auto c = config_for({"cube", "sphere"}, 2);
  c.max_steps = 20;
  const BenchmarkResult r = run_benchmark(c, *dataset_, hooks);
  EXPECT_EQ(policies, 1);
  EXPECT_EQ(r.metrics.test_episodes_with_touch, 0u);
  EXPECT_FALSE(r.metrics.mean_steps_to_first_touch.has_value());
  // All-zero features tie on every centroid: the smaller label wins.
  for (const auto& e : r.episodes) {
    if (e.split == "test") EXPECT_EQ(e.prediction, std::optional<std::string>("cube"));
  }
}

TEST_F(BenchRun, WritesReportAndEpisodes) {
  auto c = config_for({"cube", "sphere"}, 2);
  c.max_steps = 60;
  const BenchmarkResult r = run_benchmark(c, *dataset_);
  const fs::path dir = fs::temp_directory_path() / "touchsim_bench_out";
  fs::remove_all(dir);
  write_benchmark(r, dir);
  const auto report = nlohmann::json::parse(std::ifstream(dir / "report.json"));
  EXPECT_EQ(report.at("env_id"), kEnvId);
  EXPECT_EQ(report.at("metrics").at("accuracy"), r.metrics.accuracy);
  EXPECT_EQ(report.at("config"), nlohmann::json(c));
  std::ifstream lines(dir / "episodes.jsonl");
  std::size_t n = 0;
  for (std::string line; std::getline(lines, line); ++n) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("object_id"));
    EXPECT_TRUE(j.at("steps").is_array());
  }
  EXPECT_EQ(n, r.episodes.size());
  fs::remove_all(dir);
}
