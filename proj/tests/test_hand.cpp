#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "touchsim/hand.hpp"

using namespace touchsim;

namespace {

constexpr std::size_t kIndex = static_cast<std::size_t>(Finger::kIndex);

// Planar two-link chain in the y-z plane, flexion curling toward -z.
Vec3 chain_tip(const Vec3& base, const FingerModel& f, double a, double b) {
  return base + f.attach + Vec3{0, std::cos(a), -std::sin(a)} * f.link_lengths[0] +
         Vec3{0, std::cos(a + b), -std::sin(a + b)} * f.link_lengths[1];
}

HandState random_state(std::mt19937_64& g, const HandModel& m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HandState s;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const JointLimit lim = m.fingers[j / 2].limits[j % 2];
    s.joint_angles[j] = lim.low + u(g) * (lim.high - lim.low);
  }
  s.base_position = {u(g) - 0.5, u(g) - 0.5, u(g) - 0.5};
  return s;
}

void expect_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

}  // namespace

TEST(DefaultHand, DocumentedConstants) {
  const HandModel m = default_hand();
  EXPECT_EQ(m.version, kHandModelVersion);
  EXPECT_EQ(m.palm_size, (Vec3{0.08, 0.02, 0.08}));
  EXPECT_EQ(m.finger(Finger::kIndex).link_lengths[0], 0.04);
  EXPECT_EQ(m.finger(Finger::kIndex).link_lengths[1], 0.03);
  EXPECT_EQ(m.sensor.rows, 40u);
  EXPECT_EQ(m.sensor.cols, 40u);
  EXPECT_DOUBLE_EQ(m.sensor.size, 0.012);
  EXPECT_DOUBLE_EQ(m.sensor.pitch(), 0.0003);
  EXPECT_DOUBLE_EQ(m.sensor.ray_length, 0.0015);
  for (const auto& f : m.fingers) {
    EXPECT_GT(f.link_lengths[0], 0.0);
    EXPECT_GT(f.link_lengths[1], 0.0);
    for (const auto& lim : f.limits) {
      EXPECT_EQ(lim.low, 0.0);
      EXPECT_DOUBLE_EQ(lim.high, kPi / 2);
    }
  }
  EXPECT_EQ(hand_model_to_json(default_hand()), hand_model_to_json(m));
}

TEST(DefaultHand, MatchesPublishedTable) {
  std::ifstream in(std::string(TOUCHSIM_DATA) + "/hand_constants.json");
  ASSERT_TRUE(in) << "data/hand_constants.json missing";
  const nlohmann::json table = nlohmann::json::parse(in);
  EXPECT_EQ(table, hand_model_to_json(default_hand()));
}

TEST(ForwardKinematics, IndexTipAtRestMatchesChain) {
  const HandModel m = default_hand();
  const HandPose pose = forward_kinematics(m, HandState{});
  const Vec3 want = chain_tip({}, m.finger(Finger::kIndex), 0, 0);
  expect_near(pose.fingers[kIndex].tip, want, 1e-15);
  // Hand-multiplied: attach (-0.024, 0.01, 0) plus 0.07 along +y.
  expect_near(want, Vec3{-0.024, 0.08, 0.0}, 1e-15);
  expect_near(pose.sensor.normal, Vec3{0, 1, 0}, 1e-15);
  expect_near(pose.sensor.center, want, 1e-15);
}

TEST(ForwardKinematics, ChainOracleForRandomStates) {
  const HandModel m = default_hand();
  std::mt19937_64 g(3);
  for (int i = 0; i < 500; ++i) {
    const HandState s = random_state(g, m);
    const HandPose pose = forward_kinematics(m, s);
    for (std::size_t f = 0; f < kFingerCount; ++f) {
      const Vec3 want = chain_tip(s.base_position, m.fingers[f], s.joint_angles[f * 2], s.joint_angles[f * 2 + 1]);
      expect_near(pose.fingers[f].tip, want, 1e-12);
    }
    const double phi = s.joint_angles[2] + s.joint_angles[3];
    expect_near(pose.sensor.normal, Vec3{0, std::cos(phi), -std::sin(phi)}, 1e-12);
    expect_near(pose.sensor.row_axis, Vec3{0, std::sin(phi), std::cos(phi)}, 1e-12);
    expect_near(pose.sensor.col_axis, Vec3{1, 0, 0}, 1e-12);
  }
}

TEST(ForwardKinematics, FullyCurledIndexPointsBack) {
  const HandModel m = default_hand();
  HandState s;
  s.joint_angles[2] = s.joint_angles[3] = kPi / 2;
  const HandPose pose = forward_kinematics(m, s);
  const Vec3 rel = pose.fingers[kIndex].tip - pose.palm.translation;
  EXPECT_LT(rel.y, 0.0);
  expect_near(pose.fingers[kIndex].tip, chain_tip({}, m.finger(Finger::kIndex), kPi / 2, kPi / 2), 1e-15);
}

TEST(ForwardKinematics, BaseTranslationMovesEverythingExactly) {
  const HandModel m = default_hand();
  std::mt19937_64 g(11);
  for (int i = 0; i < 200; ++i) {
    HandState s = random_state(g, m);
    const HandPose a = forward_kinematics(m, s);
    const Vec3 t{0.125, -0.25, 0.0625};  // exact binary offsets
    s.base_position += t;
    const HandPose b = forward_kinematics(m, s);
    for (std::size_t k = 0; k < kTaxelCount; ++k) expect_near(b.sensor.points[k] - a.sensor.points[k], t, 1e-12);
    for (std::size_t f = 0; f < kFingerCount; ++f) expect_near(b.fingers[f].tip - a.fingers[f].tip, t, 1e-12);
  }
}

TEST(ForwardKinematics, Deterministic) {
  const HandModel m = default_hand();
  std::mt19937_64 g(12);
  const HandState s = random_state(g, m);
  const HandPose a = forward_kinematics(m, s);
  const HandPose b = forward_kinematics(m, s);
  EXPECT_EQ(a.sensor.points, b.sensor.points);
}

TEST(ForwardKinematics, RejectsInvalidState) {
  const HandModel m = default_hand();
  HandState s;
  s.joint_angles[0] = -0.1;
  EXPECT_THROW(forward_kinematics(m, s), std::invalid_argument);
  HandState far;
  far.base_position.x = 1.5;
  EXPECT_THROW(forward_kinematics(m, far), std::invalid_argument);
}

TEST(SensorFrame, GridSpacingAndPlanarity) {
  const HandModel m = default_hand();
  std::mt19937_64 g(21);
  for (int i = 0; i < 100; ++i) {
    const HandPose pose = forward_kinematics(m, random_state(g, m));
    const SensorFrame& sf = pose.sensor;
    ASSERT_EQ(sf.points.size(), kTaxelCount);
    EXPECT_NEAR(norm(sf.normal), 1.0, 1e-12);
    for (std::size_t r = 0; r < kTaxelRows; ++r) {
      for (std::size_t c = 0; c < kTaxelCols; ++c) {
        const Vec3& p = sf.points[r * kTaxelCols + c];
        EXPECT_NEAR(dot(p - sf.center, sf.normal), 0.0, 1e-9);
        if (c + 1 < kTaxelCols) EXPECT_NEAR(norm(sf.points[r * kTaxelCols + c + 1] - p), 0.0003, 1e-9);
        if (r + 1 < kTaxelRows) EXPECT_NEAR(norm(sf.points[(r + 1) * kTaxelCols + c] - p), 0.0003, 1e-9);
      }
    }
    // Column 0 on the thumb (-x) side, row 0 palmar.
    EXPECT_LT(sf.points[0].x, sf.points[kTaxelCols - 1].x);
    EXPECT_NEAR(dot(sf.points[kTaxelCols] - sf.points[0], sf.row_axis), 0.0003, 1e-12);
  }
}

TEST(SensorFrame, RowZeroIsPalmarAtRest) {
  const HandPose pose = forward_kinematics(default_hand(), HandState{});
  EXPECT_LT(pose.sensor.points.front().z, pose.sensor.points.back().z);
  EXPECT_NEAR(pose.sensor.points.front().z, -0.006 + 0.00015, 1e-12);
}

TEST(ForwardKinematics, LinksAreRigid) {
  const HandModel m = default_hand();
  const HandPose rest = forward_kinematics(m, HandState{});
  std::mt19937_64 g(31);
  auto d = [](const Vec3& a, const Vec3& b) { return norm(a - b); };
  for (int i = 0; i < 300; ++i) {
    const HandPose p = forward_kinematics(m, random_state(g, m));
    for (std::size_t f = 0; f < kFingerCount; ++f) {
      EXPECT_NEAR(d(p.fingers[f].proximal.translation, p.fingers[f].distal.translation),
                  m.fingers[f].link_lengths[0], 1e-9);
      EXPECT_NEAR(d(p.fingers[f].distal.translation, p.fingers[f].tip), m.fingers[f].link_lengths[1], 1e-9);
    }
    // Taxel corners stay rigidly attached to the distal joint.
    for (std::size_t k : {std::size_t{0}, kTaxelCols - 1, kTaxelCount - 1}) {
      EXPECT_NEAR(d(p.sensor.points[k], p.fingers[kIndex].distal.translation),
                  d(rest.sensor.points[k], rest.fingers[kIndex].distal.translation), 1e-9);
    }
    EXPECT_NEAR(d(p.sensor.points[0], p.sensor.points[kTaxelCount - 1]),
                d(rest.sensor.points[0], rest.sensor.points[kTaxelCount - 1]), 1e-9);
  }
}

TEST(ClampState, Examples) {
  const HandModel m = default_hand();
  HandState s;
  s.joint_angles[3] = 1.7;
  s.joint_angles[4] = -0.2;
  s.base_position = {2.0, -3.0, 0.5};
  const HandState c = clamp_state(m, s);
  EXPECT_DOUBLE_EQ(c.joint_angles[3], kPi / 2);
  EXPECT_EQ(c.joint_angles[4], 0.0);
  EXPECT_EQ(c.base_position, (Vec3{1.0, -1.0, 0.5}));
  EXPECT_TRUE(is_valid_state(m, c));

  HandState ok;
  ok.joint_angles[1] = 0.3;
  ok.base_position = {0.1, 0.2, 0.3};
  EXPECT_EQ(clamp_state(m, ok), ok);
}

TEST(ClampState, IdempotentOnRandomStates) {
  const HandModel m = default_hand();
  std::mt19937_64 g(41);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    HandState s;
    for (double& a : s.joint_angles) a = u(g);
    s.base_position = {u(g), u(g), u(g)};
    const HandState once = clamp_state(m, s);
    EXPECT_EQ(clamp_state(m, once), once);
    EXPECT_TRUE(is_valid_state(m, once));
  }
}

TEST(FingertipProbes, AreDistalJointAndTip) {
  const HandModel m = default_hand();
  const HandPose p = forward_kinematics(m, HandState{});
  const auto probes = fingertip_probes(p);
  EXPECT_EQ(probes[0], p.fingers[kIndex].distal.translation);
  EXPECT_EQ(probes[1], p.fingers[kIndex].tip);
}
