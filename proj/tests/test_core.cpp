#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dcarl/kv.hpp"
#include "dcarl/latent.hpp"
#include "dcarl/pose.hpp"
#include "dcarl/random.hpp"
#include "dcarl/trajectory.hpp"
#include "oracles.hpp"

using namespace dcarl;

namespace {

constexpr double kPi = std::numbers::pi;

Pose random_pose(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Pose(Eigen::Quaterniond(oracle::random_rotation(rng)), Eigen::Vector3d(n(rng), n(rng), n(rng)));
}

}  // namespace

TEST(Pose, CanonicalSign) {
  Eigen::Quaterniond q(-0.5, 0.5, -0.5, 0.5);
  auto c = canonicalize(q);
  EXPECT_GT(c.w(), 0.0);
  EXPECT_NEAR(std::abs(c.dot(q.normalized())), 1.0, 1e-15);
  // w == 0: first nonzero of (x, y, z) made positive
  auto c2 = canonicalize(Eigen::Quaterniond(0.0, 0.0, -1.0, 0.0));
  EXPECT_EQ(c2.y(), 1.0);
}

TEST(Pose, IdentityComposeIsNoop) {
  std::mt19937_64 rng(3);
  const Pose p = random_pose(rng);
  const Pose r = pose_compose(Pose::identity(), p);
  EXPECT_TRUE(r.rotation.coeffs().isApprox(p.rotation.coeffs(), 1e-15));
  EXPECT_TRUE(r.translation.isApprox(p.translation));
}

TEST(Pose, ComposeWithInverseIsIdentity) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const Pose p = random_pose(rng);
    const Pose r = pose_compose(p, pose_inverse(p));
    EXPECT_LT(rotation_angle(r.rotation, Eigen::Quaterniond::Identity()), 1e-9);
    EXPECT_LT(r.translation.norm(), 1e-9);
  }
}

TEST(Pose, QuarterTurnsMakeHalfTurn) {
  const Pose q(axis_angle(Eigen::Vector3d::UnitZ(), kPi / 2), Eigen::Vector3d::Zero());
  const Pose r = pose_compose(q, q);
  const Eigen::Matrix3d Rz = q.rotation_matrix() * q.rotation_matrix();
  EXPECT_TRUE(r.rotation_matrix().isApprox(Rz, 1e-12));
  EXPECT_NEAR(rotation_angle(r.rotation, Eigen::Quaterniond::Identity()), kPi, 1e-9);
  EXPECT_NEAR(r.rotation_matrix()(0, 0), -1.0, 1e-12);
}

TEST(Pose, ComposeMatchesMatrixOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng);
    const Pose c = pose_compose(a, b);
    const Eigen::Matrix3d R = a.rotation_matrix() * b.rotation_matrix();
    const Eigen::Vector3d t = a.rotation_matrix() * b.translation + a.translation;
    EXPECT_LT((c.rotation_matrix() - R).norm(), 1e-12);
    EXPECT_LT((c.translation - t).norm(), 1e-12);
  }
}

TEST(Pose, SlerpMatchesGeodesicOracle) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Matrix3d R0 = oracle::random_rotation(rng), R1 = oracle::random_rotation(rng);
    const double t = u(rng);
    const Eigen::Quaterniond q = slerp(Eigen::Quaterniond(R0), Eigen::Quaterniond(R1), t);
    EXPECT_LT(oracle::matrix_angle(q.toRotationMatrix(), oracle::geodesic(R0, R1, t)), 1e-9);
  }
}

TEST(Pose, SlerpMidpointOfQuarterTurn) {
  const auto q = slerp(Eigen::Quaterniond::Identity(), axis_angle(Eigen::Vector3d::UnitZ(), kPi / 2), 0.5);
  EXPECT_NEAR(rotation_angle(q, Eigen::Quaterniond::Identity()), kPi / 4, 1e-9);
}

TEST(Pose, SlerpNearlyParallelFallsBackToNlerp) {
  const auto q0 = Eigen::Quaterniond::Identity();
  const auto q1 = axis_angle(Eigen::Vector3d::UnitX(), 1e-9);
  const auto q = slerp(q0, q1, 0.5);
  EXPECT_NEAR(q.norm(), 1.0, 1e-15);
  EXPECT_NEAR(rotation_angle(q, q0), 0.5e-9, 1e-12);
}

TEST(Pose, SlerpTakesShortArc) {
  const auto q0 = axis_angle(Eigen::Vector3d::UnitZ(), 0.0);
  Eigen::Quaterniond q1 = axis_angle(Eigen::Vector3d::UnitZ(), 0.4);
  q1.coeffs() = -q1.coeffs();  // same rotation, opposite hemisphere
  EXPECT_NEAR(rotation_angle(slerp(q0, q1, 0.5), q0), 0.2, 1e-12);
}

// ---------------------------------------------------------------------------

TEST(Trajectory, ParsesAndRoundTrips) {
  std::istringstream in(
      "# header\n"
      "0 0 0 0 0 0 0 1\n"
      "\n"
      "2 1 2 3 0 0 0.7071067811865476 0.7071067811865476  # trailing comment\n"
      "5 -1 0.5 2 0 0 0 2\n");
  const Trajectory t = read_trajectory(in);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.index(1), 2);
  EXPECT_NEAR(t[2].rotation.norm(), 1.0, 1e-15);  // normalised on load
  std::stringstream io;
  write_trajectory(io, t);
  const Trajectory back = read_trajectory(io);
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(back.index(i), t.index(i));
    EXPECT_EQ(back[i].translation, t[i].translation);
    EXPECT_EQ(back[i].rotation.coeffs(), t[i].rotation.coeffs());
  }
}

TEST(Trajectory, ErrorsCiteLine) {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_trajectory(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("0 0 0 0 0 0 0 1\n1 0 0 0 0 0 1\n"), 2u);         // too few fields
  EXPECT_EQ(line_of("0 0 0 0 0 0 0 1\n1 0 0 0 0 0 0 1 9\n"), 2u);     // trailing field
  EXPECT_EQ(line_of("0 0 0 0 0 0 0 1\n#\nx 0 0 0 0 0 0 1\n"), 3u);    // bad index
  EXPECT_EQ(line_of("0 0 0 0 0 0 0 0\n"), 1u);                        // zero quaternion
  EXPECT_EQ(line_of("3 0 0 0 0 0 0 1\n3 0 0 0 0 0 0 1\n"), 2u);       // not increasing
  EXPECT_EQ(line_of("0 0 nan 0 0 0 0 1\n"), 1u);
  EXPECT_EQ(line_of("0 0 0 0 0 0 0 1\n1 0 0 0 0 0 0 1\n2 0 0 0 0 0 0 1\n3 0 0 0 0 0 0 1\n"
                    "4 0 0 0 0 0 0 1\n5 0 0 0 0 0 0 1\n6 0 0 oops 0 0 0 1\n"),
            7u);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(read_trajectory(empty), ParseError);
}

TEST(Trajectory, ConstructorValidates) {
  EXPECT_THROW(Trajectory({}), InvalidInput);
  EXPECT_THROW(Trajectory({Pose::identity()}), InvalidInput);
  EXPECT_THROW(Trajectory({Pose::identity(2), Pose::identity(1)}), InvalidInput);
  EXPECT_NO_THROW(Trajectory({Pose::identity(0), Pose::identity(4)}));
}

// ---------------------------------------------------------------------------

TEST(LatentSeq, Validates) {
  EXPECT_THROW(LatentSeq({Latent::Zero(2), Latent::Zero(3)}), InvalidInput);
  Latent bad = Latent::Zero(2);
  bad[1] = std::nan("");
  EXPECT_THROW(LatentSeq({bad}), InvalidInput);
  EXPECT_THROW(LatentSeq({Latent(0)}), InvalidInput);
}

TEST(LatentSeq, SliceKeepsIndices) {
  std::vector<Latent> f;
  for (int i = 0; i < 5; ++i) f.push_back(Latent::Constant(2, i));
  const LatentSeq s(f, 10);
  const auto sub = s.slice(2, 2);
  EXPECT_EQ(sub.start_index(), 12);
  EXPECT_EQ(sub[0], Latent::Constant(2, 2));
  EXPECT_THROW(s.slice(4, 2), InvalidInput);
  EXPECT_TRUE(s.slice(0, 5) == s);
  EXPECT_FALSE(sub == s);
}

// ---------------------------------------------------------------------------

TEST(KeyValue, ParsesWithCommentsAndLines) {
  std::istringstream in("# c\n a = 1 \n\nb=two words # note\n");
  const auto kv = parse_key_values(in);
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("a").value, "1");
  EXPECT_EQ(kv.at("b").value, "two words");
  EXPECT_EQ(kv.at("b").line, 4u);
}

TEST(KeyValue, RejectsDuplicatesAndMissingEquals) {
  std::istringstream dup("a = 1\na = 2\n");
  EXPECT_THROW(parse_key_values(dup), ParseError);
  std::istringstream noeq("a 1\n");
  EXPECT_THROW(parse_key_values(noeq), ParseError);
}

TEST(KeyValue, DoubleFormattingRoundTrips) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_THROW(parse_double("1.5x"), ParseError);
  EXPECT_THROW(parse_int("3.0"), ParseError);
  EXPECT_EQ(split_list("8, 16 ,4", ','), (std::vector<std::string>{"8", "16", "4"}));
}

// ---------------------------------------------------------------------------

TEST(Random, DerivedStreamsAreReproducibleAndDistinct) {
  EXPECT_EQ(derive_seed(1, "a", 0), derive_seed(1, "a", 0));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "b", 0));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(2, "a", 0));
  Rng a = make_rng(7, "x", 3), b = make_rng(7, "x", 3);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}
