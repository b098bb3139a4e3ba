#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dcarl/cli.hpp"

using namespace dcarl;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dcarl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(std::vector<std::string> args) {
    args.insert(args.begin() + 1, {"--out", dir_.string()});
    std::ostringstream o, e;
    const int code = cli::run_cli(args, o, e);
    return {code, o.str(), e.str()};
  }

  std::string slurp(const std::string& name) const {
    std::ifstream f(dir_ / name, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
  }

  std::vector<std::vector<std::string>> csv(const std::string& name) const {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(name));
    std::string line;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::string cell;
      std::istringstream ls(line);
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      rows.push_back(cells);
    }
    return rows;
  }

  std::size_t col(const std::vector<std::vector<std::string>>& rows, const std::string& name) const {
    for (std::size_t i = 0; i < rows[0].size(); ++i)
      if (rows[0][i] == name) return i;
    ADD_FAILURE() << "no column " << name;
    return 0;
  }

  void expect_rectangular(const std::string& name) const {
    const auto rows = csv(name);
    ASSERT_GE(rows.size(), 2u);
    for (const auto& r : rows) EXPECT_EQ(r.size(), rows[0].size()) << name;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, PlanDefaults) {
  const auto r = run({"plan"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("keyframes   41 (last 320)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("plan valid"), std::string::npos);
  std::ifstream f(dir_ / "plan.txt");
  const auto plan = read_plan(f);
  EXPECT_TRUE(validate_plan(plan).empty());
  EXPECT_EQ(plan.keyframes.size(), 41u);
}

TEST_F(Cli, PlanSingleFrame) {
  const auto r = run({"plan", "--set", "frames=1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("keyframes   1 "), std::string::npos);
  EXPECT_NE(r.out.find("segments    1\n"), std::string::npos);
}

TEST_F(Cli, InvalidInputsExitTwo) {
  auto r = run({"plan", "--set", "segment_length=1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("segment length must exceed overlap"), std::string::npos);
  EXPECT_EQ(run({"plan", "--set", "nonsense=1"}).code, 2);
  EXPECT_EQ(run({"plan", "--set", "frames=abc"}).code, 2);
  EXPECT_EQ(run({"plan", "--bogus"}).code, 2);
  EXPECT_EQ(run({"plan", "--config", (dir_ / "missing.cfg").string()}).code, 2);
  EXPECT_EQ(run({"simulate", "--set", "scenario=sideways"}).code, 2);
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
  {
    std::ofstream f(dir_ / "run.cfg");
    f << "frames = 33\nseed = 5\n# comment\n";
  }
  auto r = run({"plan", "--config", (dir_ / "run.cfg").string(), "--set", "frames=41"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(dir_ / "plan.txt");
  EXPECT_EQ(read_plan(f).total_frames, 41);
  {
    std::ofstream bad(dir_ / "bad.cfg");
    bad << "frames = 3\nframes = 4\n";
  }
  r = run({"plan", "--config", (dir_ / "bad.cfg").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST_F(Cli, ConfigRoundTrips) {
  cli::ExperimentConfig c;
  c.frames = 77;
  c.strides = {4, 16};
  c.alpha_c = 0.123456789012345;
  c.seed = 18446744073709551615ull;
  c.scenario = "global";
  c.momentum = false;
  c.trajectory = "path/to/traj.txt";
  std::stringstream io;
  cli::write_config(io, c);
  cli::ExperimentConfig back;
  cli::apply_config(back, io);
  EXPECT_EQ(back, c);
}

TEST_F(Cli, BoundsArithmeticSum) {
  const auto r = run({"bounds", "--set", "lipschitz=1", "--set", "eta=0.1", "--set", "frames=51"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv("bounds.csv");
  EXPECT_EQ(rows[0], (std::vector<std::string>{"frame", "ar_upper", "ar_lower", "ar_variance", "dcar_bound", "anchor",
                                               "leakage", "noise", "diverged"}));
  EXPECT_NEAR(std::stod(rows.back()[col(rows, "ar_upper")]), 5.0, 1e-12);
  expect_rectangular("bounds.csv");
}

TEST_F(Cli, BoundsUnifiedConstant) {
  const auto r = run({"bounds", "--set", "strides=4", "--set", "dv0=0.5", "--set", "sigma_int=0.2", "--set",
                      "c_kf=0.1", "--set", "scenario=global", "--set", "frames=40"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv("bounds.csv");
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_NEAR(std::stod(rows[i][col(rows, "dcar_bound")]), 1.0698003589195, 1e-12);
}

TEST_F(Cli, BoundsDivergenceFlag) {
  const auto r = run({"bounds", "--set", "lipschitz=1.05", "--set", "frames=20000", "--svg"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv("bounds.csv");
  const auto d = col(rows, "diverged");
  EXPECT_EQ(rows[100][d], "0");
  EXPECT_EQ(rows.back()[d], "1");
  EXPECT_EQ(std::stod(rows.back()[col(rows, "ar_upper")]), 1e300);
  EXPECT_NE(slurp("bounds.svg").find("<polyline"), std::string::npos);
}

TEST_F(Cli, SimulateDeterministicNoViolations) {
  const auto r = run({"simulate", "--set", "dv0=0.3", "--set", "trials=4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("bound violations: 0"), std::string::npos);
  const auto v = csv("violations.csv");
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_EQ(v[i][col(v, "violations")], "0");
  for (auto name : {"trace_ar.csv", "trace_dcar_global.csv", "trace_dcar_downsampled_ar.csv", "curves.csv",
                    "violations.csv"})
    expect_rectangular(name);
}

TEST_F(Cli, SimulateZeroDefect) {
  const auto r = run({"simulate", "--set", "mu=0", "--set", "c_kf=0", "--set", "frames=65"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (auto name : {"trace_ar.csv", "trace_dcar_global.csv", "trace_dcar_downsampled_ar.csv"}) {
    const auto rows = csv(name);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][col(rows, "err_norm")]), 0.0) << name;
  }
}

TEST_F(Cli, SimulateSuppressionRatio) {
  const auto r = run({"simulate", "--set", "scenario=downsampled_ar"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = csv("violations.csv");
  const double ratio = std::stod(v[1][col(v, "final_ratio")]);
  EXPECT_NEAR(ratio, 8.0, 1.6);
}

TEST_F(Cli, SimulateIsByteDeterministic) {
  const std::vector<std::string> args{"simulate", "--seed", "42", "--set", "sigma=0.02", "--set", "sigma_int=0.05",
                                      "--set", "dv0=0.2", "--set", "trials=20", "--set", "frames=97"};
  ASSERT_EQ(run(args).code, 0);
  const auto first = slurp("curves.csv") + slurp("trace_dcar_global.csv") + slurp("violations.csv");
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(slurp("curves.csv") + slurp("trace_dcar_global.csv") + slurp("violations.csv"), first);
}

// ---------------------------------------------------------------------------

namespace {

void write_traj(const fs::path& p, const Trajectory& t) {
  std::ofstream f(p);
  write_trajectory(f, t);
}

Trajectory helix(int n) {
  std::vector<Pose> poses;
  for (int i = 0; i < n; ++i) {
    const double a = 0.15 * i;
    poses.emplace_back(axis_angle(Eigen::Vector3d(0.2, 0.3, 1.0), a), Eigen::Vector3d(std::cos(a), std::sin(a), 0.05 * i),
                       i);
  }
  return Trajectory(poses);
}

}  // namespace

TEST_F(Cli, EvalSelfAndSimilarityCopy) {
  const Trajectory ref = helix(40);
  write_traj(dir_ / "ref.txt", ref);
  auto r = run({"eval", (dir_ / "ref.txt").string(), (dir_ / "ref.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = csv("metrics.csv");
  EXPECT_EQ(rows[0], (std::vector<std::string>{"name", "value", "n_items"}));
  EXPECT_LT(std::stod(rows[1][1]), 1e-12);  // ate
  EXPECT_LT(std::stod(rows[2][1]), 1e-6);   // are

  std::vector<Pose> est;
  const Eigen::Quaterniond q = axis_angle(Eigen::Vector3d(1, -1, 0.5), 0.9);
  for (const auto& p : ref.poses()) est.emplace_back(q * p.rotation, 3.0 * (q * p.translation) + Eigen::Vector3d(1, 2, 3), p.frame_index);
  write_traj(dir_ / "est.txt", Trajectory(est));
  r = run({"eval", (dir_ / "est.txt").string(), (dir_ / "ref.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  rows = csv("metrics.csv");
  EXPECT_LT(std::stod(rows[1][1]), 1e-9);
  EXPECT_LT(std::stod(rows[2][1]), 1e-6);
  EXPECT_EQ(run({"eval", (dir_ / "est.txt").string(), (dir_ / "ref.txt").string(), "--align", "se3"}).code, 0);
  EXPECT_EQ(run({"eval", (dir_ / "est.txt").string(), (dir_ / "ref.txt").string(), "--align", "sim2"}).code, 2);
}

TEST_F(Cli, EvalDensifiesSparseEstimate) {
  const Trajectory ref = helix(41);
  std::vector<Pose> sparse;
  for (std::size_t i = 0; i < ref.size(); i += 8) sparse.push_back(ref[i]);
  write_traj(dir_ / "ref.txt", ref);
  write_traj(dir_ / "sparse.txt", Trajectory(sparse));
  const auto r = run({"eval", (dir_ / "sparse.txt").string(), (dir_ / "ref.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("densified"), std::string::npos);
  EXPECT_EQ(csv("metrics.csv")[1][2], "41");
}

TEST_F(Cli, EvalMalformedLineCited) {
  std::ofstream f(dir_ / "bad.txt");
  for (int i = 0; i < 6; ++i) f << i << " 0 0 0 0 0 0 1\n";
  f << "6 0 0 zero 0 0 0 1\n";
  f.close();
  write_traj(dir_ / "ref.txt", helix(7));
  const auto r = run({"eval", (dir_ / "bad.txt").string(), (dir_ / "ref.txt").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 7"), std::string::npos) << r.err;
  EXPECT_EQ(run({"eval", (dir_ / "nope.txt").string(), (dir_ / "ref.txt").string()}).code, 2);
}

// ---------------------------------------------------------------------------

TEST_F(Cli, AblateGridRows) {
  const auto r = run({"ablate", "--set", "dv0=0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv("ablate.csv");
  ASSERT_EQ(rows.size(), 4u);
  const auto l = col(rows, "leakage_term");
  EXPECT_LT(std::stod(rows[1][l]), std::stod(rows[2][l]));
  EXPECT_LT(std::stod(rows[2][l]), std::stod(rows[3][l]));
  EXPECT_NEAR(std::stod(rows[2][l]), 2 * std::sqrt(3.0) / 9 * 8 * 0.5, 1e-12);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][col(rows, "violations")], "0");
  expect_rectangular("ablate.csv");
}

TEST_F(Cli, AblateEmptyOrBadGrid) {
  EXPECT_EQ(run({"ablate", "--grid", ""}).code, 2);
  EXPECT_EQ(run({"ablate", "--grid", "8:12"}).code, 2);
  EXPECT_EQ(run({"ablate", "--grid", "8"}).code, 2);
}

TEST_F(Cli, AblateStrideFilter) {
  const auto r = run({"ablate", "--grid", "8:16"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv("ablate.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][col(rows, "keyframes_gen")], "41");
  EXPECT_EQ(rows[1][col(rows, "keyframes_int")], "21");
  const auto gen = schedule::keyframes_at_stride(321, 8);
  const auto in = schedule::filter_keyframes(gen, 16);
  for (std::size_t i = 0; i < in.size(); ++i) EXPECT_EQ(in[i], gen[2 * i]);
}

TEST_F(Cli, HelpExitsZero) {
  std::ostringstream o, e;
  EXPECT_EQ(cli::run_cli({"--help"}, o, e), 0);
  EXPECT_NE(o.str().find("simulate"), std::string::npos);
  EXPECT_EQ(cli::run_cli({}, o, e), 2);
}
