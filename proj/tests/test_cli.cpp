// Copyright 2026 The omegagait Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "omegagait/geomech.hpp"
#include "omegagait/io.hpp"

namespace og = omegagait;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("omegagait_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  // Runs the CLI, captures stdout+stderr into output_, returns the exit code.
  int run(const std::string& args, const std::string& env = "") {
    const fs::path log = dir_ / "stdout.txt";
    const std::string cmd = env + " " + OMEGAGAIT_CLI + std::string(" ") + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    output_ = ss.str();
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::string output_;
};

const char* kQuick = R"([dynamics]
steps_per_cycle = 64
[optimizer]
starts = 1
screen_samples = 8
screen_steps = 64
grid_points = 3
max_rounds = 1
pattern_tol = 0.2
feasibility_samples = 32
)";

TEST_F(CliTest, MalformedConfigExitsTwoWithoutOutputs) {
  const auto cfg = write("bad.ini", "[robot]\nn_joints = eight\n");
  const auto out = dir_ / "out";
  EXPECT_EQ(run("simulate --config " + cfg.string() + " --out " + out.string()), 2);
  EXPECT_NE(output_.find("line 2"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, BadFlagsExitTwo) {
  const auto cfg = write("ok.ini", "");
  EXPECT_EQ(run("simulate --config " + cfg.string() + " --format png"), 2);
  EXPECT_EQ(run("dance --config " + cfg.string()), 2);
  EXPECT_EQ(run("simulate"), 2);
  EXPECT_EQ(run("simulate --config " + (dir_ / "missing.ini").string()), 2);
}

TEST_F(CliTest, SimulateWritesTrajectoryAndPlot) {
  const auto cfg = write("sim.ini", "[dynamics]\nsteps_per_cycle = 64\n");
  const auto out = dir_ / "sim";
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + out.string() + " --format csv+svg"), 0) << output_;
  EXPECT_NE(output_.find("angular displacement:"), std::string::npos);
  EXPECT_EQ(slurp(out / "trajectory.csv").rfind("# omegagait-csv v1\nt,x,y,theta_deg,axis_deg", 0), 0u);
  const std::string svg = slurp(out / "trajectory.svg");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  for (const auto& e : fs::directory_iterator(out)) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST_F(CliTest, ZeroAmplitudeDoesNotMove) {
  const auto cfg = write("zero.ini", "[gait]\na_f_deg = 0\na_o_deg = 0\n[dynamics]\nsteps_per_cycle = 64\n");
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + (dir_ / "z").string()), 0) << output_;
  EXPECT_EQ(output_, "angular displacement: 0.0000 deg/cycle\n");
}

TEST_F(CliTest, SolverFailureExitsThree) {
  // A regularization far below double resolution of the contact speeds
  // leaves Newton without a usable curvature.
  const auto cfg = write("stiff.ini", "[dynamics]\nsteps_per_cycle = 64\nepsilon = 1e-300\n");
  const auto out = dir_ / "stiff";
  EXPECT_EQ(run("simulate --config " + cfg.string() + " --out " + out.string()), 3) << output_;
  EXPECT_FALSE(fs::exists(out / "trajectory.csv"));
}

TEST_F(CliTest, SweepIsIndependentOfJobCount) {
  const auto cfg = write("sweep.ini", std::string(kQuick) + "[sweep]\nk_o = 0, 1\n");
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --out " + (dir_ / "a").string() + " --jobs 1"), 0) << output_;
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --out " + (dir_ / "b").string() + " --jobs 2 --format csv+svg",
                "OMEGAGAIT_LOG=info"),
            0)
      << output_;
  EXPECT_NE(output_.find("sweep point"), std::string::npos);
  const std::string a = slurp(dir_ / "a" / "sweep.csv");
  EXPECT_EQ(a, slurp(dir_ / "b" / "sweep.csv"));
  EXPECT_NE(a.find("n_joints,joint_limit_deg,k_f,k_o,displacement_deg"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "b" / "sweep.svg"));
}

TEST_F(CliTest, OptimizeWritesReusableGait) {
  const auto cfg = write("opt.ini", kQuick);
  const auto out = dir_ / "opt";
  ASSERT_EQ(run("optimize --config " + cfg.string() + " --out " + out.string()), 0) << output_;
  EXPECT_TRUE(fs::exists(out / "optimization.csv"));
  // The emitted gait block is itself a valid configuration.
  const auto cfg2 = write("opt2.ini", "[dynamics]\nsteps_per_cycle = 64\n" + slurp(out / "optimized_gait.ini"));
  EXPECT_EQ(run("simulate --config " + cfg2.string() + " --out " + (dir_ / "again").string()), 0) << output_;
}

TEST_F(CliTest, HeightfunWritesGrids) {
  const auto cfg = write("hf.ini", "[heightfun]\nresolution = 17\n[dynamics]\nepsilon = 1e-3\n");
  const auto out = dir_ / "hf";
  ASSERT_EQ(run("heightfun --config " + cfg.string() + " --out " + out.string() + " --format csv+svg"), 0) << output_;
  for (const char* tag : {"tauf_af", "tauo_ao", "tauf_tauo"}) {
    std::ifstream in(out / (std::string("heightfun_") + tag + ".csv"));
    const auto hf = og::read_grid_csv(in);
    EXPECT_EQ(hf.resolution(), 17);
    EXPECT_TRUE(fs::exists(out / (std::string("feasibility_") + tag + ".csv")));
    EXPECT_TRUE(fs::exists(out / (std::string("heightfun_") + tag + ".svg")));
  }
  EXPECT_NE(output_.find("surface integral"), std::string::npos);
}

TEST_F(CliTest, ComplianceSummarizesPerSpacing) {
  const auto cfg = write("cp.ini", "[dynamics]\nsteps_per_cycle = 64\n[compliance]\nspacing_bl = 0, 0.3\nseeds = 1, 2\ncycles = 1\n");
  const auto out = dir_ / "cp";
  ASSERT_EQ(run("compliance --config " + cfg.string() + " --out " + out.string() + " --format csv+svg"), 0) << output_;
  const std::string summary = slurp(out / "compliance.csv");
  EXPECT_NE(summary.find("spacing_bl,open_mean_deg,open_std_deg,compliant_mean_deg,compliant_std_deg"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "compliance.svg"));
  EXPECT_TRUE(fs::exists(out / "amplitude" / "spacing_0.3_seed_2.csv"));

  // On an empty board the admittance state never leaves rest, so both
  // columns come from identical computations.
  std::istringstream runs(slurp(out / "compliance_runs.csv"));
  std::string line;
  int empty_rows = 0;
  while (std::getline(runs, line)) {
    if (line.rfind("0,", 0) != 0) continue;
    std::istringstream row(line);
    std::string spacing, seed, open, comp;
    std::getline(row, spacing, ',');
    std::getline(row, seed, ',');
    std::getline(row, open, ',');
    std::getline(row, comp, ',');
    EXPECT_EQ(open, comp);
    ++empty_rows;
  }
  EXPECT_EQ(empty_rows, 2);

  // Fixed seeds give byte-identical output.
  ASSERT_EQ(run("compliance --config " + cfg.string() + " --out " + (dir_ / "cp2").string()), 0) << output_;
  EXPECT_EQ(summary, slurp(dir_ / "cp2" / "compliance.csv"));
  EXPECT_EQ(slurp(out / "compliance_runs.csv"), slurp(dir_ / "cp2" / "compliance_runs.csv"));
}

TEST(Io, AtomicWriteLeavesNothingOnFailure) {
  const fs::path dir = fs::temp_directory_path() / "omegagait_io_test";
  fs::remove_all(dir);
  const fs::path target = dir / "nested" / "file.csv";
  EXPECT_THROW(og::write_atomically(target, [](std::ostream& os) {
                 os << "partial";
                 throw std::runtime_error("boom");
               }),
               std::runtime_error);
  EXPECT_FALSE(fs::exists(target));
  EXPECT_FALSE(fs::exists(fs::path(target.string() + ".tmp")));
  og::write_atomically(target, [](std::ostream& os) { os << "done"; });
  std::ifstream in(target);
  std::string s;
  in >> s;
  EXPECT_EQ(s, "done");
  fs::remove_all(dir);
}

TEST(Io, HeatmapMarksMaskedCells) {
  std::ostringstream os;
  Eigen::MatrixXd v(2, 2);
  v << 1.0, -1.0, std::nan(""), 0.0;
  og::write_heatmap_svg(os, "t", "x", "y", {0.0, 1.0}, {0.0, 1.0}, v, {{0.1, 0.1}, {0.9, 0.5}});
  const std::string s = os.str();
  EXPECT_NE(s.find("<svg"), std::string::npos);
  EXPECT_NE(s.find("pattern"), std::string::npos);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
}

// Stdout of simulate on the shipped example configs is pinned.
TEST_F(CliTest, ExampleConfigsMatchGolden) {
  const fs::path src = OMEGAGAIT_SOURCE_DIR;
  for (const std::string name : {"omega_turn", "offset_turn"}) {
    const fs::path cfg = src / "tools" / "configs" / (name + ".ini");
    ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + (dir_ / name).string()), 0) << output_;
    EXPECT_EQ(output_, slurp(src / "tests" / "golden" / (name + "_simulate.txt"))) << name;
  }
}

}  // namespace
