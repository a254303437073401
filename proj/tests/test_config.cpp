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

#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "omegagait/config.hpp"

namespace og = omegagait;

namespace {

og::ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return og::parse_config(is);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const og::ConfigError& e) {
    return e.line();
  }
  return -1;
}

TEST(Config, EmptyGivesDefaults) {
  const auto c = parse("");
  EXPECT_EQ(c.robot.n_joints, 8);
  EXPECT_DOUBLE_EQ(c.gait.k_f, 1.5);
  EXPECT_DOUBLE_EQ(c.gait.k_o, 1.0);
  EXPECT_EQ(c.dynamics.steps_per_cycle, 256);
  EXPECT_EQ(c.output.format, "csv");
  EXPECT_EQ(c.compliance.seeds.size(), 5u);
}

TEST(Config, ParsesEverySection) {
  const auto c = parse(R"(# full example
[robot]
n_joints = 6
joint_limit_deg = 75   ; trailing comment
[gait]
mode = family
k_o = 0.75
a_f_deg = 10
gamma = 1.5
psi_deg = 180
[dynamics]
mu = 0.5
epsilon = 1e-5
steps_per_cycle = 128
[optimizer]
starts = 2
seed = 42
[sweep]
k_o = 0, 0.5, 1
n_joints = 6, 7
[heightfun]
resolution = 33
[compliance]
spacing_bl = 0, 0.3
K = 4, 1, 1, 4
B = 6, 6
[output]
dir = results
format = csv+svg
)");
  EXPECT_EQ(c.robot.n_joints, 6);
  EXPECT_NEAR(c.robot.joint_limit, og::deg2rad(75), 1e-15);
  EXPECT_DOUBLE_EQ(c.gait.k_o, 0.75);
  EXPECT_NEAR(c.gait.params.a_f, og::deg2rad(10), 1e-15);
  EXPECT_DOUBLE_EQ(c.gait.params.gamma, 1.5);
  EXPECT_NEAR(c.gait.params.psi, og::kPi, 1e-15);
  EXPECT_DOUBLE_EQ(c.dynamics.friction.mu, 0.5);
  EXPECT_DOUBLE_EQ(c.dynamics.friction.epsilon, 1e-5);
  EXPECT_EQ(c.dynamics.steps_per_cycle, 128);
  EXPECT_EQ(c.optimizer.multistart.starts, 2);
  EXPECT_EQ(c.optimizer.multistart.seed, 42u);
  EXPECT_EQ(c.sweep.k_o, (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(c.sweep.n_joints, (std::vector<int>{6, 7}));
  EXPECT_EQ(c.heightfun.resolution, 33);
  EXPECT_EQ(c.compliance.spacing_bl, (std::vector<double>{0, 0.3}));
  EXPECT_DOUBLE_EQ(c.compliance.K(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(c.compliance.B(1, 1), 6.0);
  EXPECT_DOUBLE_EQ(c.compliance.B(0, 1), 0.0);
  EXPECT_EQ(c.output.dir, "results");
  EXPECT_EQ(c.output.format, "csv+svg");
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("[robot]\nn_joints = 8\n[nope]\n"), 3);
  EXPECT_EQ(error_line("[robot]\n\nwidth = 3\n"), 3);
  EXPECT_EQ(error_line("n_joints = 8\n"), 1);
  EXPECT_EQ(error_line("[robot]\nn_joints = 8\nn_joints = 9\n"), 3);
  EXPECT_EQ(error_line("[dynamics]\nmu =\n"), 2);
  EXPECT_EQ(error_line("[dynamics]\n# c\nmu = abc\n"), 3);
  EXPECT_EQ(error_line("[robot]\nn_joints = 2.5\n"), 2);
  EXPECT_EQ(error_line("[robot\n"), 1);
  EXPECT_EQ(error_line("[robot]\njust words\n"), 2);
  EXPECT_EQ(error_line("[output]\nformat = png\n"), 2);
  EXPECT_EQ(error_line("[gait]\nmode = wiggle\n"), 2);
  EXPECT_EQ(error_line("[compliance]\nK = 1, 2, 3\n"), 2);
}

TEST(Config, WholeConfigValidationUsesLineZero) {
  EXPECT_EQ(error_line("[robot]\nn_joints = 1\n"), 0);
  EXPECT_EQ(error_line("[dynamics]\nsteps_per_cycle = 16\n"), 0);
  EXPECT_EQ(error_line("[compliance]\nK = 1, 2, 2, 1\n"), 0);
  EXPECT_EQ(error_line("[gait]\ngamma = 0.5\n"), 0);
}

TEST(Config, MessageIncludesLine) {
  try {
    parse("[robot]\nbogus = 1\n");
    FAIL();
  } catch (const og::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Config, MissingFile) {
  EXPECT_THROW(og::load_config("/nonexistent/omegagait.ini"), og::ConfigError);
}

TEST(Config, GaitModesBuild) {
  for (const char* mode : {"family", "constant", "offset", "geometric"}) {
    const auto c = parse(std::string("[gait]\nmode = ") + mode + "\nkappa_deg = 5\n");
    EXPECT_NO_THROW(c.gait.build().validate()) << mode;
  }
  const auto g = parse("[gait]\nmode = geometric\nk_f = 2\nk_o = 0\n").gait.build();
  EXPECT_DOUBLE_EQ(g.omega.spatial_freq, 2.0);
}

}  // namespace
