// Copyright 2026 The IDRL Authors.
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

#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "idrl/random.hpp"
#include "idrl/env/environment.hpp"
#include "idrl/env/scenario.hpp"
#include "idrl/errors.hpp"

namespace idrl {
namespace {

EnvState scenario(const std::string& text) {
  std::istringstream in(text);
  EnvState s = parse_scenario(in);
  s.rng_state = 12345;
  return s;
}

// Four objects sorted, blue cube in the grip, one left on the grid.
const char* kFourPlaced = R"(
cube red placed left
cylinder red placed left
cylinder blue placed right
disk red placed left
cube blue carried
disk blue 3
arm right
steps 10
)";

TEST(Reset, IsDeterministic) {
  EXPECT_EQ(reset(42), reset(42));
  EXPECT_NE(reset(42), reset(43));
}

TEST(Reset, PlacesSixDistinctObjectsOnDistinctCells) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const EnvState s = reset(seed);
    ASSERT_EQ(s.objects.size(), 6u);
    std::set<int> cells;
    std::set<std::pair<Shape, Color>> kinds;
    for (const auto& o : s.objects) {
      ASSERT_EQ(o.position.kind, ObjectPosition::Kind::OnTable);
      ASSERT_GE(o.position.cell, 0);
      ASSERT_LT(o.position.cell, 9);
      cells.insert(o.position.cell);
      kinds.insert({o.shape, o.color});
    }
    EXPECT_EQ(cells.size(), 6u);
    EXPECT_EQ(kinds.size(), 6u);
    EXPECT_EQ(s.arm_zone, Zone::Center);
    EXPECT_FALSE(s.carried_index().has_value());
    EXPECT_EQ(s.step_count, 0);
    EXPECT_FALSE(s.episode_done);
  }
}

TEST(Reset, LayoutsVaryAcrossSeeds) {
  std::set<std::vector<int>> layouts;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::vector<int> cells;
    for (const auto& o : reset(seed).objects) cells.push_back(o.position.cell);
    layouts.insert(cells);
  }
  EXPECT_GT(layouts.size(), 190u);
}

TEST(Step, CorrectSingleDropPaysPointFour) {
  const StepResult r = step(scenario(kFourPlaced), Action::Drop);
  EXPECT_DOUBLE_EQ(r.reward, 0.4);
  EXPECT_FALSE(r.terminal);
  EXPECT_EQ(r.state.count_placed(), 5);
  EXPECT_EQ(r.state.step_count, 11);
}

TEST(Step, LastCorrectDropPaysOneAndTerminates) {
  const StepResult r = step(scenario(R"(
cube red placed left
cylinder red placed left
cylinder blue placed right
disk red placed left
disk blue placed right
cube blue carried
arm right
steps 17
)"),
                            Action::Drop);
  EXPECT_DOUBLE_EQ(r.reward, 1.0);
  EXPECT_TRUE(r.terminal);
  EXPECT_FALSE(r.truncated);
  EXPECT_TRUE(r.state.episode_done);
}

TEST(Step, WrongDropPaysMinusOneAndTerminates) {
  const StepResult r = step(scenario(R"(
disk red carried
cube blue 0
arm right
)"),
                            Action::Drop);
  EXPECT_DOUBLE_EQ(r.reward, -1.0);
  EXPECT_TRUE(r.terminal);
  EXPECT_TRUE(r.state.episode_done);
}

TEST(Step, MoveIntoWallOnlyCountsTheStep) {
  const EnvState s = scenario(kFourPlaced);
  const StepResult r = step(s, Action::MoveRight);
  EXPECT_DOUBLE_EQ(r.reward, 0.0);
  EnvState expected = s;
  expected.step_count += 1;
  EXPECT_EQ(r.state, expected);
}

TEST(Step, PenaltyStartsWhenPostStepCountExceedsEighteen) {
  EnvState s = scenario(kFourPlaced);
  s.step_count = 17;
  EXPECT_DOUBLE_EQ(step(s, Action::MoveRight).reward, 0.0);  // 18 after the step
  s.step_count = 18;
  EXPECT_DOUBLE_EQ(step(s, Action::MoveRight).reward, -0.01);  // 19 after the step
  s.step_count = 40;
  EXPECT_DOUBLE_EQ(step(s, Action::MoveRight).reward, -0.01);
  // Penalty is additive on scoring steps.
  s.step_count = 30;
  EXPECT_DOUBLE_EQ(step(s, Action::Drop).reward, 0.4 - 0.01);
}

TEST(Step, DropAtCenterIsNoOp) {
  EnvState s = scenario("cube blue carried\narm center\n");
  const StepResult r = step(s, Action::Drop);
  EXPECT_DOUBLE_EQ(r.reward, 0.0);
  EXPECT_TRUE(r.state.carried_index().has_value());
  EXPECT_EQ(r.state.arm_zone, Zone::Center);
}

TEST(Step, GrabWithFullGripIsNoOp) {
  EnvState s = scenario("cube blue carried\ndisk red 2\narm left\n");
  const StepResult r = step(s, Action::Grab);
  EXPECT_EQ(r.state.objects, s.objects);
  EXPECT_EQ(r.state.arm_zone, Zone::Left);
}

TEST(Step, GrabReturnsArmToCenterAndPicksATableObject) {
  EnvState s = scenario("cube blue 0\ndisk red 2\narm left\n");
  const StepResult r = step(s, Action::Grab);
  ASSERT_TRUE(r.state.carried_index().has_value());
  EXPECT_EQ(r.state.arm_zone, Zone::Center);
  EXPECT_EQ(r.state.count_on_table(), 1);
}

TEST(Step, GrabIsUniformOverRemainingObjects) {
  std::array<int, 6> hist{};
  for (std::uint64_t seed = 0; seed < 6000; ++seed) {
    EnvState s = reset(seed);
    s.rng_state = splitmix64(seed * 7919 + 1);
    const auto picked = *step(s, Action::Grab).state.carried_index();
    ++hist[picked];
  }
  for (int h : hist) EXPECT_NEAR(h, 1000, 120);
}

TEST(Step, MovesAreRelativeAlongTheLine) {
  EnvState s = scenario("cube blue 0\narm left\n");
  s = step(s, Action::MoveRight).state;
  EXPECT_EQ(s.arm_zone, Zone::Center);
  s = step(s, Action::MoveRight).state;
  EXPECT_EQ(s.arm_zone, Zone::Right);
  s = step(s, Action::MoveLeft).state;
  EXPECT_EQ(s.arm_zone, Zone::Center);
  s = step(s, Action::MoveLeft).state;
  s = step(s, Action::MoveLeft).state;
  EXPECT_EQ(s.arm_zone, Zone::Left);
}

TEST(Step, FinishedEpisodeIsContractViolation) {
  EnvState s = reset(1);
  s.episode_done = true;
  EXPECT_THROW(step(s, Action::Grab), ContractViolation);
}

TEST(Step, TruncatesAfterTwoHundredFiftySteps) {
  EnvState s = reset(3);
  int steps = 0;
  StepResult r;
  do {
    r = step(s, Action::MoveLeft);
    s = r.state;
    ++steps;
  } while (!s.episode_done);
  EXPECT_EQ(steps, 251);
  EXPECT_TRUE(r.truncated);
  EXPECT_FALSE(r.terminal);
}

TEST(Oracle, FollowsGrabCarryDrop) {
  EXPECT_EQ(oracle_action(scenario("cube blue carried\narm center\n")), Action::MoveRight);
  EXPECT_EQ(oracle_action(scenario("cube blue 4\narm center\n")), Action::Grab);
  EXPECT_EQ(oracle_action(scenario("cylinder red carried\narm left\n")), Action::Drop);
  EXPECT_EQ(oracle_action(scenario("cylinder red carried\narm right\n")), Action::MoveLeft);
}

TEST(Oracle, PerfectEpisodeRewardSequence) {
  EnvState s = reset(2024);
  std::vector<double> scoring;
  double total = 0.0;
  int steps = 0;
  while (!s.episode_done) {
    StepResult r = step(s, oracle_action(s));
    if (r.reward != 0.0) scoring.push_back(r.reward);
    total += r.reward;
    s = r.state;
    ++steps;
  }
  EXPECT_EQ(steps, 18);
  EXPECT_EQ(scoring, (std::vector<double>{0.4, 0.4, 0.4, 0.4, 0.4, 1.0}));
  EXPECT_DOUBLE_EQ(total, 3.0);
}

// Property: every oracle episode is 18 steps, never misplaces, totals 3.
TEST(OracleProperty, OptimalFromAnyReset) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    EnvState s = reset(seed);
    double total = 0.0;
    int steps = 0;
    while (!s.episode_done) {
      StepResult r = step(s, oracle_action(s));
      ASSERT_NE(r.reward, -1.0);
      total += r.reward;
      s = r.state;
      ++steps;
    }
    ASSERT_EQ(steps, 18) << seed;
    ASSERT_NEAR(total, 3.0, 1e-12) << seed;
  }
}

// Property over random play: at most one carried object, placements never
// decrease, totals never exceed 3, a misplacement ends the episode at -1.
TEST(RandomPlayProperty, InvariantsHold) {
  Rng rng(5);
  for (int ep = 0; ep < 300; ++ep) {
    EnvState s = reset(rng());
    double total = 0.0;
    int placed = 0;
    while (!s.episode_done) {
      const auto a = static_cast<Action>(bounded(rng(), 4));
      StepResult r = step(s, a);
      int carried = 0;
      std::set<int> cells;
      for (const auto& o : r.state.objects) {
        if (o.position.kind == ObjectPosition::Kind::Carried) ++carried;
        if (o.position.kind == ObjectPosition::Kind::OnTable) {
          ASSERT_TRUE(cells.insert(o.position.cell).second);
        }
      }
      ASSERT_LE(carried, 1);
      ASSERT_GE(r.state.count_placed(), placed);
      placed = r.state.count_placed();
      // Placed objects never go back.
      for (std::size_t i = 0; i < s.objects.size(); ++i) {
        if (s.objects[i].position.kind == ObjectPosition::Kind::Placed) {
          ASSERT_EQ(r.state.objects[i].position, s.objects[i].position);
        }
      }
      total += r.reward;
      if (r.reward <= -1.0) ASSERT_TRUE(r.terminal);
      if (r.terminal || r.truncated) ASSERT_LE(r.state.step_count, 251);
      s = r.state;
    }
    ASSERT_LE(total, 3.0 + 1e-12);
  }
}

TEST(KnockOff, RemovesATableObjectWithProbabilityOne) {
  EnvConfig cfg;
  cfg.p_knock = 1.0;
  EnvState s = scenario("cube blue carried\ndisk red 2\ncube red 5\narm right\n");
  const StepResult r = step(s, Action::Drop, cfg);
  EXPECT_DOUBLE_EQ(r.reward, 0.4);
  int removed = 0;
  for (const auto& o : r.state.objects) removed += o.position.kind == ObjectPosition::Kind::Removed;
  EXPECT_EQ(removed, 1);
  EXPECT_EQ(r.state.count_on_table(), 1);
}

TEST(KnockOff, KnockingTheLastObjectCompletesTheEpisode) {
  EnvConfig cfg;
  cfg.p_knock = 1.0;
  EnvState s = scenario("cube blue carried\ndisk red 2\narm right\n");
  const StepResult r = step(s, Action::Drop, cfg);
  EXPECT_DOUBLE_EQ(r.reward, 1.0);
  EXPECT_TRUE(r.terminal);
}

TEST(Config, FewerObjectsShortenTheOracleEpisode) {
  EnvConfig cfg;
  cfg.num_objects = 4;
  EnvState s = reset(9, cfg);
  ASSERT_EQ(s.objects.size(), 4u);
  int steps = 0;
  double total = 0.0;
  while (!s.episode_done) {
    StepResult r = step(s, oracle_action(s, cfg), cfg);
    total += r.reward;
    s = r.state;
    ++steps;
  }
  EXPECT_EQ(steps, 12);
  EXPECT_NEAR(total, 0.4 * 3 + 1.0, 1e-12);
}

TEST(Config, ValidateRejectsBadValues) {
  EnvConfig cfg;
  cfg.num_objects = 7;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = {};
  cfg.blue_side = Zone::Center;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = {};
  cfg.p_knock = 1.5;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(Environment, EpisodesUseDistinctDerivedSeeds) {
  Environment env(77);
  const EnvState a = env.reset();
  const EnvState b = env.reset();
  EXPECT_NE(a.rng_seed, b.rng_seed);
  EXPECT_EQ(env.episodes_started(), 2u);
  Environment again(77);
  EXPECT_EQ(again.reset(), a);
}

TEST(Scenario, RoundTripsThroughText) {
  const EnvState s = scenario(kFourPlaced);
  std::istringstream in(format_scenario(s));
  EnvState back = parse_scenario(in);
  back.rng_state = s.rng_state;
  EXPECT_EQ(back, s);
}

TEST(Scenario, RejectsMalformedInput) {
  auto parse = [](const std::string& t) {
    std::istringstream in(t);
    return parse_scenario(in);
  };
  EXPECT_THROW(parse("sphere red 1\n"), FormatError);
  EXPECT_THROW(parse("cube green 1\n"), FormatError);
  EXPECT_THROW(parse("cube red 9\n"), FormatError);
  EXPECT_THROW(parse("cube red 1\ndisk blue 1\n"), FormatError);
  EXPECT_THROW(parse("cube red carried\ndisk blue carried\n"), FormatError);
  EXPECT_THROW(parse("cube red placed center\n"), FormatError);
  EXPECT_THROW(parse("arm up\n"), FormatError);
}

TEST(Names, ParseAndPrintAgree) {
  for (Action a : kAllActions) EXPECT_EQ(parse_action(to_string(a)), a);
  EXPECT_EQ(parse_action("2"), Action::MoveLeft);
  EXPECT_FALSE(parse_action("4").has_value());
  EXPECT_EQ(static_cast<int>(Action::Grab), 0);
  EXPECT_EQ(static_cast<int>(Action::MoveRight), 1);
  EXPECT_EQ(static_cast<int>(Action::MoveLeft), 2);
  EXPECT_EQ(static_cast<int>(Action::Drop), 3);
}

}  // namespace
}  // namespace idrl
