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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "idrl/env/render.hpp"
#include "idrl/advice/advice.hpp"
#include "idrl/env/environment.hpp"
#include "idrl/errors.hpp"
#include "idrl/trainer/experiment.hpp"
#include "idrl/trainer/presets.hpp"
#include "idrl/trainer/trainer.hpp"

namespace idrl::trainer {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("idrl_trainer_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Oracle that gives up after a fixed number of answers.
class FlakyOracle final : public advice::Advisor {
 public:
  explicit FlakyOracle(int answers) : left_(answers) {}
  advice::AdvisorKind kind() const noexcept override { return advice::AdvisorKind::Human; }
  Action advise(const EnvState& s, const Frame&, const advice::AdviceContext&) override {
    if (left_-- == 0) throw SessionDisconnected();
    return oracle_action(s);
  }

 private:
  int left_;
};

ExperimentConfig tiny_config(RunMode mode) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.n_agents = 2;
  cfg.seed = 5;
  cfg.train.episodes = 2;
  cfg.train.batch_size = 4;
  cfg.observation.side = 16;
  cfg.network = nn::NetworkConfig::reduced(16, 16);
  cfg.advisor = AdvisorSource::Oracle;
  return cfg;
}

std::size_t count_advised(const PretrainReport& r) {
  return static_cast<std::size_t>(std::count(r.advised_flags.begin(), r.advised_flags.end(), true));
}

TEST(Modes, ParseAndPrint) {
  EXPECT_EQ(parse_mode("autonomous"), RunMode::Autonomous);
  EXPECT_EQ(parse_mode("deeprl"), RunMode::Autonomous);
  EXPECT_EQ(parse_mode("agent"), RunMode::AgentAdvised);
  EXPECT_EQ(parse_mode("human-advised"), RunMode::HumanAdvised);
  EXPECT_FALSE(parse_mode("robot").has_value());
  EXPECT_EQ(to_string(RunMode::AgentAdvised), "agent");
  EXPECT_FALSE(interactive(RunMode::Autonomous));
  EXPECT_TRUE(interactive(RunMode::HumanAdvised));
}

TEST(Pretrain, AutonomousFillsOneThousandRandomTransitions) {
  Environment env(1);
  dqn::ReplayMemory mem;
  Rng rng(2);
  const PretrainReport r = pretrain(env, mem, RunMode::Autonomous, nullptr, nullptr, rng);
  EXPECT_EQ(mem.size(), 1000u);
  EXPECT_EQ(r.inserted, 1000u);
  EXPECT_EQ(r.advised_steps, 0);
  EXPECT_EQ(count_advised(r), 0u);
  std::array<int, 4> hist{};
  for (const auto& t : mem) ++hist[static_cast<int>(t.action)];
  for (int h : hist) EXPECT_NEAR(h, 250, 60);
}

TEST(Pretrain, OracleAdviceFillsInsertsNineHundredOneToOneThousand) {
  Environment env(3);
  dqn::ReplayMemory mem;
  Rng rng(4);
  advice::OracleAdvisor oracle;
  advice::AdviceBudget budget;
  const PretrainReport r = pretrain(env, mem, RunMode::AgentAdvised, &oracle, &budget, rng);
  EXPECT_EQ(mem.size(), 1000u);
  EXPECT_EQ(r.advised_steps, 100);
  EXPECT_EQ(r.first_advised_insert, 901u);
  EXPECT_EQ(r.last_advised_insert, 1000u);
  ASSERT_EQ(r.advised_flags.size(), 1000u);
  for (std::size_t i = 0; i < 1000; ++i) ASSERT_EQ(r.advised_flags[i], i >= 900) << i;
  EXPECT_TRUE(budget.exhausted());
  // 100 optimal steps at 18 per episode span six episodes.
  EXPECT_EQ(r.advised_episodes, 6);
  int perfect = 0;
  for (std::size_t i = 900; i < 1000; ++i) {
    ASSERT_NE(mem[i].reward, -1.0);
    perfect += mem[i].reward == 1.0;
  }
  EXPECT_EQ(perfect, 5);
}

TEST(Pretrain, SmallBudgetLeavesTheRestRandom) {
  Environment env(3);
  dqn::ReplayMemory mem;
  Rng rng(4);
  advice::OracleAdvisor oracle;
  advice::AdviceBudget budget(10);
  const PretrainReport r = pretrain(env, mem, RunMode::AgentAdvised, &oracle, &budget, rng);
  EXPECT_EQ(r.advised_steps, 10);
  EXPECT_EQ(r.first_advised_insert, 901u);
  EXPECT_EQ(r.last_advised_insert, 910u);
}

TEST(Pretrain, InteractiveWithoutAdvisorIsContractViolation) {
  Environment env(3);
  dqn::ReplayMemory mem;
  Rng rng(4);
  EXPECT_THROW(pretrain(env, mem, RunMode::AgentAdvised, nullptr, nullptr, rng), ContractViolation);
  dqn::ReplayMemory small(10);
  EXPECT_THROW(pretrain(env, small, RunMode::Autonomous, nullptr, nullptr, rng), ContractViolation);
}

TEST(Pretrain, RandomPhaseDoesNotDependOnMode) {
  Environment e1(8), e2(8);
  dqn::ReplayMemory m1, m2;
  Rng r1(9), r2(9);
  advice::OracleAdvisor oracle;
  advice::AdviceBudget budget;
  pretrain(e1, m1, RunMode::Autonomous, nullptr, nullptr, r1);
  pretrain(e2, m2, RunMode::AgentAdvised, &oracle, &budget, r2);
  for (std::size_t i = 0; i < 900; ++i) {
    ASSERT_EQ(m1[i].action, m2[i].action);
    ASSERT_EQ(*m1[i].state, *m2[i].state);
  }
}

TEST(Pretrain, ObserverSeesEveryUnadvisedStep) {
  Environment env(3);
  dqn::ReplayMemory mem;
  Rng rng(4);
  advice::OracleAdvisor oracle;
  advice::AdviceBudget budget;
  PretrainOptions opts;
  std::vector<std::uint64_t> steps;
  opts.on_step = [&](const Frame& f, const advice::AdviceContext& ctx) {
    EXPECT_EQ(f.width(), 64);
    steps.push_back(ctx.step);
  };
  pretrain(env, mem, RunMode::AgentAdvised, &oracle, &budget, rng, opts);
  ASSERT_EQ(steps.size(), 900u);
  EXPECT_EQ(steps.front(), 0u);
  EXPECT_EQ(steps.back(), 899u);
}

TEST(Pretrain, InterruptedAdviceResumesToTheSameMemory) {
  const fs::path dir = scratch_dir("resume");
  advice::OracleAdvisor oracle;

  Environment env_a(11);
  dqn::ReplayMemory mem_a;
  Rng rng_a(12);
  advice::AdviceBudget budget_a;
  pretrain(env_a, mem_a, RunMode::HumanAdvised, &oracle, &budget_a, rng_a);

  Environment env_b(11);
  dqn::ReplayMemory mem_b;
  Rng rng_b(12);
  advice::AdviceBudget budget_b;
  FlakyOracle flaky(37);
  PretrainOptions opts;
  opts.resume_dir = dir;
  opts.agent_index = 3;
  EXPECT_THROW(pretrain(env_b, mem_b, RunMode::HumanAdvised, &flaky, &budget_b, rng_b, opts),
               SessionDisconnected);
  ASSERT_TRUE(fs::exists(dir / "memory.bin"));
  ASSERT_TRUE(fs::exists(dir / "pretrain.json"));

  PretrainCheckpoint ckpt = load_pretrain_checkpoint(dir);
  EXPECT_EQ(ckpt.memory.size(), 937u);
  EXPECT_EQ(ckpt.budget_used, 37);
  EXPECT_EQ(ckpt.agent_index, 3);
  Environment env_c(11);
  env_c.restore(ckpt.env_state, ckpt.episodes_started);
  Rng rng_c;
  std::istringstream(ckpt.rng_state) >> rng_c;
  advice::AdviceBudget budget_c(ckpt.budget_total);
  budget_c.restore_used(ckpt.budget_used);
  dqn::ReplayMemory mem_c = std::move(ckpt.memory);
  pretrain(env_c, mem_c, RunMode::HumanAdvised, &oracle, &budget_c, rng_c);

  ASSERT_EQ(mem_c.size(), mem_a.size());
  for (std::size_t i = 0; i < mem_a.size(); ++i) {
    ASSERT_EQ(mem_c[i].action, mem_a[i].action) << i;
    ASSERT_EQ(mem_c[i].reward, mem_a[i].reward) << i;
    ASSERT_EQ(*mem_c[i].next_state, *mem_a[i].next_state) << i;
  }
  EXPECT_EQ(env_c.state(), env_a.state());
  EXPECT_EQ(rng_c, rng_a);
  fs::remove_all(dir);
}

TEST(Epsilon, SchedulePowersTheDecay) {
  EpsilonSchedule e(1.0, 0.9995);
  for (int k = 0; k < 20000; ++k) {
    ASSERT_NEAR(e.value(), std::pow(0.9995, k), 1e-12) << k;
    ASSERT_EQ(e.steps(), static_cast<std::uint64_t>(k));
    e.advance();
  }
  EXPECT_DOUBLE_EQ(EpsilonSchedule::at(0.5, 0.9, 3), 0.5 * 0.729);
}

TEST(Epsilon, FirstStepAtOnePercentMatchesEnumeration) {
  // Enumeration oracle in long double.
  long double v = 1.0L;
  std::uint64_t k = 0;
  while (v > 0.01L) {
    v *= 0.9995L;
    ++k;
  }
  EXPECT_EQ(k, 9209u);
  EXPECT_EQ(EpsilonSchedule::first_step_at_or_below(1.0, 0.9995, 0.01), 9209u);
  EXPECT_GT(EpsilonSchedule::at(1.0, 0.9995, 9206), 0.01);
  EXPECT_LE(EpsilonSchedule::at(1.0, 0.9995, 9209), 0.01);
  EXPECT_EQ(EpsilonSchedule::first_step_at_or_below(1.0, 0.5, 0.25), 2u);
  EXPECT_EQ(EpsilonSchedule::first_step_at_or_below(1.0, 0.5, 1.0), 0u);
}

TEST(Observation, DownsamplesRenderAndValidatesSide) {
  const EnvState s = reset(1);
  EXPECT_EQ(observe(s, {}), render(s));
  EXPECT_EQ(observe(s, {32}).width(), 32);
  EXPECT_THROW(ObservationConfig{48}.validate(), ContractViolation);
}

TEST(Train, RunsEpisodesAndLogsEverything) {
  Environment env(21);
  dqn::ReplayMemory mem;
  Rng rng(22);
  pretrain(env, mem, RunMode::Autonomous, nullptr, nullptr, rng, {{}, {16}, {}, {}});
  nn::QNetwork net(nn::NetworkConfig::reduced(16, 16), 23);
  nn::TrainConfig cfg;
  cfg.episodes = 3;
  cfg.batch_size = 8;
  TrainState state;
  std::vector<int> seen;
  TrainOptions opts;
  opts.observation.side = 16;
  opts.on_episode = [&](const EpisodeLog& log) { seen.push_back(log.episode); };
  const auto logs = train(env, net, mem, cfg, rng, opts, &state);
  ASSERT_EQ(logs.size(), 3u);
  EXPECT_EQ(seen, (std::vector<int>{0, 1, 2}));
  std::uint64_t steps = 0;
  for (const auto& log : logs) {
    EXPECT_EQ(static_cast<int>(log.steps.size()), log.step_count);
    EXPECT_TRUE(log.terminal || log.truncated);
    EXPECT_NEAR(log.reward_sum, sum_rewards(log), 1e-12);
    EXPECT_LE(log.step_count, 251);
    for (const auto& st : log.steps) {
      EXPECT_NEAR(st.epsilon, std::pow(0.9995, static_cast<double>(steps)), 1e-12);
      ++steps;
    }
  }
  EXPECT_EQ(state.global_step, steps);
  EXPECT_EQ(mem.size(), 1000u + steps);
  EXPECT_EQ(net.optimizer_steps(), steps);
}

TEST(Train, DumpsOneFramePerStep) {
  const fs::path dir = scratch_dir("frames");
  Environment env(21);
  dqn::ReplayMemory mem;
  Rng rng(22);
  pretrain(env, mem, RunMode::Autonomous, nullptr, nullptr, rng, {{}, {16}, {}, {}});
  nn::QNetwork net(nn::NetworkConfig::reduced(16, 16), 23);
  nn::TrainConfig cfg;
  cfg.episodes = 1;
  cfg.batch_size = 4;
  TrainOptions opts;
  opts.observation.side = 16;
  opts.dump_frames_dir = dir;
  const auto logs = train(env, net, mem, cfg, rng, opts);
  EXPECT_TRUE(fs::exists(dir / "ep0000_step0001.ppm"));
  const auto n = std::distance(fs::directory_iterator(dir), fs::directory_iterator{});
  EXPECT_EQ(n, logs[0].step_count);
  fs::remove_all(dir);
}

TEST(Train, DivergenceWritesDiagnostics) {
  const fs::path dir = scratch_dir("diverge");
  Environment env(21);
  dqn::ReplayMemory mem;
  Rng rng(22);
  pretrain(env, mem, RunMode::Autonomous, nullptr, nullptr, rng, {{}, {16}, {}, {}});
  nn::QNetwork net(nn::NetworkConfig::reduced(16, 16, nn::Head::Linear), 23);
  net.parameters().back()->value[0] = std::numeric_limits<float>::infinity();
  nn::TrainConfig cfg;
  cfg.episodes = 1;
  cfg.batch_size = 4;
  TrainOptions opts;
  opts.observation.side = 16;
  opts.diagnostics_dir = dir;
  EXPECT_THROW(train(env, net, mem, cfg, rng, opts), DivergenceError);
  EXPECT_TRUE(fs::exists(dir / "divergence.json"));
  fs::remove_all(dir);
}

TEST(Seeds, AreModeIndependentAndDistinct) {
  const AgentSeeds a = agent_seeds(7, 0), b = agent_seeds(7, 1);
  EXPECT_EQ(a.agent, derive_seed(7, 0, "agent"));
  EXPECT_NE(a.agent, b.agent);
  EXPECT_NE(a.env, a.init);
  EXPECT_NE(a.init, a.policy);
  EXPECT_EQ(advisor_seed(7), derive_seed(7, 0, "advisor"));
}

TEST(Experiment, ValidateRejectsInconsistentConfigs) {
  ExperimentConfig cfg = tiny_config(RunMode::AgentAdvised);
  EXPECT_NO_THROW(cfg.validate());
  cfg.observation.side = 32;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = tiny_config(RunMode::AgentAdvised);
  cfg.strategy = advice::AdviceStrategy::Importance;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = tiny_config(RunMode::AgentAdvised);
  cfg.n_agents = 0;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(Experiment, HumanModeNeedsALiveLink) {
  EXPECT_THROW(run_experiment(tiny_config(RunMode::HumanAdvised)), ContractViolation);
}

TEST(Experiment, TinyRunIsDeterministicAndThreadCountInvariant) {
  ExperimentConfig cfg = tiny_config(RunMode::AgentAdvised);
  const RunMetrics a = run_experiment(cfg);
  cfg.threads = 2;
  const RunMetrics b = run_experiment(cfg);
  ASSERT_EQ(a.agents.size(), 2u);
  EXPECT_EQ(a.reward_series(), b.reward_series());
  EXPECT_EQ(manifest_json(a), manifest_json(b));
  for (const auto& ag : a.agents) {
    EXPECT_EQ(ag.budget_used, 100);
    EXPECT_EQ(ag.rewards.size(), 2u);
    EXPECT_EQ(ag.pretrain.first_advised_insert, 901u);
  }
  EXPECT_NE(a.agents[0].rewards, a.agents[1].rewards);
}

TEST(Experiment, CurvesAggregateAgents) {
  RunMetrics m;
  m.agents.resize(2);
  m.agents[0].rewards = {1.0, 2.0};
  m.agents[1].rewards = {3.0, 2.0};
  m.agents[0].r_total = 3.0;
  m.agents[1].r_total = 5.0;
  EXPECT_EQ(m.mean_curve(), (std::vector<double>{2.0, 2.0}));
  EXPECT_NEAR(m.std_curve()[0], std::sqrt(2.0), 1e-12);
  EXPECT_EQ(m.std_curve()[1], 0.0);
  EXPECT_EQ(m.r_totals(), (std::vector<double>{3.0, 5.0}));
  m.agents.resize(1);
  EXPECT_EQ(m.std_curve(), (std::vector<double>{0.0, 0.0}));
}

TEST(Experiment, TrainFirstWritesAdvisorCheckpoint) {
  const fs::path dir = scratch_dir("advisor");
  ExperimentConfig cfg = tiny_config(RunMode::AgentAdvised);
  cfg.n_agents = 1;
  cfg.train.episodes = 1;
  cfg.advisor = AdvisorSource::TrainFirst;
  cfg.advisor_checkpoint = dir / "advisor.qnet";
  const RunMetrics m = run_experiment(cfg);
  EXPECT_TRUE(fs::exists(cfg.advisor_checkpoint));
  EXPECT_EQ(m.agents[0].budget_used, 100);
  cfg.advisor = AdvisorSource::Checkpoint;
  const RunMetrics again = run_experiment(cfg);
  EXPECT_EQ(again.reward_series(), m.reward_series());
  fs::remove_all(dir);
}

TEST(Manifest, RecordsSeedsAndConfiguration) {
  ExperimentConfig cfg = tiny_config(RunMode::Autonomous);
  cfg.n_agents = 1;
  cfg.train.episodes = 1;
  const RunMetrics m = run_experiment(cfg);
  const auto j = nlohmann::json::parse(manifest_json(m));
  EXPECT_EQ(j["mode"], "autonomous");
  EXPECT_EQ(j["master_seed"], 5);
  EXPECT_EQ(j["agents"].size(), 1u);
  EXPECT_EQ(j["agents"][0]["seed"], agent_seeds(5, 0).agent);
  EXPECT_EQ(j["agents"][0]["env_seed"], agent_seeds(5, 0).env);
  EXPECT_EQ(j["architecture"], cfg.network.architecture());
  EXPECT_EQ(j["train"]["episodes"], 1);
  EXPECT_FALSE(j.contains("timestamp"));
}

TEST(Presets, FullPresetMatchesPublishedSetup) {
  const ExperimentConfig p = full_preset();
  EXPECT_EQ(p.n_agents, 10);
  EXPECT_EQ(p.train.episodes, 300);
  EXPECT_EQ(p.train.batch_size, 128);
  EXPECT_DOUBLE_EQ(p.train.learning_rate, 1e-3);
  EXPECT_DOUBLE_EQ(p.train.gamma, 0.9);
  EXPECT_DOUBLE_EQ(p.train.epsilon_decay, 0.9995);
  EXPECT_EQ(p.replay_capacity, 50'000u);
  EXPECT_EQ(p.budget, 100);
  EXPECT_EQ(p.network, nn::NetworkConfig::standard());
  const ExperimentConfig s = scaled_preset();
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.n_agents, 5);
  EXPECT_EQ(s.train.episodes, 120);
  EXPECT_EQ(s.advisor, AdvisorSource::Oracle);
  EXPECT_EQ(s.observation.side, s.network.input_height);
  EXPECT_EQ(s.env.num_objects, 6);
}

}  // namespace
}  // namespace idrl::trainer
