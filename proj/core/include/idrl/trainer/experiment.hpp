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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "idrl/advice/advice.hpp"
#include "idrl/env/environment.hpp"
#include "idrl/nn/config.hpp"
#include "idrl/trainer/trainer.hpp"

namespace idrl::trainer {

// Where agent-advised learners get their trainer from.
enum class AdvisorSource {
  Oracle,      // scripted optimal policy
  Checkpoint,  // a network saved by an earlier run
  TrainFirst,  // run one autonomous agent with the same settings, then checkpoint it
};
std::string_view to_string(AdvisorSource s) noexcept;
std::optional<AdvisorSource> parse_advisor_source(std::string_view s) noexcept;

struct ExperimentConfig {
  RunMode mode = RunMode::Autonomous;
  int n_agents = 10;
  std::uint64_t seed = 0;
  nn::TrainConfig train;
  EnvConfig env;
  nn::NetworkConfig network = nn::NetworkConfig::standard();
  PretrainConfig pretrain;
  ObservationConfig observation;
  std::size_t replay_capacity = 50'000;
  int budget = advice::AdviceBudget::kDefaultTotal;
  advice::AdviceStrategy strategy = advice::AdviceStrategy::EarlyAdvising;
  AdvisorSource advisor = AdvisorSource::TrainFirst;
  std::filesystem::path advisor_checkpoint;  // read for Checkpoint, written for TrainFirst
  int threads = 1;                           // parallel agents; forced to 1 in human mode
  std::optional<std::filesystem::path> dump_frames_dir;  // <dir>/<label>/agent_<i>/...
  // Interactive pretraining saves a resumable checkpoint here if the advisor fails.
  std::optional<std::filesystem::path> resume_dir;
  // Continues the interrupted agent's pretraining from a checkpoint written to
  // resume_dir. Other agents run from scratch.
  std::optional<std::filesystem::path> resume_from;

  void validate() const;
};

// Seeds of one agent derived from the master seed.
struct AgentSeeds {
  std::uint64_t agent = 0;
  std::uint64_t env = 0;
  std::uint64_t init = 0;
  std::uint64_t policy = 0;
};
AgentSeeds agent_seeds(std::uint64_t master, int index);
std::uint64_t advisor_seed(std::uint64_t master);

struct AgentResult {
  int index = 0;
  AgentSeeds seeds;
  PretrainReport pretrain;
  std::vector<EpisodeLog> episodes;
  std::vector<double> rewards;  // per episode
  double r_total = 0.0;
  int budget_used = 0;
};

struct RunMetrics {
  std::string label;
  RunMode mode = RunMode::Autonomous;
  ExperimentConfig config;
  std::vector<AgentResult> agents;

  std::vector<std::vector<double>> reward_series() const;
  std::vector<double> r_totals() const;
  std::vector<double> mean_curve() const;
  std::vector<double> std_curve() const;  // sample standard deviation, 0 for one agent
};

struct ExperimentHooks {
  // Human mode: the console link. Required for HumanAdvised.
  advice::HumanLink* human = nullptr;
  std::function<void(int agent, const EpisodeLog&)> on_episode;
  StepObserver on_pretrain_step;
  // Overrides the learner's network (tests). Unused when empty.
  std::function<nn::QNetwork(const ExperimentConfig&, std::uint64_t init_seed)> make_network;
};

// One pretrain + train pipeline.
AgentResult run_agent(const ExperimentConfig& cfg, int index, advice::Advisor* advisor,
                      const ExperimentHooks& hooks = {}, nn::QNetwork* trained = nullptr);

// Trains one autonomous agent with cfg's hyper-parameters and saves it to
// cfg.advisor_checkpoint.
nn::QNetwork train_advisor(const ExperimentConfig& cfg, const ExperimentHooks& hooks = {});

RunMetrics run_experiment(const ExperimentConfig& cfg, const ExperimentHooks& hooks = {});

// Manifest with everything needed to rerun: mode, seeds, config and build version.
void write_manifest(const RunMetrics& metrics, const std::filesystem::path& path);
std::string manifest_json(const RunMetrics& metrics);

}  // namespace idrl::trainer
