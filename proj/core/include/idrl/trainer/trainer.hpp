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
#include <string_view>
#include <vector>

#include "idrl/advice/advice.hpp"
#include "idrl/dqn/replay_memory.hpp"
#include "idrl/env/environment.hpp"
#include "idrl/nn/network.hpp"
#include "idrl/random.hpp"

namespace idrl::trainer {

enum class RunMode { Autonomous, AgentAdvised, HumanAdvised };
std::string_view to_string(RunMode m) noexcept;
std::optional<RunMode> parse_mode(std::string_view s) noexcept;
inline bool interactive(RunMode m) noexcept { return m != RunMode::Autonomous; }

// Converts the rendered 64x64 frame into what the network consumes.
// side == 64 is the identity; smaller sides average square blocks.
struct ObservationConfig {
  int side = 64;
  void validate() const;
};
Frame observe(const EnvState& state, const ObservationConfig& obs);

struct StepRecord {
  Action action = Action::Grab;
  double reward = 0.0;
  double epsilon = 0.0;
  bool advised = false;
};

struct EpisodeLog {
  int episode = 0;
  std::vector<StepRecord> steps;
  double reward_sum = 0.0;
  int step_count = 0;
  int advised_steps = 0;
  bool terminal = false;
  bool truncated = false;
};

// Scans a finished log and recomputes reward_sum from its steps.
double sum_rewards(const EpisodeLog& log);

struct PretrainConfig {
  std::size_t total_steps = 1000;
  std::size_t random_steps = 900;   // advice starts once this many transitions exist
  // Starts a fresh episode when the advised window opens so advice begins on a clean table.
  bool reset_at_window = true;
  void validate() const;
};

struct PretrainReport {
  std::size_t inserted = 0;
  int advised_steps = 0;
  std::size_t first_advised_insert = 0;  // 1-based insertion index, 0 if none
  std::size_t last_advised_insert = 0;
  int advised_episodes = 0;              // distinct episodes that received advice
  std::uint64_t episodes_started = 0;
  std::vector<bool> advised_flags;       // per insertion, in order
};

// Called before every non-advised pretraining step with the full-resolution
// render (used to stream progress to a console).
using StepObserver = std::function<void(const Frame& frame, const advice::AdviceContext& ctx)>;

struct PretrainOptions {
  PretrainConfig config;
  ObservationConfig observation;
  // When set, an advisor failure saves a resumable checkpoint here before rethrowing.
  std::optional<std::filesystem::path> resume_dir;
  int agent_index = 0;  // recorded in that checkpoint
  StepObserver on_step;
};

// Fills `mem` up to `config.total_steps` transitions. Random actions, except
// that interactive modes take the advisor's action once `random_steps`
// transitions exist and budget remains. No learning happens here. May be
// called on a partially filled memory restored from a checkpoint.
PretrainReport pretrain(Environment& env, dqn::ReplayMemory& mem, RunMode mode,
                        advice::Advisor* advisor, advice::AdviceBudget* budget, Rng& rng,
                        const PretrainOptions& options = {});

// State captured when an advisor fails during pretraining.
struct PretrainCheckpoint {
  dqn::ReplayMemory memory;
  EnvState env_state;
  std::uint64_t episodes_started = 0;
  std::string rng_state;
  int budget_total = 0;
  int budget_used = 0;
  int agent_index = 0;
};
void save_pretrain_checkpoint(const PretrainCheckpoint& ckpt, const std::filesystem::path& dir);
PretrainCheckpoint load_pretrain_checkpoint(const std::filesystem::path& dir);

// epsilon_k = epsilon_init * decay^k after k training steps.
class EpsilonSchedule {
 public:
  EpsilonSchedule(double initial, double decay);
  double value() const noexcept { return value_; }
  std::uint64_t steps() const noexcept { return steps_; }
  void advance() noexcept;
  static double at(double initial, double decay, std::uint64_t k) noexcept;
  // Smallest k with at(initial, decay, k) <= threshold.
  static std::uint64_t first_step_at_or_below(double initial, double decay, double threshold);

 private:
  double initial_;
  double decay_;
  double value_;
  std::uint64_t steps_ = 0;
};

struct TrainOptions {
  ObservationConfig observation;
  std::optional<std::filesystem::path> dump_frames_dir;  // one PPM per step
  std::optional<std::filesystem::path> diagnostics_dir;  // written on divergence
  std::function<void(const EpisodeLog&)> on_episode;
};

// Carried across train() calls. A state with global_step == 0 is (re)initialized
// from the TrainConfig.
struct TrainState {
  EpsilonSchedule epsilon{1.0, 1.0};
  std::uint64_t global_step = 0;
};

// Runs cfg.episodes epsilon-greedy episodes, training once per step on a
// sampled batch. The environment is reset before the first episode.
std::vector<EpisodeLog> train(Environment& env, nn::QNetwork& net, dqn::ReplayMemory& mem,
                              const nn::TrainConfig& cfg, Rng& rng, const TrainOptions& options = {},
                              TrainState* state = nullptr);

}  // namespace idrl::trainer
