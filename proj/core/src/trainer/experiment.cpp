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

#include "idrl/trainer/experiment.hpp"

#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "idrl/errors.hpp"
#include "idrl/nn/checkpoint.hpp"
#include "idrl/random.hpp"
#include "idrl/stats/stats.hpp"
#include "idrl/version.hpp"

namespace idrl::trainer {

using nlohmann::json;

std::string_view to_string(AdvisorSource s) noexcept {
  switch (s) {
    case AdvisorSource::Oracle: return "oracle";
    case AdvisorSource::Checkpoint: return "checkpoint";
    case AdvisorSource::TrainFirst: return "train-first";
  }
  return "?";
}

std::optional<AdvisorSource> parse_advisor_source(std::string_view s) noexcept {
  for (AdvisorSource v : {AdvisorSource::Oracle, AdvisorSource::Checkpoint, AdvisorSource::TrainFirst}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (n_agents < 1) throw ContractViolation("n_agents must be at least 1");
  if (threads < 1) throw ContractViolation("threads must be at least 1");
  if (budget < 0) throw ContractViolation("budget must be non-negative");
  train.validate();
  env.validate();
  network.validate();
  pretrain.validate();
  observation.validate();
  advice::require_supported(strategy);
  if (network.input_height != observation.side || network.input_width != observation.side) {
    throw ContractViolation("network input does not match the observation size");
  }
  if (network.num_outputs() != kNumActions) throw ContractViolation("network must have 4 outputs");
  if (replay_capacity < pretrain.total_steps) throw ContractViolation("replay capacity below pretraining size");
  if (pretrain.total_steps < static_cast<std::size_t>(train.batch_size)) {
    throw ContractViolation("pretraining leaves fewer transitions than one batch");
  }
  if (mode == RunMode::AgentAdvised && advisor == AdvisorSource::Checkpoint && advisor_checkpoint.empty()) {
    throw ContractViolation("checkpoint advisor needs a checkpoint path");
  }
}

AgentSeeds agent_seeds(std::uint64_t master, int index) {
  AgentSeeds s;
  s.agent = derive_seed(master, static_cast<std::uint64_t>(index), "agent");
  s.env = derive_seed(s.agent, 0, "env");
  s.init = derive_seed(s.agent, 0, "init");
  s.policy = derive_seed(s.agent, 0, "policy");
  return s;
}

std::uint64_t advisor_seed(std::uint64_t master) { return derive_seed(master, 0, "advisor"); }

std::vector<std::vector<double>> RunMetrics::reward_series() const {
  std::vector<std::vector<double>> out;
  for (const AgentResult& a : agents) out.push_back(a.rewards);
  return out;
}

std::vector<double> RunMetrics::r_totals() const {
  std::vector<double> out;
  for (const AgentResult& a : agents) out.push_back(a.r_total);
  return out;
}

std::vector<double> RunMetrics::mean_curve() const {
  if (agents.empty()) return {};
  const std::size_t n = agents.front().rewards.size();
  std::vector<double> mean(n, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    double s = 0.0;
    for (const AgentResult& a : agents) s += a.rewards.at(e);
    mean[e] = s / static_cast<double>(agents.size());
  }
  return mean;
}

std::vector<double> RunMetrics::std_curve() const {
  if (agents.empty()) return {};
  const std::size_t n = agents.front().rewards.size();
  std::vector<double> sd(n, 0.0);
  if (agents.size() < 2) return sd;
  const auto mean = mean_curve();
  for (std::size_t e = 0; e < n; ++e) {
    double ss = 0.0;
    for (const AgentResult& a : agents) {
      const double d = a.rewards.at(e) - mean[e];
      ss += d * d;
    }
    sd[e] = std::sqrt(ss / static_cast<double>(agents.size() - 1));
  }
  return sd;
}

namespace {

nn::QNetwork make_net(const ExperimentConfig& cfg, std::uint64_t seed, const ExperimentHooks& hooks) {
  if (hooks.make_network) return hooks.make_network(cfg, seed);
  return nn::QNetwork(cfg.network, seed);
}

}  // namespace

AgentResult run_agent(const ExperimentConfig& cfg, int index, advice::Advisor* advisor,
                      const ExperimentHooks& hooks, nn::QNetwork* trained) {
  AgentResult result;
  result.index = index;
  result.seeds = agent_seeds(cfg.seed, index);

  Environment env(result.seeds.env, cfg.env);
  dqn::ReplayMemory mem(cfg.replay_capacity);
  Rng rng(result.seeds.policy);
  advice::AdviceBudget budget(cfg.budget);

  PretrainOptions popts;
  popts.config = cfg.pretrain;
  popts.observation = cfg.observation;
  popts.resume_dir = cfg.resume_dir;
  popts.agent_index = index;
  popts.on_step = hooks.on_pretrain_step;
  std::optional<PretrainCheckpoint> resumed;
  if (cfg.resume_from) {
    resumed = load_pretrain_checkpoint(*cfg.resume_from);
    if (resumed->agent_index != index) resumed.reset();
  }
  if (resumed) {
    PretrainCheckpoint& ckpt = *resumed;
    if (ckpt.budget_total != cfg.budget) throw ContractViolation("checkpoint budget differs from the configured budget");
    mem = std::move(ckpt.memory);
    env.restore(ckpt.env_state, ckpt.episodes_started);
    std::istringstream is(ckpt.rng_state);
    is >> rng;
    if (!is) throw FormatError("bad generator state in checkpoint");
    budget.restore_used(ckpt.budget_used);
  }
  result.pretrain = pretrain(env, mem, cfg.mode, advisor, interactive(cfg.mode) ? &budget : nullptr, rng, popts);
  result.budget_used = budget.used();

  nn::QNetwork net = make_net(cfg, result.seeds.init, hooks);
  TrainOptions topts;
  topts.observation = cfg.observation;
  if (cfg.dump_frames_dir) {
    topts.dump_frames_dir = *cfg.dump_frames_dir / std::string(to_string(cfg.mode)) / ("agent_" + std::to_string(index));
  }
  if (hooks.on_episode) topts.on_episode = [&](const EpisodeLog& log) { hooks.on_episode(index, log); };
  result.episodes = train(env, net, mem, cfg.train, rng, topts);
  for (const EpisodeLog& log : result.episodes) result.rewards.push_back(log.reward_sum);
  result.r_total = stats::total_reward(result.rewards);
  if (trained) *trained = std::move(net);
  return result;
}

nn::QNetwork train_advisor(const ExperimentConfig& cfg, const ExperimentHooks& hooks) {
  ExperimentConfig acfg = cfg;
  acfg.mode = RunMode::Autonomous;
  acfg.seed = advisor_seed(cfg.seed);
  nn::QNetwork net = make_net(acfg, 0, hooks);
  ExperimentHooks quiet;
  quiet.make_network = hooks.make_network;
  run_agent(acfg, 0, nullptr, quiet, &net);
  if (!cfg.advisor_checkpoint.empty()) {
    if (cfg.advisor_checkpoint.has_parent_path()) {
      std::filesystem::create_directories(cfg.advisor_checkpoint.parent_path());
    }
    nn::save_checkpoint(net, cfg.advisor_checkpoint);
  }
  return net;
}

RunMetrics run_experiment(const ExperimentConfig& cfg, const ExperimentHooks& hooks) {
  cfg.validate();
  RunMetrics metrics;
  metrics.mode = cfg.mode;
  metrics.label = std::string(to_string(cfg.mode));
  metrics.config = cfg;
  metrics.agents.resize(static_cast<std::size_t>(cfg.n_agents));

  // Advisors are shared across learners; each is stateless apart from the
  // human link, which forces sequential execution.
  std::unique_ptr<advice::Advisor> advisor;
  int threads = cfg.threads;
  switch (cfg.mode) {
    case RunMode::Autonomous:
      break;
    case RunMode::AgentAdvised:
      if (cfg.advisor == AdvisorSource::Oracle) {
        advisor = std::make_unique<advice::OracleAdvisor>(cfg.env);
      } else if (cfg.advisor == AdvisorSource::Checkpoint) {
        advisor = advice::TrainedAgentAdvisor::from_checkpoint(cfg.advisor_checkpoint, cfg.network.architecture());
      } else {
        advisor = std::make_unique<advice::TrainedAgentAdvisor>(train_advisor(cfg, hooks));
      }
      break;
    case RunMode::HumanAdvised:
      if (hooks.human == nullptr) {
        throw ContractViolation("human-advised mode needs a live console session (use serve)");
      }
      advisor = std::make_unique<advice::HumanAdvisor>(*hooks.human);
      threads = 1;
      break;
  }

  std::mutex hook_mutex;
  ExperimentHooks agent_hooks = hooks;
  if (hooks.on_episode && threads > 1) {
    agent_hooks.on_episode = [&](int agent, const EpisodeLog& log) {
      std::lock_guard lock(hook_mutex);
      hooks.on_episode(agent, log);
    };
  }

  if (threads <= 1) {
    for (int i = 0; i < cfg.n_agents; ++i) {
      metrics.agents[static_cast<std::size_t>(i)] = run_agent(cfg, i, advisor.get(), agent_hooks);
    }
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(threads, cfg.n_agents); ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < cfg.n_agents; i = next++) {
          try {
            metrics.agents[static_cast<std::size_t>(i)] = run_agent(cfg, i, advisor.get(), agent_hooks);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  if (hooks.human) {
    const auto totals = metrics.r_totals();
    hooks.human->finish(stats::total_reward(totals) / static_cast<double>(totals.size()));
  }
  return metrics;
}

namespace {

json train_config_json(const nn::TrainConfig& t) {
  return {{"learning_rate", t.learning_rate},   {"batch_size", t.batch_size},
          {"gamma", t.gamma},                   {"epsilon_decay", t.epsilon_decay},
          {"epsilon_init", t.epsilon_init},     {"episodes", t.episodes},
          {"optimizer", to_string(t.optimizer)}, {"adam_beta1", t.adam_beta1},
          {"adam_beta2", t.adam_beta2},         {"adam_epsilon", t.adam_epsilon},
          {"target_sync_interval", t.target_sync_interval}};
}

json env_config_json(const EnvConfig& e) {
  return {{"num_objects", e.num_objects},     {"max_steps", e.max_steps},
          {"reward_single", e.reward_single}, {"reward_all", e.reward_all},
          {"reward_wrong", e.reward_wrong},   {"step_penalty", e.step_penalty},
          {"blue_side", to_string(e.blue_side)}, {"p_knock", e.p_knock}};
}

}  // namespace

std::string manifest_json(const RunMetrics& m) {
  const ExperimentConfig& c = m.config;
  json agents = json::array();
  for (const AgentResult& a : m.agents) {
    agents.push_back({{"index", a.index},
                      {"seed", a.seeds.agent},
                      {"env_seed", a.seeds.env},
                      {"init_seed", a.seeds.init},
                      {"policy_seed", a.seeds.policy},
                      {"budget_used", a.budget_used},
                      {"advised_steps", a.pretrain.advised_steps},
                      {"first_advised_insert", a.pretrain.first_advised_insert},
                      {"last_advised_insert", a.pretrain.last_advised_insert},
                      {"r_total", a.r_total}});
  }
  json j = {{"version", kVersion},
            {"git_describe", kGitDescribe},
            {"label", m.label},
            {"mode", to_string(c.mode)},
            {"n_agents", c.n_agents},
            {"master_seed", c.seed},
            {"advisor", to_string(c.advisor)},
            {"advisor_checkpoint", c.advisor_checkpoint.string()},
            {"advisor_seed", advisor_seed(c.seed)},
            {"strategy", advice::to_string(c.strategy)},
            {"budget", c.budget},
            {"pretrain", {{"total_steps", c.pretrain.total_steps},
                          {"random_steps", c.pretrain.random_steps},
                          {"reset_at_window", c.pretrain.reset_at_window}}},
            {"observation_side", c.observation.side},
            {"replay_capacity", c.replay_capacity},
            {"architecture", c.network.architecture()},
            {"train", train_config_json(c.train)},
            {"env", env_config_json(c.env)},
            {"agents", agents}};
  return j.dump(2) + "\n";
}

void write_manifest(const RunMetrics& metrics, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << manifest_json(metrics);
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace idrl::trainer
