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

#include "idrl/trainer/trainer.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "idrl/dqn/policy.hpp"
#include "idrl/env/image_io.hpp"
#include "idrl/env/render.hpp"
#include "idrl/errors.hpp"

namespace idrl::trainer {

using nlohmann::json;

std::string_view to_string(RunMode m) noexcept {
  switch (m) {
    case RunMode::Autonomous: return "autonomous";
    case RunMode::AgentAdvised: return "agent";
    case RunMode::HumanAdvised: return "human";
  }
  return "?";
}

std::optional<RunMode> parse_mode(std::string_view s) noexcept {
  if (s == "autonomous" || s == "deeprl") return RunMode::Autonomous;
  if (s == "agent" || s == "agent-advised") return RunMode::AgentAdvised;
  if (s == "human" || s == "human-advised") return RunMode::HumanAdvised;
  return std::nullopt;
}

void ObservationConfig::validate() const {
  if (side <= 0 || side > 64 || 64 % side != 0) {
    throw ContractViolation("observation side must divide 64");
  }
}

Frame observe(const EnvState& state, const ObservationConfig& obs) {
  return downsample(render(state), obs.side);
}

double sum_rewards(const EpisodeLog& log) {
  double s = 0.0;
  for (const StepRecord& r : log.steps) s += r.reward;
  return s;
}

void PretrainConfig::validate() const {
  if (total_steps == 0) throw ContractViolation("pretraining needs at least one step");
  if (random_steps > total_steps) throw ContractViolation("random_steps exceeds total_steps");
}

namespace {

json state_to_json(const EnvState& s) {
  json objects = json::array();
  for (const ObjectSpec& o : s.objects) {
    objects.push_back({{"shape", to_string(o.shape)},
                       {"color", to_string(o.color)},
                       {"kind", static_cast<int>(o.position.kind)},
                       {"cell", o.position.cell},
                       {"side", to_string(o.position.side)},
                       {"slot", o.position.slot}});
  }
  return {{"objects", objects},
          {"arm", to_string(s.arm_zone)},
          {"step_count", s.step_count},
          {"episode_done", s.episode_done},
          {"rng_seed", s.rng_seed},
          {"rng_state", s.rng_state}};
}

EnvState state_from_json(const json& j) {
  EnvState s;
  for (const json& o : j.at("objects")) {
    ObjectSpec spec;
    auto shape = parse_shape(o.at("shape").get<std::string>());
    auto color = parse_color(o.at("color").get<std::string>());
    auto side = parse_zone(o.at("side").get<std::string>());
    const int kind = o.at("kind").get<int>();
    if (!shape || !color || !side || kind < 0 || kind > 3) throw FormatError("bad object in checkpoint");
    spec.shape = *shape;
    spec.color = *color;
    spec.position = {static_cast<ObjectPosition::Kind>(kind), o.at("cell").get<int>(), *side,
                     o.at("slot").get<int>()};
    s.objects.push_back(spec);
  }
  auto arm = parse_zone(j.at("arm").get<std::string>());
  if (!arm) throw FormatError("bad arm zone in checkpoint");
  s.arm_zone = *arm;
  s.step_count = j.at("step_count").get<int>();
  s.episode_done = j.at("episode_done").get<bool>();
  s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  s.rng_state = j.at("rng_state").get<std::uint64_t>();
  return s;
}

std::string rng_to_string(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

}  // namespace

void save_pretrain_checkpoint(const PretrainCheckpoint& ckpt, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "memory.bin", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "memory.bin").string());
    dqn::save_memory(ckpt.memory, out);
  }
  json j = {{"env_state", state_to_json(ckpt.env_state)},
            {"episodes_started", ckpt.episodes_started},
            {"rng_state", ckpt.rng_state},
            {"budget_total", ckpt.budget_total},
            {"budget_used", ckpt.budget_used},
            {"agent_index", ckpt.agent_index}};
  std::ofstream out(dir / "pretrain.json");
  if (!out) throw Error("cannot write " + (dir / "pretrain.json").string());
  out << j.dump(2) << '\n';
}

PretrainCheckpoint load_pretrain_checkpoint(const std::filesystem::path& dir) {
  std::ifstream mem_in(dir / "memory.bin", std::ios::binary);
  std::ifstream meta_in(dir / "pretrain.json");
  if (!mem_in || !meta_in) throw FormatError("no pretraining checkpoint in " + dir.string());
  PretrainCheckpoint ckpt{dqn::load_memory(mem_in), {}, 0, {}, 0, 0};
  json j;
  try {
    j = json::parse(meta_in);
    ckpt.env_state = state_from_json(j.at("env_state"));
    ckpt.episodes_started = j.at("episodes_started").get<std::uint64_t>();
    ckpt.rng_state = j.at("rng_state").get<std::string>();
    ckpt.budget_total = j.at("budget_total").get<int>();
    ckpt.budget_used = j.at("budget_used").get<int>();
    ckpt.agent_index = j.value("agent_index", 0);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad pretraining checkpoint: ") + e.what());
  }
  return ckpt;
}

PretrainReport pretrain(Environment& env, dqn::ReplayMemory& mem, RunMode mode,
                        advice::Advisor* advisor, advice::AdviceBudget* budget, Rng& rng,
                        const PretrainOptions& options) {
  const PretrainConfig& pc = options.config;
  pc.validate();
  options.observation.validate();
  if (interactive(mode) && (advisor == nullptr || budget == nullptr)) {
    throw ContractViolation("interactive pretraining needs an advisor and a budget");
  }
  if (mem.capacity() < pc.total_steps) throw ContractViolation("replay memory too small for pretraining");

  PretrainReport report;
  report.advised_flags.assign(mem.size(), false);
  std::set<std::uint64_t> advised_episodes;

  if (env.state().episode_done || env.episodes_started() == 0) env.reset();
  auto frame = std::make_shared<const Frame>(observe(env.state(), options.observation));
  double last_reward = 0.0;
  double cumulative = 0.0;

  while (mem.size() < pc.total_steps) {
    const bool advising = interactive(mode) && mem.size() >= pc.random_steps && !budget->exhausted();
    if (advising && pc.reset_at_window && mem.size() == pc.random_steps && report.advised_steps == 0 &&
        env.state().step_count > 0) {
      env.reset();
      frame = std::make_shared<const Frame>(observe(env.state(), options.observation));
    }

    advice::AdviceContext ctx;
    ctx.step = mem.size();
    ctx.episode = env.episodes_started();
    ctx.budget_remaining = budget ? budget->remaining() : 0;
    ctx.last_reward = last_reward;
    ctx.cumulative_reward = cumulative;
    // Advised steps are shown to the advisor by the advisor itself.
    if (options.on_step && !advising) options.on_step(render(env.state()), ctx);

    Action action;
    if (advising) {
      try {
        // The advisor sees the full-resolution render regardless of the learner's input size.
        const Frame full = render(env.state());
        action = advice::next_advice(*advisor, env.state(), full, *budget, ctx);
      } catch (const Error&) {
        if (options.resume_dir) {
          save_pretrain_checkpoint({mem, env.state(), env.episodes_started(), rng_to_string(rng),
                                    budget->total(), budget->used(), options.agent_index},
                                   *options.resume_dir);
        }
        throw;
      }
    } else {
      action = static_cast<Action>(bounded(rng(), kNumActions));
    }

    const StepResult r = env.step(action);
    auto next = std::make_shared<const Frame>(observe(r.state, options.observation));
    mem.push({frame, action, r.reward, next, r.terminal});
    report.advised_flags.push_back(advising);
    ++report.inserted;
    if (advising) {
      ++report.advised_steps;
      if (report.first_advised_insert == 0) report.first_advised_insert = mem.size();
      report.last_advised_insert = mem.size();
      advised_episodes.insert(env.episodes_started());
    }
    last_reward = r.reward;
    cumulative += r.reward;

    if (r.state.episode_done) {
      env.reset();
      frame = std::make_shared<const Frame>(observe(env.state(), options.observation));
    } else {
      frame = std::move(next);
    }
  }
  report.advised_episodes = static_cast<int>(advised_episodes.size());
  report.episodes_started = env.episodes_started();
  return report;
}

EpsilonSchedule::EpsilonSchedule(double initial, double decay)
    : initial_(initial), decay_(decay), value_(initial) {
  if (!(initial >= 0.0 && initial <= 1.0)) throw ContractViolation("initial epsilon must be in [0, 1]");
  if (!(decay > 0.0 && decay <= 1.0)) throw ContractViolation("epsilon decay must be in (0, 1]");
}

void EpsilonSchedule::advance() noexcept {
  ++steps_;
  value_ = at(initial_, decay_, steps_);
}

double EpsilonSchedule::at(double initial, double decay, std::uint64_t k) noexcept {
  return initial * std::pow(decay, static_cast<double>(k));
}

std::uint64_t EpsilonSchedule::first_step_at_or_below(double initial, double decay, double threshold) {
  if (initial <= threshold) return 0;
  if (!(decay < 1.0)) throw ContractViolation("epsilon never decays with decay >= 1");
  auto k = static_cast<std::uint64_t>(std::floor(std::log(threshold / initial) / std::log(decay)));
  while (k > 0 && at(initial, decay, k - 1) <= threshold) --k;
  while (at(initial, decay, k) > threshold) ++k;
  return k;
}

namespace {

void write_divergence_report(const std::filesystem::path& dir, const EpisodeLog& log,
                             const TrainState& st, const std::string& what) {
  std::filesystem::create_directories(dir);
  json steps = json::array();
  for (const StepRecord& s : log.steps) {
    steps.push_back({{"action", static_cast<int>(s.action)}, {"reward", s.reward}, {"epsilon", s.epsilon}});
  }
  json j = {{"error", what},
            {"episode", log.episode},
            {"global_step", st.global_step},
            {"epsilon", st.epsilon.value()},
            {"episode_steps", steps}};
  std::ofstream out(dir / "divergence.json");
  out << j.dump(2) << '\n';
}

}  // namespace

std::vector<EpisodeLog> train(Environment& env, nn::QNetwork& net, dqn::ReplayMemory& mem,
                              const nn::TrainConfig& cfg, Rng& rng, const TrainOptions& options,
                              TrainState* state) {
  cfg.validate();
  options.observation.validate();
  if (mem.size() < static_cast<std::size_t>(cfg.batch_size)) {
    throw ContractViolation("replay memory holds fewer transitions than one batch");
  }
  TrainState local;
  TrainState& st = state ? *state : local;
  if (st.global_step == 0) st.epsilon = EpsilonSchedule(cfg.epsilon_init, cfg.epsilon_decay);

  std::optional<nn::QNetwork> target;
  if (cfg.target_sync_interval > 0) target.emplace(net);
  if (options.dump_frames_dir) std::filesystem::create_directories(*options.dump_frames_dir);

  std::vector<EpisodeLog> logs;
  logs.reserve(static_cast<std::size_t>(cfg.episodes));
  std::vector<Frame> frames;
  std::vector<int> actions;
  frames.reserve(static_cast<std::size_t>(cfg.batch_size));
  actions.reserve(static_cast<std::size_t>(cfg.batch_size));

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    env.reset();
    EpisodeLog log;
    log.episode = ep;
    auto frame = std::make_shared<const Frame>(observe(env.state(), options.observation));
    while (true) {
      const double eps = st.epsilon.value();
      const Action a = dqn::select_action(net, *frame, eps, rng);
      const StepResult r = env.step(a);
      auto next = std::make_shared<const Frame>(observe(r.state, options.observation));
      mem.push({frame, a, r.reward, next, r.terminal});
      if (options.dump_frames_dir) {
        char name[64];
        std::snprintf(name, sizeof name, "ep%04d_step%04d.ppm", ep, r.state.step_count);
        write_ppm(*next, *options.dump_frames_dir / name);
      }

      const auto batch = dqn::sample_batch(mem, static_cast<std::size_t>(cfg.batch_size), rng);
      const auto targets = dqn::q_targets(batch, target ? *target : net, cfg.gamma);
      frames.clear();
      actions.clear();
      for (const dqn::Transition& t : batch) {
        frames.push_back(*t.state);
        actions.push_back(static_cast<int>(t.action));
      }
      try {
        nn::train_batch(net, std::span<const Frame>(frames), std::span<const int>(actions),
                        std::span<const double>(targets), cfg);
      } catch (const DivergenceError& e) {
        if (options.diagnostics_dir) write_divergence_report(*options.diagnostics_dir, log, st, e.what());
        throw;
      }

      log.steps.push_back({a, r.reward, eps, false});
      log.reward_sum += r.reward;
      st.epsilon.advance();
      ++st.global_step;
      if (target && st.global_step % static_cast<std::uint64_t>(cfg.target_sync_interval) == 0) {
        target->copy_parameters_from(net);
      }
      if (r.state.episode_done) {
        log.terminal = r.terminal;
        log.truncated = r.truncated;
        log.step_count = r.state.step_count;
        break;
      }
      frame = std::move(next);
    }
    if (options.on_episode) options.on_episode(log);
    logs.push_back(std::move(log));
  }
  return logs;
}

}  // namespace idrl::trainer
