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

#include "cli.hpp"

#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "idrl/env/environment.hpp"
#include "idrl/env/image_io.hpp"
#include "idrl/env/render.hpp"
#include "idrl/env/scenario.hpp"
#include "idrl/errors.hpp"
#include "idrl/nn/checkpoint.hpp"
#include "idrl/service/server.hpp"
#include "idrl/service/session.hpp"
#include "idrl/stats/export.hpp"
#include "idrl/trainer/experiment.hpp"
#include "idrl/trainer/presets.hpp"
#include "idrl/version.hpp"

namespace idrl::cli {

namespace fs = std::filesystem;

namespace {

// Raised for invalid combinations detected after parsing; reported like a parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingOptions {
  std::string preset = "full";
  std::optional<int> episodes;
  std::optional<int> agents;
  std::uint64_t seed = 0;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::optional<double> gamma;
  std::optional<double> epsilon_decay;
  std::optional<int> objects;
  std::optional<int> budget;
  std::optional<int> threads;
  std::optional<double> p_knock;
  std::optional<std::string> optimizer;
  std::optional<std::string> advisor;
  std::optional<std::string> advisor_checkpoint;
  std::optional<std::string> strategy;
  std::optional<int> target_sync;
  bool linear_head = false;
  bool dump_frames = false;
  bool quiet = false;
};

// CLI11 only reads config files attached to the root app, so subcommands
// apply theirs here. Options already given on the command line win.
void apply_config_file(CLI::App& sub, const std::string& path) {
  if (!fs::exists(path)) throw CLI::FileError::Missing(path);
  for (const CLI::ConfigItem& item : CLI::ConfigTOML().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty()) throw CLI::ConfigError::Extras(item.fullname());
    CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config") throw CLI::ConfigError::Extras(item.name);
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

void add_training_options(CLI::App* app, TrainingOptions& o) {
  app->add_option("--preset", o.preset, "Base configuration: full (published settings) or scaled (desk-scale)")
      ->check(CLI::IsMember({"full", "scaled"}));
  app->add_option("--episodes", o.episodes, "Training episodes per agent")->check(CLI::PositiveNumber);
  app->add_option("--agents", o.agents, "Independent agents per mode")->check(CLI::PositiveNumber);
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--batch-size", o.batch_size, "Transitions per training batch")->check(CLI::PositiveNumber);
  app->add_option("--learning-rate", o.learning_rate, "Optimizer learning rate")->check(CLI::PositiveNumber);
  app->add_option("--gamma", o.gamma, "Discount factor in [0, 1)");
  app->add_option("--epsilon-decay", o.epsilon_decay, "Per-step exploration decay");
  app->add_option("--objects", o.objects, "Objects on the table (1..6)")->check(CLI::Range(1, 6));
  app->add_option("--budget", o.budget, "Advice budget")->check(CLI::NonNegativeNumber);
  app->add_option("--threads", o.threads, "Agents trained in parallel")->check(CLI::PositiveNumber);
  app->add_option("--p-knock", o.p_knock, "Chance a correct drop knocks another object off")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--optimizer", o.optimizer, "adam or sgd")->check(CLI::IsMember({"adam", "sgd"}));
  app->add_option("--advisor", o.advisor, "Trainer for agent mode: oracle, checkpoint or train-first")
      ->check(CLI::IsMember({"oracle", "checkpoint", "train-first"}));
  app->add_option("--advisor-checkpoint", o.advisor_checkpoint, "Advisor network file");
  app->add_option("--strategy", o.strategy, "Advice strategy (only 'early' is implemented)");
  app->add_option("--target-sync", o.target_sync, "Frozen target network sync interval in steps (0 = off)")
      ->check(CLI::NonNegativeNumber);
  app->add_flag("--linear-head", o.linear_head, "Use a linear output layer instead of softmax");
  app->add_flag("--dump-frames", o.dump_frames, "Write every training frame as a PPM file");
  app->add_flag("--quiet", o.quiet, "Suppress per-episode progress");
}

trainer::ExperimentConfig build_config(const TrainingOptions& o, trainer::RunMode mode, const fs::path& out) {
  trainer::ExperimentConfig c = o.preset == "scaled" ? trainer::scaled_preset() : trainer::full_preset();
  c.mode = mode;
  c.seed = o.seed;
  if (o.episodes) c.train.episodes = *o.episodes;
  if (o.agents) c.n_agents = *o.agents;
  if (o.batch_size) c.train.batch_size = *o.batch_size;
  if (o.learning_rate) c.train.learning_rate = *o.learning_rate;
  if (o.gamma) c.train.gamma = *o.gamma;
  if (o.epsilon_decay) c.train.epsilon_decay = *o.epsilon_decay;
  if (o.objects) c.env.num_objects = *o.objects;
  if (o.budget) c.budget = *o.budget;
  if (o.threads) c.threads = *o.threads;
  if (o.p_knock) c.env.p_knock = *o.p_knock;
  if (o.optimizer) c.train.optimizer = *o.optimizer == "sgd" ? nn::OptimizerKind::Sgd : nn::OptimizerKind::Adam;
  if (o.target_sync) c.train.target_sync_interval = *o.target_sync;
  if (o.linear_head) c.network.head = nn::Head::Linear;
  if (o.strategy) {
    auto s = advice::parse_strategy(*o.strategy);
    if (!s) throw UsageError("unknown advice strategy '" + *o.strategy + "'");
    c.strategy = *s;
  }
  if (o.advisor) c.advisor = *trainer::parse_advisor_source(*o.advisor);
  c.advisor_checkpoint = o.advisor_checkpoint ? fs::path(*o.advisor_checkpoint) : out / "advisor.qnet";
  if (o.dump_frames) c.dump_frames_dir = out / "frames";
  return c;
}

trainer::ExperimentHooks progress_hooks(const TrainingOptions& o, std::ostream& out, const std::string& label) {
  trainer::ExperimentHooks h;
  if (!o.quiet) {
    h.on_episode = [&out, label](int agent, const trainer::EpisodeLog& log) {
      char line[160];
      std::snprintf(line, sizeof line, "[%s] agent %d episode %d: reward %.2f, %d steps, epsilon %.4f\n",
                    label.c_str(), agent, log.episode, log.reward_sum, log.step_count,
                    log.steps.empty() ? 0.0 : log.steps.back().epsilon);
      out << line << std::flush;
    };
  }
  return h;
}

void write_outputs(const std::vector<trainer::RunMetrics>& runs, const fs::path& out, std::ostream& os,
                   stats::TTestVariant variant) {
  std::vector<stats::SeriesSet> sets;
  for (const auto& m : runs) {
    trainer::write_manifest(m, out / ("manifest_" + m.label + ".json"));
    sets.push_back(stats::from_metrics(m));
  }
  stats::ExportOptions eo;
  eo.variant = variant;
  const stats::Summary summary = stats::export_results(sets, out, eo);
  os << stats::format_summary(summary);
  os << "results written to " << out.string() << '\n';
}

int cmd_train(const TrainingOptions& o, const std::vector<std::string>& modes, const fs::path& out, bool welch,
              std::ostream& os) {
  std::vector<trainer::RunMode> parsed;
  for (const std::string& m : modes) {
    auto mode = trainer::parse_mode(m);
    if (!mode) throw UsageError("unknown mode '" + m + "'");
    if (*mode == trainer::RunMode::HumanAdvised) {
      throw UsageError("human mode needs a live advisor console; run it with `idrl serve` instead of `idrl train`");
    }
    parsed.push_back(*mode);
  }
  std::vector<trainer::RunMetrics> runs;
  for (trainer::RunMode mode : parsed) {
    auto cfg = build_config(o, mode, out);
    runs.push_back(trainer::run_experiment(cfg, progress_hooks(o, os, std::string(trainer::to_string(mode)))));
  }
  write_outputs(runs, out, os, welch ? stats::TTestVariant::Welch : stats::TTestVariant::Pooled);
  return 0;
}

int cmd_advisor_train(const TrainingOptions& o, const fs::path& out, std::ostream& os) {
  auto cfg = build_config(o, trainer::RunMode::AgentAdvised, out);
  cfg.validate();
  trainer::train_advisor(cfg, progress_hooks(o, os, "advisor"));
  os << "advisor checkpoint written to " << cfg.advisor_checkpoint.string() << '\n';
  return 0;
}

std::atomic<service::Session*> g_session{nullptr};

extern "C" void on_signal(int) {
  if (auto* s = g_session.load()) s->close();
}

int cmd_serve(const TrainingOptions& o, const fs::path& out, std::uint16_t port, const std::string& address,
              const std::string& static_dir, const std::optional<std::string>& resume, std::ostream& os) {
  auto cfg = build_config(o, trainer::RunMode::HumanAdvised, out);
  cfg.resume_dir = out / "resume";
  if (resume) cfg.resume_from = fs::path(*resume);
  cfg.validate();

  service::Session session("human-0");
  service::ServerConfig sc;
  sc.address = address;
  sc.port = port;
  sc.static_dir = static_dir;
  service::Server server(session, sc);
  server.start();
  g_session = &session;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  os << "advisor console: http://" << address << ':' << server.port() << "/ (websocket /ws, health /health)\n"
     << std::flush;

  auto hooks = progress_hooks(o, os, "human");
  hooks.human = &session;
  hooks.on_pretrain_step = [&session](const Frame& frame, const advice::AdviceContext& ctx) {
    session.publish_state(frame, ctx, false);
  };
  int code = 0;
  try {
    const trainer::RunMetrics m = trainer::run_experiment(cfg, hooks);
    write_outputs({m}, out, os, stats::TTestVariant::Pooled);
  } catch (const SessionDisconnected& e) {
    os << "session ended: " << e.what() << "; resumable state saved in " << cfg.resume_dir->string() << '\n';
    code = 1;
  }
  g_session = nullptr;
  server.stop();
  return code;
}

int cmd_stats(const std::vector<std::string>& inputs, const fs::path& out, const std::string& baseline, bool welch,
              std::ostream& os) {
  std::vector<stats::SeriesSet> sets;
  for (const std::string& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(p)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("rewards_", 0) == 0 && entry.path().extension() == ".csv") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) sets.push_back(stats::read_rewards_csv(f));
    } else {
      sets.push_back(stats::read_rewards_csv(p));
    }
  }
  if (sets.empty()) throw UsageError("no rewards_*.csv files found");
  // Baseline first keeps the table order stable.
  std::stable_partition(sets.begin(), sets.end(), [&](const stats::SeriesSet& s) { return s.label == baseline; });
  stats::ExportOptions eo;
  eo.baseline = baseline;
  eo.variant = welch ? stats::TTestVariant::Welch : stats::TTestVariant::Pooled;
  const auto summary = stats::export_results(sets, out, eo);
  os << stats::format_summary(summary);
  return 0;
}

int cmd_render(const std::vector<std::string>& scenarios, std::optional<std::uint64_t> seed, int objects,
               const fs::path& out, std::ostream& os) {
  fs::create_directories(out);
  EnvConfig ec;
  ec.num_objects = objects;
  int written = 0;
  for (const std::string& s : scenarios) {
    const fs::path p(s);
    const fs::path dest = out / (p.stem().string() + ".ppm");
    write_ppm(render(load_scenario(p)), dest);
    os << dest.string() << '\n';
    ++written;
  }
  if (seed || scenarios.empty()) {
    // One oracle episode from a seeded reset, a frame per step.
    EnvState st = reset(seed.value_or(0), ec);
    int k = 0;
    auto dump = [&](const EnvState& state) {
      char name[32];
      std::snprintf(name, sizeof name, "oracle_%03d.ppm", k++);
      write_ppm(render(state), out / name);
      ++written;
    };
    dump(st);
    while (!st.episode_done) {
      st = step(st, oracle_action(st, ec), ec).state;
      dump(st);
    }
    os << "oracle episode: " << k << " frames in " << out.string() << '\n';
  }
  return written > 0 ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interactive deep reinforcement learning for vision-based object sorting", "idrl"};
  app.set_version_flag("--version", std::string(kVersion) + " (" + kGitDescribe + ")");
  app.require_subcommand(1);
  app.fallthrough(false);

  std::string out_dir = "idrl-out";
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory")->envname("IDRL_OUTPUT_DIR")->capture_default_str();
  };

  TrainingOptions topts;
  std::string config_file;
  std::vector<std::string> modes{"autonomous"};
  bool welch = false;
  auto* train = app.add_subcommand("train", "Run pretraining and training for one or more modes");
  add_training_options(train, topts);
  train->add_option("--mode", modes, "autonomous or agent; repeat to compare modes")->capture_default_str();
  train->add_flag("--welch", welch, "Unequal-variance t-test in the summary");
  train->add_option("--config", config_file, "Key-value configuration file (flags override it)");
  add_out(train);

  std::uint16_t port = 8765;
  std::string address = "127.0.0.1";
  std::string static_dir;
  std::optional<std::string> resume;
  auto* serve = app.add_subcommand("serve", "Human-advised training with the advisor console");
  add_training_options(serve, topts);
  serve->add_option("--port", port, "Listen port (0 picks a free one)")->capture_default_str();
  serve->add_option("--address", address, "Listen address")->capture_default_str();
  serve->add_option("--static", static_dir, "Directory with the console assets");
  serve->add_option("--resume", resume, "Resume pretraining from a saved checkpoint directory");
  serve->add_option("--config", config_file, "Key-value configuration file (flags override it)");
  add_out(serve);

  auto* advisor = app.add_subcommand("advisor-train", "Train and checkpoint an advisor agent");
  add_training_options(advisor, topts);
  advisor->add_option("--config", config_file, "Key-value configuration file (flags override it)");
  add_out(advisor);

  std::vector<std::string> inputs;
  std::string baseline = "autonomous";
  auto* stats_cmd = app.add_subcommand("stats", "Recompute the analysis from saved reward files");
  stats_cmd->add_option("inputs", inputs, "rewards_*.csv files or directories containing them")->required();
  stats_cmd->add_option("--baseline", baseline, "Label improvements are measured against")->capture_default_str();
  stats_cmd->add_flag("--welch", welch, "Unequal-variance t-test");
  add_out(stats_cmd);

  std::vector<std::string> scenarios;
  std::optional<std::uint64_t> render_seed;
  int render_objects = 6;
  auto* render_cmd = app.add_subcommand("render", "Write fixture frames as PPM images");
  render_cmd->add_option("scenarios", scenarios, "Scenario files to render");
  render_cmd->add_option("--seed", render_seed, "Also dump an oracle episode from this reset seed");
  render_cmd->add_option("--objects", render_objects, "Objects for the seeded episode")->check(CLI::Range(1, 6));
  add_out(render_cmd);

  try {
    app.parse(argc, argv);
    for (CLI::App* sub : {train, serve, advisor}) {
      if (*sub && !config_file.empty()) apply_config_file(*sub, config_file);
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    const fs::path out_path(out_dir);
    if (*train) return cmd_train(topts, modes, out_path, welch, out);
    if (*serve) return cmd_serve(topts, out_path, port, address, static_dir, resume, out);
    if (*advisor) return cmd_advisor_train(topts, out_path, out);
    if (*stats_cmd) return cmd_stats(inputs, out_path, baseline, welch, out);
    if (*render_cmd) return cmd_render(scenarios, render_seed, render_objects, out_path, out);
  } catch (const UsageError& e) {
    err << "idrl: " << e.what() << '\n' << "Run with --help for more information.\n";
    return 2;
  } catch (const ContractViolation& e) {
    err << "idrl: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "idrl: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace idrl::cli
