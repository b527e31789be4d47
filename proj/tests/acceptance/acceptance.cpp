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

// Acceptance checks. Each criterion prints one line:
//   criterion <n> PASS|FAIL  <title>: <detail>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "CLI11.hpp"
#include "idrl/advice/advice.hpp"
#include "idrl/env/environment.hpp"
#include "idrl/errors.hpp"
#include "idrl/nn/grad_check.hpp"
#include "idrl/nn/network.hpp"
#include "idrl/service/protocol.hpp"
#include "idrl/service/session.hpp"
#include "idrl/stats/export.hpp"
#include "idrl/stats/stats.hpp"
#include "idrl/trainer/experiment.hpp"
#include "idrl/trainer/presets.hpp"
#include "idrl/trainer/trainer.hpp"

namespace {

using namespace idrl;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "" : "MISSED ") + what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1 ---------------------------------------------------------------------------

Outcome reward_exactness() {
  Outcome o;
  bool sequence_ok = true, total_ok = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EnvState s = reset(seed);
    std::vector<double> scoring;
    double total = 0.0;
    while (!s.episode_done) {
      const StepResult r = step(s, oracle_action(s));
      if (r.reward != 0.0) scoring.push_back(r.reward);
      total += r.reward;
      s = r.state;
    }
    sequence_ok &= scoring == std::vector<double>{0.4, 0.4, 0.4, 0.4, 0.4, 1.0};
    total_ok &= total == 3.0;
  }
  o.check(sequence_ok, "perfect episode scores 0.4 x5 then 1.0");
  o.check(total_ok, "perfect episode total is exactly 3.0");

  bool wrong_ok = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EnvState s = reset(seed);
    s = step(s, Action::Grab).state;
    const Color c = s.objects[*s.carried_index()].color;
    const Action away = c == Color::Blue ? Action::MoveLeft : Action::MoveRight;
    s = step(s, away).state;
    const StepResult r = step(s, Action::Drop);
    wrong_ok &= r.reward == -1.0 && r.terminal && r.state.episode_done;
  }
  o.check(wrong_ok, "misplacement gives -1 and terminates");

  EnvState s = reset(7);
  bool penalty_ok = true;
  for (int k = 1; k <= 40; ++k) {
    const StepResult r = step(s, Action::MoveLeft);
    penalty_ok &= r.reward == (k >= 19 ? -0.01 : 0.0);
    s = r.state;
  }
  o.check(penalty_ok, "steps 19+ add -0.01, steps 1..18 add nothing");
  return o;
}

// 2 ---------------------------------------------------------------------------

Outcome oracle_optimality() {
  Outcome o;
  int wrong_length = 0, misplaced = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    EnvState s = reset(derive_seed(2024, seed, "acceptance"));
    int steps = 0;
    while (!s.episode_done) {
      const StepResult r = step(s, oracle_action(s));
      misplaced += r.reward <= -1.0;
      s = r.state;
      ++steps;
    }
    wrong_length += steps != 18;
  }
  o.check(wrong_length == 0, "1000 oracle episodes of exactly 18 steps (" + std::to_string(wrong_length) + " off)");
  o.check(misplaced == 0, "no -1 outcome (" + std::to_string(misplaced) + " seen)");
  return o;
}

// 3 ---------------------------------------------------------------------------

Outcome gradient_correctness() {
  Outcome o;
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    nn::QNetworkF64 net(nn::NetworkConfig::reduced(16, 32), seed);
    Frame f(16, 16);
    Rng rng(seed);
    for (auto& b : f.bytes()) b = static_cast<std::uint8_t>(rng() & 0xff);
    nn::GradCheckOptions gc;
    gc.seed = seed;
    const auto rep = nn::grad_check_report(net, f, gc);
    o.check(rep.max_relative_error < 1e-3,
            "seed " + std::to_string(seed) + " max rel err " + fmt("%.2e", rep.max_relative_error) + " over " +
                std::to_string(rep.checked) + " params");
  }
  return o;
}

// 4 ---------------------------------------------------------------------------

// In-process console speaking the wire protocol: answers every awaiting state
// message with the next scripted action.
class ScriptedConsole final : public service::ConsoleSink {
 public:
  explicit ScriptedConsole(service::Session& s) : session_(s) {}
  void send(std::string text) override {
    const service::Message m = service::parse_message(text);
    if (const auto* st = std::get_if<service::StateMessage>(&m); st && st->awaiting_advice) {
      std::lock_guard lock(mu_);
      pending_.push_back(service::serialize(service::AdviceMessage{st->step, static_cast<int>(st->step % 4)}));
    }
  }
  // Delivered from a separate thread so the session lock is never re-entered.
  void pump(const std::atomic<bool>& stop) {
    while (!stop) {
      std::vector<std::string> batch;
      {
        std::lock_guard lock(mu_);
        batch.swap(pending_);
      }
      for (const auto& t : batch) session_.on_console_message(this, t);
      std::this_thread::sleep_for(std::chrono::microseconds(200));
    }
  }

 private:
  service::Session& session_;
  std::mutex mu_;
  std::vector<std::string> pending_;
};

Outcome pretraining_structure() {
  Outcome o;
  using trainer::RunMode;

  auto check_window = [&](const trainer::PretrainReport& r, const dqn::ReplayMemory& mem, const std::string& who) {
    bool window = r.advised_flags.size() == 1000;
    for (std::size_t i = 0; window && i < 1000; ++i) window = r.advised_flags[i] == (i >= 900);
    o.check(mem.size() == 1000, who + ": memory holds " + std::to_string(mem.size()));
    o.check(window && r.first_advised_insert == 901 && r.last_advised_insert == 1000,
            who + ": advised inserts " + std::to_string(r.first_advised_insert) + ".." +
                std::to_string(r.last_advised_insert));
  };

  {
    Environment env(1);
    dqn::ReplayMemory mem;
    Rng rng(2);
    const auto r = trainer::pretrain(env, mem, RunMode::Autonomous, nullptr, nullptr, rng);
    o.check(mem.size() == 1000 && r.advised_steps == 0, "autonomous: 1000 random transitions");
  }
  {
    Environment env(3);
    dqn::ReplayMemory mem;
    Rng rng(4);
    advice::OracleAdvisor oracle;
    advice::AdviceBudget budget;
    const auto r = trainer::pretrain(env, mem, RunMode::AgentAdvised, &oracle, &budget, rng);
    check_window(r, mem, "agent/oracle");
    o.check(budget.exhausted() && r.advised_episodes <= 6,
            "oracle budget exhausted within " + std::to_string(r.advised_episodes) + " episodes");
  }
  {
    Environment env(5);
    dqn::ReplayMemory mem;
    Rng rng(6);
    service::Session session;
    auto console = std::make_shared<ScriptedConsole>(session);
    session.attach(console);
    std::atomic<bool> stop{false};
    std::thread pump([&] { console->pump(stop); });
    advice::HumanAdvisor human(session);
    advice::AdviceBudget budget;
    const auto r = trainer::pretrain(env, mem, RunMode::HumanAdvised, &human, &budget, rng);
    stop = true;
    pump.join();
    check_window(r, mem, "human/scripted console");
    bool script = true;
    for (std::size_t i = 900; i < 1000; ++i) script &= static_cast<int>(mem[i].action) == static_cast<int>(i % 4);
    o.check(script && budget.exhausted(), "human: scripted advice applied at every advised step");
  }
  return o;
}

// 5 and 8 ---------------------------------------------------------------------

trainer::ExperimentConfig scaled(trainer::RunMode mode) {
  trainer::ExperimentConfig c = trainer::scaled_preset();
  c.mode = mode;
  c.seed = 20260101;
  c.advisor = trainer::AdvisorSource::Oracle;
  return c;
}

stats::Summary run_scaled(const fs::path& dir, std::ostream& log) {
  fs::create_directories(dir);
  std::vector<stats::SeriesSet> sets;
  for (auto mode : {trainer::RunMode::Autonomous, trainer::RunMode::AgentAdvised}) {
    const auto t0 = std::chrono::steady_clock::now();
    trainer::ExperimentHooks hooks;
    hooks.on_episode = [&log, mode](int agent, const trainer::EpisodeLog& e) {
      if ((e.episode + 1) % 40 == 0) {
        log << "  [" << trainer::to_string(mode) << "] agent " << agent << " episode " << e.episode + 1 << '\n'
            << std::flush;
      }
    };
    const trainer::RunMetrics m = trainer::run_experiment(scaled(mode), hooks);
    trainer::write_manifest(m, dir / ("manifest_" + m.label + ".json"));
    sets.push_back(stats::from_metrics(m));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log << "  " << m.label << " done in " << fmt("%.0f", secs) << " s\n" << std::flush;
  }
  const stats::Summary s = stats::export_results(sets, dir);
  log << stats::format_summary(s);
  return s;
}

Outcome scaled_advantage(const fs::path& dir) {
  Outcome o;
  const stats::Summary s = run_scaled(dir, std::cerr);
  const double imp = s.improvement[1];
  o.check(imp >= 30.0, "agent-advised mean R_T " + fmt("%.2f", s.sets[1].mean_r_total()) + " vs autonomous " +
                           fmt("%.2f", s.sets[0].mean_r_total()) + " (" + fmt("%+.2f", imp) + "%, need >= +30%)");
  for (const auto& t : s.tests) {
    if (t.unit != "episode-mean") continue;
    o.check(t.defined && t.result.p < 0.05,
            "t-test on per-episode means t=" + fmt("%.4f", t.result.t) + " df=" + fmt("%.0f", t.result.df) +
                " p=" + fmt("%.3g", t.result.p));
  }
  for (const auto& t : s.tests) {
    if (t.unit == "agent-total" && t.defined) {
      o.notes.push_back("(info) per-agent R_T test t=" + fmt("%.4f", t.result.t) + " p=" + fmt("%.3g", t.result.p));
    }
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const fs::path& reference, const fs::path& dir) {
  Outcome o;
  if (!fs::exists(reference / "rewards_agent.csv")) {
    std::cerr << "  no reference run in " << reference << "; producing one\n";
    run_scaled(reference, std::cerr);
  }
  run_scaled(dir, std::cerr);
  for (const char* f : {"rewards_autonomous.csv", "rewards_agent.csv", "manifest_autonomous.json",
                        "manifest_agent.json", "summary.txt", "correlation.csv", "curves.svg"}) {
    const std::string a = slurp(reference / f), b = slurp(dir / f);
    o.check(!a.empty() && a == b, std::string(f) + (a == b ? " identical" : " differs"));
  }
  return o;
}

// 6 ---------------------------------------------------------------------------

Outcome epsilon_schedule() {
  Outcome o;
  trainer::EpsilonSchedule e(1.0, 0.9995);
  double worst = 0.0;
  for (std::uint64_t k = 0; k <= 20000; ++k) {
    worst = std::max(worst, std::abs(e.value() - std::pow(0.9995, static_cast<double>(k))));
    e.advance();
  }
  o.check(worst <= 1e-12, "epsilon after k steps equals 0.9995^k (max dev " + fmt("%.1e", worst) + ")");
  const auto first = trainer::EpsilonSchedule::first_step_at_or_below(1.0, 0.9995, 0.01);
  o.check(first == 9206, "first step with epsilon <= 0.01 is " + std::to_string(first) + " (criterion states 9206; 0.9995^9206 = " +
                             fmt("%.6f", std::pow(0.9995, 9206.0)) + ")");
  return o;
}

// 7 ---------------------------------------------------------------------------

Outcome statistics_oracles() {
  Outcome o;
  using LD = long double;
  auto mean = [](const std::vector<double>& x) {
    LD s = 0;
    for (double v : x) s += v;
    return s / x.size();
  };
  double worst_r = 0.0, worst_t = 0.0, worst_p = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    const int na = 5 + static_cast<int>(rng() % 100), nb = 5 + static_cast<int>(rng() % 100);
    std::vector<double> a, b;
    for (int i = 0; i < na; ++i) a.push_back(1.5 * n(rng) + 0.3);
    for (int i = 0; i < nb; ++i) b.push_back(0.7 * n(rng));
    std::vector<double> y;
    for (int i = 0; i < na; ++i) y.push_back(0.5 * a[i] + n(rng));

    const LD ma = mean(a), my = mean(y), mb = mean(b);
    LD sxy = 0, sxx = 0, syy = 0, ssa = 0, ssb = 0;
    for (int i = 0; i < na; ++i) {
      sxy += (a[i] - ma) * (y[i] - my);
      sxx += (a[i] - ma) * (a[i] - ma);
      syy += (y[i] - my) * (y[i] - my);
      ssa += (a[i] - ma) * (a[i] - ma);
    }
    for (int i = 0; i < nb; ++i) ssb += (b[i] - mb) * (b[i] - mb);
    const double r = static_cast<double>(sxy / std::sqrt(sxx * syy));
    const LD sp = (ssa + ssb) / (na + nb - 2);
    const double t = static_cast<double>((ma - mb) / std::sqrt(sp * (LD(1) / na + LD(1) / nb)));
    boost::math::students_t dist(na + nb - 2);
    const double p = 2 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));

    const auto got = stats::t_test(a, b);
    worst_r = std::max(worst_r, std::abs(stats::pearson(a, y) - r));
    worst_t = std::max(worst_t, std::abs(got.t - t));
    worst_p = std::max(worst_p, std::abs(got.p - p));
  }
  o.check(worst_r <= 1e-9, "pearson vs direct formula, 100 fixtures, max dev " + fmt("%.1e", worst_r));
  o.check(worst_t <= 1e-9, "t statistic vs direct formula, max dev " + fmt("%.1e", worst_t));
  o.check(worst_p <= 1e-9, "p-value vs Boost.Math Student t, max dev " + fmt("%.1e", worst_p));
  const std::vector<double> x{0.2, 1.7, -0.4, 3.3, 2.2};
  o.check(std::abs(stats::pearson(x, x) - 1.0) < 1e-15, "pearson(x, x) = 1");
  const auto same = stats::t_test(x, x);
  o.check(same.t == 0.0 && same.p == 1.0, "t_test(a, a) = (0, 1)");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-8", "idrl_acceptance"};
  std::vector<int> which;
  std::string out = "acceptance-out";
  app.add_option("-c,--criterion", which, "Criteria to run (default: all)")->check(CLI::Range(1, 8));
  app.add_option("--out", out, "Directory for the scaled runs")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8};

  const fs::path base(out);
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {1, {"reward exactness", reward_exactness}},
      {2, {"oracle optimality", oracle_optimality}},
      {3, {"gradient correctness", gradient_correctness}},
      {4, {"pretraining structure", pretraining_structure}},
      {5, {"scaled interactive advantage", [&] { return scaled_advantage(base / "c5"); }}},
      {6, {"epsilon schedule", epsilon_schedule}},
      {7, {"statistics oracle equivalence", statistics_oracles}},
      {8, {"determinism", [&] { return determinism(base / "c5", base / "c8"); }}},
  };

  bool all = true;
  for (int n : which) {
    const auto& [title, fn] = criteria.at(n);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string detail;
    for (const auto& note : o.notes) detail += (detail.empty() ? "" : "; ") + note;
    std::cout << "criterion " << n << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << title << " (" << fmt("%.1f", secs)
              << " s): " << detail << std::endl;
    all &= o.pass;
  }
  return all ? 0 : 1;
}
