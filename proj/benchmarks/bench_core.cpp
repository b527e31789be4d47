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

#include <benchmark/benchmark.h>

#include <vector>

#include "idrl/dqn/policy.hpp"
#include "idrl/dqn/replay_memory.hpp"
#include "idrl/env/environment.hpp"
#include "idrl/env/render.hpp"
#include "idrl/nn/network.hpp"
#include "idrl/random.hpp"
#include "idrl/stats/stats.hpp"

namespace {

using namespace idrl;

void BM_EnvStep(benchmark::State& state) {
  EnvState s = reset(1);
  for (auto _ : state) {
    if (s.episode_done) s = reset(s.rng_state);
    s = step(s, oracle_action(s)).state;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_EnvStep);

void BM_Render(benchmark::State& state) {
  const EnvState s = reset(2);
  for (auto _ : state) benchmark::DoNotOptimize(render(s));
}
BENCHMARK(BM_Render);

nn::NetworkConfig config_for(int side) {
  return side == 64 ? nn::NetworkConfig::standard() : nn::NetworkConfig::reduced(side, 64);
}

void BM_Predict(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const nn::QNetwork net(config_for(side), 3);
  const Frame f = downsample(render(reset(3)), side);
  for (auto _ : state) benchmark::DoNotOptimize(net.predict(f));
}
BENCHMARK(BM_Predict)->Arg(32)->Arg(64);

void BM_TrainBatch(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto batch = static_cast<std::size_t>(state.range(1));
  nn::QNetwork net(config_for(side), 4);
  std::vector<Frame> frames;
  std::vector<int> actions;
  std::vector<double> targets;
  EnvState s = reset(4);
  for (std::size_t i = 0; i < batch; ++i) {
    frames.push_back(downsample(render(s), side));
    actions.push_back(static_cast<int>(i % 4));
    targets.push_back(0.1 * static_cast<double>(i % 3));
    s = step(s, oracle_action(s)).state;
    if (s.episode_done) s = reset(i);
  }
  nn::TrainConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(nn::train_batch(net, frames, actions, targets, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_TrainBatch)->Args({32, 32})->Args({64, 32})->Unit(benchmark::kMillisecond);

void BM_SampleBatch(benchmark::State& state) {
  dqn::ReplayMemory mem(50'000);
  auto frame = std::make_shared<const Frame>(render(reset(5)));
  for (int i = 0; i < 50'000; ++i) mem.push({frame, Action::Grab, 0.0, frame, false});
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(dqn::sample_batch(mem, 32, rng));
}
BENCHMARK(BM_SampleBatch);

void BM_TTest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n), b(n);
  Rng rng(6);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<double>(rng() % 1000) / 100.0;
    b[i] = static_cast<double>(rng() % 1000) / 90.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(stats::t_test(a, b));
}
BENCHMARK(BM_TTest)->Arg(300)->Arg(3000);

}  // namespace

BENCHMARK_MAIN();
