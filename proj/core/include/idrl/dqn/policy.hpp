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

#include <span>
#include <vector>

#include "idrl/dqn/replay_memory.hpp"
#include "idrl/env/environment.hpp"
#include "idrl/nn/network.hpp"
#include "idrl/random.hpp"

namespace idrl::dqn {

// Index of the largest value; ties go to the lowest index.
template <typename T>
int argmax(std::span<const T> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Action greedy_action(const nn::QNetwork& net, const Frame& frame);

// Epsilon-greedy: with probability epsilon a uniformly random action,
// otherwise the greedy one. The network is evaluated only when exploiting.
// Throws ContractViolation unless 0 <= epsilon <= 1.
Action select_action(const nn::QNetwork& net, const Frame& frame, double epsilon, Rng& rng);

// r for terminal transitions, else r + gamma * max_a' Q(s', a').
double q_target(const Transition& t, const nn::QNetwork& net, double gamma);
std::vector<double> q_targets(std::span<const Transition> batch, const nn::QNetwork& net, double gamma);

}  // namespace idrl::dqn
