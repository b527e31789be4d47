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

#include "idrl/dqn/policy.hpp"

#include <algorithm>

#include "idrl/errors.hpp"

namespace idrl::dqn {

namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ContractViolation("gamma must be in [0, 1)");
}

}  // namespace

Action greedy_action(const nn::QNetwork& net, const Frame& frame) {
  const auto q = net.predict(frame);
  return static_cast<Action>(argmax<float>(q));
}

Action select_action(const nn::QNetwork& net, const Frame& frame, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ContractViolation("epsilon must be in [0, 1]");
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  if (u < epsilon) return static_cast<Action>(bounded(rng(), kNumActions));
  return greedy_action(net, frame);
}

double q_target(const Transition& t, const nn::QNetwork& net, double gamma) {
  check_gamma(gamma);
  if (t.terminal) return t.reward;
  const auto q = net.predict(*t.next_state);
  return t.reward + gamma * static_cast<double>(*std::max_element(q.begin(), q.end()));
}

std::vector<double> q_targets(std::span<const Transition> batch, const nn::QNetwork& net, double gamma) {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const Transition& t : batch) out.push_back(q_target(t, net, gamma));
  return out;
}

}  // namespace idrl::dqn
