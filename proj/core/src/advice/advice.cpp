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

#include "idrl/advice/advice.hpp"

#include "idrl/dqn/policy.hpp"
#include "idrl/errors.hpp"
#include "idrl/nn/checkpoint.hpp"

namespace idrl::advice {

AdviceBudget::AdviceBudget(int total) : total_(total) {
  if (total < 0) throw ContractViolation("advice budget must be non-negative");
}

void AdviceBudget::consume() {
  if (exhausted()) throw BudgetExhausted();
  ++used_;
}

void AdviceBudget::restore_used(int used) {
  if (used < 0 || used > total_) throw ContractViolation("restored budget usage out of range");
  used_ = used;
}

std::optional<AdviceStrategy> parse_strategy(std::string_view s) noexcept {
  for (AdviceStrategy v : {AdviceStrategy::EarlyAdvising, AdviceStrategy::Alternating,
                           AdviceStrategy::Importance, AdviceStrategy::MistakeCorrecting,
                           AdviceStrategy::Predictive}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

std::string_view to_string(AdviceStrategy s) noexcept {
  switch (s) {
    case AdviceStrategy::EarlyAdvising: return "early";
    case AdviceStrategy::Alternating: return "alternating";
    case AdviceStrategy::Importance: return "importance";
    case AdviceStrategy::MistakeCorrecting: return "mistake-correcting";
    case AdviceStrategy::Predictive: return "predictive";
  }
  return "?";
}

void require_supported(AdviceStrategy s) {
  if (s != AdviceStrategy::EarlyAdvising) {
    throw ContractViolation("advice strategy '" + std::string(to_string(s)) +
                            "' is not implemented; only 'early' advising is supported");
  }
}

std::string_view to_string(AdvisorKind k) noexcept {
  switch (k) {
    case AdvisorKind::Oracle: return "oracle";
    case AdvisorKind::TrainedAgent: return "trained-agent";
    case AdvisorKind::Human: return "human";
  }
  return "?";
}

Action OracleAdvisor::advise(const EnvState& state, const Frame&, const AdviceContext&) {
  return oracle_action(state, config_);
}

std::unique_ptr<TrainedAgentAdvisor> TrainedAgentAdvisor::from_checkpoint(
    const std::filesystem::path& path, const std::string& architecture) {
  return std::make_unique<TrainedAgentAdvisor>(nn::load_checkpoint<float>(path, architecture));
}

Action TrainedAgentAdvisor::advise(const EnvState&, const Frame& frame, const AdviceContext&) {
  const int side = net_.config().input_width;
  if (frame.width() != side) return dqn::greedy_action(net_, downsample(frame, side));
  return dqn::greedy_action(net_, frame);
}

Action HumanAdvisor::advise(const EnvState&, const Frame& frame, const AdviceContext& ctx) {
  link_->publish_state(frame, ctx, true);
  return link_->await_advice(ctx.step);
}

Action next_advice(Advisor& advisor, const EnvState& state, const Frame& frame, AdviceBudget& budget,
                   AdviceContext ctx) {
  if (budget.exhausted()) throw BudgetExhausted();
  ctx.budget_remaining = budget.remaining();
  const Action a = advisor.advise(state, frame, ctx);
  budget.consume();
  return a;
}

}  // namespace idrl::advice
