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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "idrl/env/environment.hpp"
#include "idrl/env/frame.hpp"
#include "idrl/nn/network.hpp"

namespace idrl::advice {

// Fixed number of advice interactions available to a trainer.
class AdviceBudget {
 public:
  static constexpr int kDefaultTotal = 100;

  explicit AdviceBudget(int total = kDefaultTotal);

  int total() const noexcept { return total_; }
  int used() const noexcept { return used_; }
  int remaining() const noexcept { return total_ - used_; }
  bool exhausted() const noexcept { return used_ >= total_; }

  // Records one delivered piece of advice; throws BudgetExhausted when none remain.
  void consume();

  // Restores a saved count (resuming an interrupted run).
  void restore_used(int used);

 private:
  int total_;
  int used_ = 0;
};

inline int remaining(const AdviceBudget& b) noexcept { return b.remaining(); }

// Budget-spending strategies named in the interactive-feedback literature.
// Only early advising (all advice in the first consecutive steps) is built;
// the others are recognized so configuration can reject them by name.
enum class AdviceStrategy { EarlyAdvising, Alternating, Importance, MistakeCorrecting, Predictive };
std::optional<AdviceStrategy> parse_strategy(std::string_view s) noexcept;
std::string_view to_string(AdviceStrategy s) noexcept;
// Throws ContractViolation for anything but EarlyAdvising.
void require_supported(AdviceStrategy s);

enum class AdvisorKind { Oracle, TrainedAgent, Human };
std::string_view to_string(AdvisorKind k) noexcept;

// What a live advisor sees besides the observation.
struct AdviceContext {
  std::uint64_t step = 0;       // global, monotonically increasing step index
  std::uint64_t episode = 0;
  int budget_remaining = 0;
  double last_reward = 0.0;
  double cumulative_reward = 0.0;
};

class Advisor {
 public:
  virtual ~Advisor() = default;
  virtual AdvisorKind kind() const noexcept = 0;
  virtual Action advise(const EnvState& state, const Frame& frame, const AdviceContext& ctx) = 0;
};

class OracleAdvisor final : public Advisor {
 public:
  explicit OracleAdvisor(EnvConfig config = {}) : config_(config) {}
  AdvisorKind kind() const noexcept override { return AdvisorKind::Oracle; }
  Action advise(const EnvState& state, const Frame& frame, const AdviceContext& ctx) override;

 private:
  EnvConfig config_;
};

// A previously trained learner acting greedily on the frame.
class TrainedAgentAdvisor final : public Advisor {
 public:
  explicit TrainedAgentAdvisor(nn::QNetwork net) : net_(std::move(net)) {}
  // Throws FormatError when the checkpoint architecture differs from `architecture`.
  static std::unique_ptr<TrainedAgentAdvisor> from_checkpoint(const std::filesystem::path& path,
                                                              const std::string& architecture);

  AdvisorKind kind() const noexcept override { return AdvisorKind::TrainedAgent; }
  Action advise(const EnvState& state, const Frame& frame, const AdviceContext& ctx) override;
  const nn::QNetwork& network() const noexcept { return net_; }

 private:
  nn::QNetwork net_;
};

// Transport to a human console. Implemented by service::Session.
class HumanLink {
 public:
  virtual ~HumanLink() = default;
  virtual void publish_state(const Frame& frame, const AdviceContext& ctx, bool awaiting_advice) = 0;
  // Blocks until the console answers for `step`; throws SessionDisconnected.
  virtual Action await_advice(std::uint64_t step) = 0;
  virtual void finish(double total_reward) = 0;
};

class HumanAdvisor final : public Advisor {
 public:
  explicit HumanAdvisor(HumanLink& link) : link_(&link) {}
  AdvisorKind kind() const noexcept override { return AdvisorKind::Human; }
  Action advise(const EnvState& state, const Frame& frame, const AdviceContext& ctx) override;

 private:
  HumanLink* link_;
};

// Asks the advisor for the next action and charges the budget one unit.
// Throws BudgetExhausted if nothing remains (the advisor is not consulted).
Action next_advice(Advisor& advisor, const EnvState& state, const Frame& frame, AdviceBudget& budget,
                   AdviceContext ctx = {});

}  // namespace idrl::advice
