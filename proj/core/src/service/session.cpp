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

#include "idrl/service/session.hpp"

#include "idrl/errors.hpp"

namespace idrl::service {

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::WaitingForConsole: return "waiting_for_console";
    case Phase::Advising: return "advising";
    case Phase::Done: return "done";
  }
  return "?";
}

Session::Session(std::string id) : id_(std::move(id)) {}

void Session::send_locked(std::string text) {
  if (console_) console_->send(std::move(text));
}

void Session::reject_locked(std::string reason, std::optional<std::uint64_t> step) {
  send_locked(serialize(RejectMessage{std::move(reason), step}));
}

void Session::publish_state(const Frame& frame, const advice::AdviceContext& ctx, bool awaiting_advice) {
  StateMessage m;
  m.step = ctx.step;
  m.episode = ctx.episode;
  m.budget_remaining = ctx.budget_remaining;
  m.last_reward = ctx.last_reward;
  m.cumulative_reward = ctx.cumulative_reward;
  m.awaiting_advice = awaiting_advice;
  m.width = frame.width();
  m.height = frame.height();
  m.frame = encode_frame(frame);
  std::string text = serialize(m);

  std::lock_guard lock(mu_);
  if (phase_ == Phase::Done) throw ContractViolation("session already finished");
  if (ctx.step < step_) throw ContractViolation("state step index went backwards");
  if (ctx.step != step_) slot_.reset();
  step_ = ctx.step;
  budget_remaining_ = ctx.budget_remaining;
  awaiting_published_ = awaiting_advice;
  if (awaiting_advice) phase_ = Phase::Advising;
  last_frame_ = frame;
  retained_ = text;
  send_locked(std::move(text));
}

Action Session::await_advice(std::uint64_t step) {
  std::unique_lock lock(mu_);
  if (waiting_) throw ContractViolation("await_advice is already pending");
  if (closed_) throw SessionDisconnected("session closed");
  if (phase_ == Phase::Done) throw ContractViolation("session already finished");
  if (step != step_) throw ContractViolation("await_advice for a step that was not published");
  waiting_ = true;
  phase_ = Phase::Advising;
  disconnected_ = false;
  console_seen_during_wait_ = static_cast<bool>(console_);
  cv_.wait(lock, [&] { return slot_.has_value() || disconnected_ || closed_; });
  waiting_ = false;
  awaiting_published_ = false;
  phase_ = Phase::WaitingForConsole;
  if (slot_) {
    const Action a = *slot_;
    slot_.reset();
    return a;
  }
  throw SessionDisconnected(closed_ ? "session closed while awaiting advice"
                                    : "advisor console disconnected while awaiting advice");
}

void Session::finish(double total_reward) {
  std::lock_guard lock(mu_);
  phase_ = Phase::Done;
  retained_ = serialize(DoneMessage{total_reward});
  send_locked(retained_);
  cv_.notify_all();
}

bool Session::attach(std::shared_ptr<ConsoleSink> console) {
  std::lock_guard lock(mu_);
  if (console_) return false;
  console_ = std::move(console);
  if (waiting_) console_seen_during_wait_ = true;
  if (!retained_.empty()) console_->send(retained_);
  return true;
}

void Session::detach(const ConsoleSink* console) {
  std::lock_guard lock(mu_);
  if (console_.get() != console) return;
  console_.reset();
  if (waiting_ && console_seen_during_wait_ && !slot_) {
    disconnected_ = true;
    cv_.notify_all();
  }
}

void Session::on_console_message(const ConsoleSink* console, std::string_view text) {
  std::lock_guard lock(mu_);
  if (console_.get() != console) return;
  AdviceMessage advice;
  try {
    Message m = parse_message(text);
    if (!std::holds_alternative<AdviceMessage>(m)) {
      reject_locked("consoles may only send advice messages", std::nullopt);
      return;
    }
    advice = std::get<AdviceMessage>(m);
  } catch (const FormatError& e) {
    reject_locked(std::string("malformed message: ") + e.what(), std::nullopt);
    return;
  }
  if (phase_ == Phase::Done) {
    reject_locked("session is finished", advice.step);
  } else if (!waiting_ && !awaiting_published_) {
    reject_locked("not awaiting advice", advice.step);
  } else if (advice.step != step_) {
    reject_locked("stale step " + std::to_string(advice.step) + ", current step is " + std::to_string(step_),
                  advice.step);
  } else if (advice.action < 0 || advice.action >= kNumActions) {
    reject_locked("invalid action " + std::to_string(advice.action) + ", expected 0..3", advice.step);
  } else if (slot_) {
    reject_locked("advice for this step already received", advice.step);
  } else {
    slot_ = static_cast<Action>(advice.action);
    cv_.notify_all();
  }
}

void Session::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  cv_.notify_all();
}

SessionSnapshot Session::snapshot() const {
  std::lock_guard lock(mu_);
  return {id_, phase_, static_cast<bool>(console_), step_, budget_remaining_, last_frame_};
}

std::string Session::retained_message() const {
  std::lock_guard lock(mu_);
  return retained_;
}

}  // namespace idrl::service
