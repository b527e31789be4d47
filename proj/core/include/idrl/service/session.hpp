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

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "idrl/advice/advice.hpp"
#include "idrl/service/protocol.hpp"

namespace idrl::service {

// Outgoing half of a console connection.
class ConsoleSink {
 public:
  virtual ~ConsoleSink() = default;
  virtual void send(std::string text) = 0;
};

enum class Phase { WaitingForConsole, Advising, Done };
std::string_view to_string(Phase p) noexcept;

struct SessionSnapshot {
  std::string id;
  Phase phase = Phase::WaitingForConsole;
  bool console_attached = false;
  std::uint64_t step = 0;
  int budget_remaining = 0;
  std::optional<Frame> last_frame;
};

// Bridge between a blocked training loop and one advisor console. The
// trainer calls the HumanLink side; the network layer calls attach, detach
// and on_console_message from its own thread.
class Session final : public advice::HumanLink {
 public:
  explicit Session(std::string id = "session-0");

  // HumanLink
  void publish_state(const Frame& frame, const advice::AdviceContext& ctx, bool awaiting_advice) override;
  Action await_advice(std::uint64_t step) override;
  void finish(double total_reward) override;

  // Returns false (and leaves the current console in place) if another console is attached.
  bool attach(std::shared_ptr<ConsoleSink> console);
  void detach(const ConsoleSink* console);
  void on_console_message(const ConsoleSink* console, std::string_view text);

  // Wakes a pending await_advice with SessionDisconnected (server shutdown).
  void close();

  SessionSnapshot snapshot() const;
  std::string retained_message() const;

 private:
  void send_locked(std::string text);
  void reject_locked(std::string reason, std::optional<std::uint64_t> step);

  const std::string id_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::shared_ptr<ConsoleSink> console_;
  Phase phase_ = Phase::WaitingForConsole;
  std::string retained_;
  std::optional<Frame> last_frame_;
  std::uint64_t step_ = 0;
  int budget_remaining_ = 0;
  bool waiting_ = false;
  bool awaiting_published_ = false;  // advice may arrive before await_advice is entered
  bool console_seen_during_wait_ = false;
  bool disconnected_ = false;
  bool closed_ = false;
  std::optional<Action> slot_;
};

}  // namespace idrl::service
