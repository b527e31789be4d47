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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "idrl/env/frame.hpp"

namespace idrl::service {

std::string base64_encode(std::string_view bytes);
// Throws FormatError on malformed input.
std::string base64_decode(std::string_view text);

std::string encode_frame(const Frame& frame);
Frame decode_frame(std::string_view base64, int width, int height);

struct StateMessage {
  std::uint64_t step = 0;
  std::uint64_t episode = 0;
  int budget_remaining = 0;
  double last_reward = 0.0;
  double cumulative_reward = 0.0;
  bool awaiting_advice = false;
  int width = 64;
  int height = 64;
  std::string frame;  // base64 of width*height*3 bytes, row-major RGB
};

struct AdviceMessage {
  std::uint64_t step = 0;
  int action = 0;
};

struct RejectMessage {
  std::string reason;
  std::optional<std::uint64_t> step;
};

struct DoneMessage {
  double r_total = 0.0;
};

using Message = std::variant<StateMessage, AdviceMessage, RejectMessage, DoneMessage>;

// One JSON object per websocket text frame, discriminated by "type".
std::string serialize(const Message& m);
// Throws FormatError for invalid JSON, unknown types or missing fields.
Message parse_message(std::string_view text);

}  // namespace idrl::service
