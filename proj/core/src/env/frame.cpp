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

#include "idrl/env/frame.hpp"

#include <string>

#include "idrl/errors.hpp"

namespace idrl {

Frame::Frame(int height, int width, std::uint8_t fill)
    : height_(height), width_(width) {
  if (height <= 0 || width <= 0) {
    throw ContractViolation("frame dimensions must be positive");
  }
  bytes_.assign(static_cast<std::size_t>(height) * width * kChannels, fill);
}

Frame::Frame(int height, int width, std::vector<std::uint8_t> bytes)
    : height_(height), width_(width), bytes_(std::move(bytes)) {
  if (height <= 0 || width <= 0) {
    throw ContractViolation("frame dimensions must be positive");
  }
  const auto expected = static_cast<std::size_t>(height) * width * kChannels;
  if (bytes_.size() != expected) {
    throw ContractViolation("frame byte count " + std::to_string(bytes_.size()) +
                            " does not match " + std::to_string(height) + "x" +
                            std::to_string(width) + "x3");
  }
}

Frame downsample(const Frame& frame, int side) {
  if (side == frame.width() && side == frame.height()) return frame;
  if (side <= 0 || frame.height() != frame.width() || frame.width() % side != 0) {
    throw ContractViolation("cannot downsample frame to " + std::to_string(side));
  }
  const int f = frame.width() / side;
  const int area = f * f;
  Frame out(side, side, 0);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      for (int c = 0; c < Frame::kChannels; ++c) {
        int acc = 0;
        for (int dy = 0; dy < f; ++dy) {
          for (int dx = 0; dx < f; ++dx) acc += frame.byte(y * f + dy, x * f + dx, c);
        }
        out.set_byte(y, x, c, static_cast<std::uint8_t>((acc + area / 2) / area));
      }
    }
  }
  return out;
}

}  // namespace idrl
