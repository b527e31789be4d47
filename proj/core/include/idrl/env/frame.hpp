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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace idrl {

// An RGB observation. Pixels are stored as bytes; the normalized value of a
// channel is byte / 255, so every value lies in [0, 1] and byte streams
// round-trip exactly. Layout is row-major HWC ("RGBRGB...").
class Frame {
 public:
  static constexpr int kDefaultSize = 64;
  static constexpr int kChannels = 3;

  Frame() : Frame(kDefaultSize, kDefaultSize) {}
  Frame(int height, int width, std::uint8_t fill = 0);
  Frame(int height, int width, std::vector<std::uint8_t> bytes);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  static constexpr int channels() noexcept { return kChannels; }
  std::size_t size() const noexcept { return bytes_.size(); }

  std::uint8_t byte(int y, int x, int c) const noexcept { return bytes_[index(y, x, c)]; }
  void set_byte(int y, int x, int c, std::uint8_t v) noexcept { bytes_[index(y, x, c)] = v; }
  double value(int y, int x, int c) const noexcept { return byte(y, x, c) / 255.0; }

  void set_pixel(int y, int x, std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    const std::size_t i = index(y, x, 0);
    bytes_[i] = r;
    bytes_[i + 1] = g;
    bytes_[i + 2] = b;
  }

  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
  std::span<std::uint8_t> bytes() noexcept { return bytes_; }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
  }

  int height_;
  int width_;
  std::vector<std::uint8_t> bytes_;
};

// Square block average down to side x side. Identity when the size already matches.
Frame downsample(const Frame& frame, int side);

}  // namespace idrl
