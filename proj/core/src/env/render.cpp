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

#include "idrl/env/render.hpp"

#include <algorithm>

namespace idrl {

namespace render_layout {
int zone_center_x(Zone z) noexcept {
  switch (z) {
    case Zone::Left: return 8;
    case Zone::Center: return 32;
    case Zone::Right: return 56;
  }
  return 32;
}
}  // namespace render_layout

namespace {

using namespace render_layout;

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr Rgb kRed{255, 0, 0};
constexpr Rgb kBlue{0, 0, 255};
constexpr Rgb kWhite{255, 255, 255};

void fill_rect(Frame& f, int top, int left, int h, int w, Rgb c) {
  for (int y = std::max(top, 0); y < std::min(top + h, f.height()); ++y) {
    for (int x = std::max(left, 0); x < std::min(left + w, f.width()); ++x) {
      f.set_pixel(y, x, c.r, c.g, c.b);
    }
  }
}

// Draws `shape` inside the box [top, top+size) x [left, left+size).
// Pixel centers are tested against the circle radii, integer arithmetic on a
// doubled grid so results do not depend on floating rounding.
void draw_shape(Frame& f, int top, int left, int size, Shape shape, Color color) {
  const Rgb c = color == Color::Red ? kRed : kBlue;
  if (shape == Shape::Cube) {
    fill_rect(f, top, left, size, size, c);
    return;
  }
  // Doubled coordinates: pixel center (2x+1), box center (2*left + size).
  const int cx2 = 2 * left + size;
  const int cy2 = 2 * top + size;
  const int outer2 = size * size;                            // (2r)^2 with r = size/2
  const int inner2 = shape == Shape::Disk ? (size * size) / 4 : -1;  // r_in = size/4
  for (int y = top; y < top + size; ++y) {
    for (int x = left; x < left + size; ++x) {
      const int dx = 2 * x + 1 - cx2;
      const int dy = 2 * y + 1 - cy2;
      const int d2 = dx * dx + dy * dy;
      if (d2 <= outer2 && d2 > inner2 && y >= 0 && y < f.height() && x >= 0 && x < f.width()) {
        f.set_pixel(y, x, c.r, c.g, c.b);
      }
    }
  }
}

}  // namespace

Frame render(const EnvState& state) {
  Frame f(kSize, kSize, kBackground);

  for (const ObjectSpec& o : state.objects) {
    const ObjectPosition& p = o.position;
    switch (p.kind) {
      case ObjectPosition::Kind::OnTable: {
        const int row = p.cell / EnvConfig::kGridSide;
        const int col = p.cell % EnvConfig::kGridSide;
        draw_shape(f, kGridTop + row * kCellSize + 1, kGridLeft + col * kCellSize + 1,
                   kCellSize - 2, o.shape, o.color);
        break;
      }
      case ObjectPosition::Kind::Placed: {
        const int band_left = p.side == Zone::Left ? 0 : kSize - kBandWidth;
        const int slot_row = p.slot / 2;
        const int slot_col = p.slot % 2;
        draw_shape(f, kSlotTop + slot_row * (kSlotSize + 2), band_left + slot_col * kSlotSize,
                   kSlotSize - 1, o.shape, o.color);
        break;
      }
      case ObjectPosition::Kind::Carried: {
        const int cx = zone_center_x(state.arm_zone);
        draw_shape(f, kCarryTop, cx - kSlotSize / 2, kSlotSize, o.shape, o.color);
        break;
      }
      case ObjectPosition::Kind::Removed:
        break;
    }
  }

  const int cx = zone_center_x(state.arm_zone);
  fill_rect(f, kMarkerTop, cx - kMarkerSize / 2, kMarkerSize, kMarkerSize, kWhite);
  return f;
}

}  // namespace idrl
