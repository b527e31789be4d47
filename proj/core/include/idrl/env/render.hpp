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

#include "idrl/env/environment.hpp"
#include "idrl/env/frame.hpp"

namespace idrl {

// Procedural camera view of the workspace, 64x64 RGB.
//
//   columns  0..15   left side table (placed objects in 2x3 slots)
//   columns 16..47   center table, 3x3 grid of 10 px cells starting at (24, 17)
//   columns 48..63   right side table
//   rows      2..5   arm marker (4x4 white) above its zone
//   rows     8..15   carried object, directly below the marker
//
// Cubes are filled squares, cylinders filled discs, disks annuli. Colors are
// saturated red / blue on a mid-gray (128) background.
Frame render(const EnvState& state);

namespace render_layout {
inline constexpr int kSize = 64;
inline constexpr int kBandWidth = 16;
inline constexpr int kCellSize = 10;
inline constexpr int kGridTop = 24;
inline constexpr int kGridLeft = 17;
inline constexpr int kSlotSize = 8;
inline constexpr int kSlotTop = 24;
inline constexpr int kMarkerTop = 2;
inline constexpr int kMarkerSize = 4;
inline constexpr int kCarryTop = 8;
inline constexpr std::uint8_t kBackground = 128;

// Center column of each zone's marker.
int zone_center_x(Zone z) noexcept;
}  // namespace render_layout

}  // namespace idrl
