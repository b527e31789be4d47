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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idrl/env/frame.hpp"

namespace idrl {

enum class Shape : std::uint8_t { Cube, Cylinder, Disk };
enum class Color : std::uint8_t { Red, Blue };
enum class Zone : std::uint8_t { Left, Center, Right };

// Network output index i corresponds to Action(i).
enum class Action : std::uint8_t { Grab = 0, MoveRight = 1, MoveLeft = 2, Drop = 3 };
inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Grab, Action::MoveRight, Action::MoveLeft, Action::Drop};

std::string_view to_string(Shape s) noexcept;
std::string_view to_string(Color c) noexcept;
std::string_view to_string(Zone z) noexcept;
std::string_view to_string(Action a) noexcept;
std::optional<Shape> parse_shape(std::string_view s) noexcept;
std::optional<Color> parse_color(std::string_view s) noexcept;
std::optional<Zone> parse_zone(std::string_view s) noexcept;
// Accepts 0..3 or the action name ("grab", "move_right", ...).
std::optional<Action> parse_action(std::string_view s) noexcept;

struct ObjectPosition {
  enum class Kind : std::uint8_t { OnTable, Carried, Placed, Removed };

  Kind kind = Kind::OnTable;
  int cell = 0;              // OnTable: grid cell 0..8
  Zone side = Zone::Left;    // Placed: Left or Right
  int slot = 0;              // Placed: arrival order on that side table

  static ObjectPosition on_table(int cell) { return {Kind::OnTable, cell, Zone::Left, 0}; }
  static ObjectPosition carried() { return {Kind::Carried, 0, Zone::Left, 0}; }
  static ObjectPosition placed(Zone side, int slot) { return {Kind::Placed, 0, side, slot}; }
  static ObjectPosition removed() { return {Kind::Removed, 0, Zone::Left, 0}; }

  friend bool operator==(const ObjectPosition&, const ObjectPosition&) = default;
};

struct ObjectSpec {
  Shape shape = Shape::Cube;
  Color color = Color::Red;
  ObjectPosition position;

  friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

struct EnvConfig {
  static constexpr int kGridSide = 3;
  static constexpr int kGridCells = kGridSide * kGridSide;
  static constexpr int kMaxObjects = 6;

  int num_objects = 6;            // first n of the shape x color enumeration
  int max_steps = 250;            // episode is cut once step_count exceeds this
  double reward_single = 0.4;
  double reward_all = 1.0;
  double reward_wrong = -1.0;
  double step_penalty = -0.01;
  Zone blue_side = Zone::Right;   // red goes to the opposite table
  double p_knock = 0.0;           // chance a correct drop knocks a table object off

  // Steps after which the per-step penalty applies: the oracle's episode length.
  int penalty_after() const noexcept { return 3 * num_objects; }
  Zone correct_side(Color c) const noexcept;
  void validate() const;
};

struct EnvState {
  std::vector<ObjectSpec> objects;
  Zone arm_zone = Zone::Center;
  int step_count = 0;
  bool episode_done = false;
  std::uint64_t rng_seed = 0;    // seed the episode was reset with
  std::uint64_t rng_state = 0;   // SplitMix64 stream driving Grab / knock-off draws

  std::optional<std::size_t> carried_index() const noexcept;
  int count_on_table() const noexcept;
  int count_placed() const noexcept;
  int count_placed_on(Zone side) const noexcept;

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

struct StepResult {
  EnvState state;
  double reward = 0.0;
  bool terminal = false;   // task finished or an object was misplaced
  bool truncated = false;  // cut by the step cap, not a true terminal
};

// Six objects (one per shape x color pair for the default config) on
// distinct cells of the 3x3 grid, arm at the center, grip empty.
EnvState reset(std::uint64_t seed, const EnvConfig& config = {});

// Throws ContractViolation when `state.episode_done`.
StepResult step(const EnvState& state, Action action, const EnvConfig& config = {});

// Scripted optimal policy: grab, carry to the object's side, drop.
Action oracle_action(const EnvState& state, const EnvConfig& config = {});

// Owns a config and the current episode; resamples the layout on each reset
// from a per-run seed.
class Environment {
 public:
  explicit Environment(std::uint64_t run_seed, EnvConfig config = {});

  const EnvState& reset();
  StepResult step(Action action);

  const EnvState& state() const noexcept { return state_; }
  const EnvConfig& config() const noexcept { return config_; }
  std::uint64_t episodes_started() const noexcept { return episodes_; }
  Frame observe() const;

  // Restores a previously captured episode (used when resuming).
  void restore(const EnvState& state, std::uint64_t episodes_started);

 private:
  EnvConfig config_;
  std::uint64_t run_seed_;
  std::uint64_t episodes_ = 0;
  EnvState state_;
};

}  // namespace idrl
