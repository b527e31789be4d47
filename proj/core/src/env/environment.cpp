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

#include "idrl/env/environment.hpp"

#include <algorithm>
#include <numeric>

#include "idrl/env/render.hpp"
#include "idrl/errors.hpp"
#include "idrl/random.hpp"

namespace idrl {

std::string_view to_string(Shape s) noexcept {
  switch (s) {
    case Shape::Cube: return "cube";
    case Shape::Cylinder: return "cylinder";
    case Shape::Disk: return "disk";
  }
  return "?";
}

std::string_view to_string(Color c) noexcept {
  return c == Color::Red ? "red" : "blue";
}

std::string_view to_string(Zone z) noexcept {
  switch (z) {
    case Zone::Left: return "left";
    case Zone::Center: return "center";
    case Zone::Right: return "right";
  }
  return "?";
}

std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::Grab: return "grab";
    case Action::MoveRight: return "move_right";
    case Action::MoveLeft: return "move_left";
    case Action::Drop: return "drop";
  }
  return "?";
}

std::optional<Shape> parse_shape(std::string_view s) noexcept {
  for (Shape v : {Shape::Cube, Shape::Cylinder, Shape::Disk}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

std::optional<Color> parse_color(std::string_view s) noexcept {
  for (Color v : {Color::Red, Color::Blue}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

std::optional<Zone> parse_zone(std::string_view s) noexcept {
  for (Zone v : {Zone::Left, Zone::Center, Zone::Right}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

std::optional<Action> parse_action(std::string_view s) noexcept {
  if (s.size() == 1 && s[0] >= '0' && s[0] <= '3') {
    return static_cast<Action>(s[0] - '0');
  }
  for (Action a : kAllActions) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

Zone EnvConfig::correct_side(Color c) const noexcept {
  const Zone other = blue_side == Zone::Right ? Zone::Left : Zone::Right;
  return c == Color::Blue ? blue_side : other;
}

void EnvConfig::validate() const {
  if (num_objects < 1 || num_objects > kMaxObjects) {
    throw ContractViolation("num_objects must be in 1..6");
  }
  if (max_steps < 1) throw ContractViolation("max_steps must be positive");
  if (blue_side == Zone::Center) throw ContractViolation("blue_side must be a side table");
  if (!(p_knock >= 0.0 && p_knock <= 1.0)) throw ContractViolation("p_knock must be in [0,1]");
}

std::optional<std::size_t> EnvState::carried_index() const noexcept {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].position.kind == ObjectPosition::Kind::Carried) return i;
  }
  return std::nullopt;
}

int EnvState::count_on_table() const noexcept {
  return static_cast<int>(std::count_if(objects.begin(), objects.end(), [](const ObjectSpec& o) {
    return o.position.kind == ObjectPosition::Kind::OnTable;
  }));
}

int EnvState::count_placed() const noexcept {
  return static_cast<int>(std::count_if(objects.begin(), objects.end(), [](const ObjectSpec& o) {
    return o.position.kind == ObjectPosition::Kind::Placed;
  }));
}

int EnvState::count_placed_on(Zone side) const noexcept {
  return static_cast<int>(std::count_if(objects.begin(), objects.end(), [side](const ObjectSpec& o) {
    return o.position.kind == ObjectPosition::Kind::Placed && o.position.side == side;
  }));
}

namespace {

double unit_draw(std::uint64_t& rng_state) noexcept {
  return static_cast<double>(splitmix64_next(rng_state) >> 11) * 0x1.0p-53;
}

// Picks uniformly among the objects still on the center table.
std::size_t random_table_object(const EnvState& s, std::uint64_t& rng_state) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    if (s.objects[i].position.kind == ObjectPosition::Kind::OnTable) candidates.push_back(i);
  }
  return candidates[bounded(splitmix64_next(rng_state), candidates.size())];
}

}  // namespace

EnvState reset(std::uint64_t seed, const EnvConfig& config) {
  config.validate();
  EnvState s;
  s.rng_seed = seed;
  s.rng_state = splitmix64(seed);

  // Partial Fisher-Yates over the nine cells.
  std::array<int, EnvConfig::kGridCells> cells{};
  std::iota(cells.begin(), cells.end(), 0);
  for (int i = 0; i < config.num_objects; ++i) {
    const auto j = i + static_cast<int>(bounded(splitmix64_next(s.rng_state),
                                                EnvConfig::kGridCells - i));
    std::swap(cells[i], cells[j]);
  }

  static constexpr std::array<Shape, 3> kShapes = {Shape::Cube, Shape::Cylinder, Shape::Disk};
  for (int i = 0; i < config.num_objects; ++i) {
    ObjectSpec o;
    o.shape = kShapes[i / 2];
    o.color = (i % 2 == 0) ? Color::Red : Color::Blue;
    o.position = ObjectPosition::on_table(cells[i]);
    s.objects.push_back(o);
  }
  return s;
}

StepResult step(const EnvState& state, Action action, const EnvConfig& config) {
  if (state.episode_done) {
    throw ContractViolation("step() called on a finished episode");
  }
  StepResult out{state, 0.0, false, false};
  EnvState& s = out.state;
  const auto carried = s.carried_index();

  switch (action) {
    case Action::Grab:
      if (!carried && s.count_on_table() > 0) {
        const std::size_t pick = random_table_object(s, s.rng_state);
        s.objects[pick].position = ObjectPosition::carried();
        s.arm_zone = Zone::Center;  // the arm travels to the center table to pick
      }
      break;
    case Action::MoveRight:
      if (s.arm_zone == Zone::Left) s.arm_zone = Zone::Center;
      else if (s.arm_zone == Zone::Center) s.arm_zone = Zone::Right;
      break;
    case Action::MoveLeft:
      if (s.arm_zone == Zone::Right) s.arm_zone = Zone::Center;
      else if (s.arm_zone == Zone::Center) s.arm_zone = Zone::Left;
      break;
    case Action::Drop:
      if (carried && s.arm_zone != Zone::Center) {
        ObjectSpec& obj = s.objects[*carried];
        const Zone side = s.arm_zone;
        obj.position = ObjectPosition::placed(side, s.count_placed_on(side));
        if (config.correct_side(obj.color) != side) {
          out.reward = config.reward_wrong;
          out.terminal = true;
        } else {
          if (config.p_knock > 0.0 && s.count_on_table() > 0 &&
              unit_draw(s.rng_state) < config.p_knock) {
            s.objects[random_table_object(s, s.rng_state)].position = ObjectPosition::removed();
          }
          if (s.count_on_table() == 0) {
            out.reward = config.reward_all;
            out.terminal = true;
          } else {
            out.reward = config.reward_single;
          }
        }
      }
      break;
  }

  s.step_count += 1;
  if (s.step_count > config.penalty_after()) out.reward += config.step_penalty;
  out.truncated = !out.terminal && s.step_count > config.max_steps;
  s.episode_done = out.terminal || out.truncated;
  return out;
}

Action oracle_action(const EnvState& state, const EnvConfig& config) {
  const auto carried = state.carried_index();
  if (!carried) return Action::Grab;
  const Zone target = config.correct_side(state.objects[*carried].color);
  if (state.arm_zone == target) return Action::Drop;
  // Zones are a line Left - Center - Right.
  return target == Zone::Right ? Action::MoveRight : Action::MoveLeft;
}

Environment::Environment(std::uint64_t run_seed, EnvConfig config)
    : config_(config), run_seed_(run_seed) {
  config_.validate();
  state_ = idrl::reset(derive_seed(run_seed_, 0, "episode"), config_);
  state_.episode_done = true;  // nothing started yet
}

const EnvState& Environment::reset() {
  state_ = idrl::reset(derive_seed(run_seed_, episodes_, "episode"), config_);
  ++episodes_;
  return state_;
}

StepResult Environment::step(Action action) {
  StepResult r = idrl::step(state_, action, config_);
  state_ = r.state;
  return r;
}

Frame Environment::observe() const { return render(state_); }

void Environment::restore(const EnvState& state, std::uint64_t episodes_started) {
  state_ = state;
  episodes_ = episodes_started;
}

}  // namespace idrl
