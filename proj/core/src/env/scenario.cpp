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

#include "idrl/env/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "idrl/errors.hpp"

namespace idrl {

namespace {

[[noreturn]] void fail(int line_no, const std::string& msg) {
  throw FormatError("scenario line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

EnvState parse_scenario(std::istream& in) {
  EnvState s;
  std::set<int> used_cells;
  int carried = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string head;
    if (!(words >> head)) continue;

    if (head == "arm") {
      std::string zone;
      words >> zone;
      auto z = parse_zone(zone);
      if (!z) fail(line_no, "unknown zone '" + zone + "'");
      s.arm_zone = *z;
      continue;
    }
    if (head == "steps") {
      if (!(words >> s.step_count) || s.step_count < 0) fail(line_no, "bad step count");
      continue;
    }

    auto shape = parse_shape(head);
    if (!shape) fail(line_no, "unknown shape '" + head + "'");
    std::string color_word, where;
    words >> color_word >> where;
    auto color = parse_color(color_word);
    if (!color) fail(line_no, "unknown color '" + color_word + "'");

    ObjectSpec o{*shape, *color, {}};
    if (where == "carried") {
      if (++carried > 1) fail(line_no, "more than one carried object");
      o.position = ObjectPosition::carried();
    } else if (where == "placed") {
      std::string side_word;
      words >> side_word;
      auto side = parse_zone(side_word);
      if (!side || *side == Zone::Center) fail(line_no, "placed side must be left or right");
      o.position = ObjectPosition::placed(*side, s.count_placed_on(*side));
    } else {
      int cell = -1;
      try {
        cell = std::stoi(where);
      } catch (const std::exception&) {
        fail(line_no, "expected a cell index, 'carried' or 'placed'");
      }
      if (cell < 0 || cell >= EnvConfig::kGridCells) fail(line_no, "cell out of range");
      if (!used_cells.insert(cell).second) fail(line_no, "cell already occupied");
      o.position = ObjectPosition::on_table(cell);
    }
    s.objects.push_back(o);
  }
  return s;
}

EnvState load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file " + path.string());
  return parse_scenario(in);
}

std::string format_scenario(const EnvState& state) {
  std::ostringstream out;
  for (const ObjectSpec& o : state.objects) {
    out << to_string(o.shape) << ' ' << to_string(o.color) << ' ';
    switch (o.position.kind) {
      case ObjectPosition::Kind::OnTable: out << o.position.cell; break;
      case ObjectPosition::Kind::Carried: out << "carried"; break;
      case ObjectPosition::Kind::Placed: out << "placed " << to_string(o.position.side); break;
      case ObjectPosition::Kind::Removed: out << "# removed"; break;
    }
    out << '\n';
  }
  out << "arm " << to_string(state.arm_zone) << '\n';
  if (state.step_count > 0) out << "steps " << state.step_count << '\n';
  return out.str();
}

}  // namespace idrl
