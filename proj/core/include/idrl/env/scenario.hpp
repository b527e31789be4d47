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

#include <filesystem>
#include <istream>
#include <string>

#include "idrl/env/environment.hpp"

namespace idrl {

// Plain-text fixture states. One directive per line, '#' starts a comment:
//
//   <shape> <color> <cell>          object on the center grid (cell 0..8)
//   <shape> <color> carried         object in the grip
//   <shape> <color> placed <side>   object on the left/right table
//   arm <left|center|right>
//   steps <n>
//
// Example:
//   cube blue 4
//   disk red 0
//   arm center
EnvState parse_scenario(std::istream& in);
EnvState load_scenario(const std::filesystem::path& path);
std::string format_scenario(const EnvState& state);

}  // namespace idrl
