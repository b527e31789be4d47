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
#include <optional>
#include <string>

#include "idrl/nn/network.hpp"

namespace idrl::nn {

// Binary parameter checkpoint, little-endian:
//
//   "IDRLQNET"  8 bytes magic
//   u32         format version (1)
//   u32 + bytes architecture string (NetworkConfig::architecture())
//   u32         tensor count
//   per tensor: u32 + bytes name, u32 rank, rank x u32 dims, f64 x count values
//
// Values are stored as f64 regardless of the in-memory scalar type.
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void save_checkpoint(const BasicQNetwork<T>& net, const std::filesystem::path& path);

// Rebuilds the network described by the file. When `expected_architecture`
// is given the stored string must equal it, otherwise FormatError.
template <typename T>
BasicQNetwork<T> load_checkpoint(const std::filesystem::path& path,
                                 const std::optional<std::string>& expected_architecture = std::nullopt);

}  // namespace idrl::nn
