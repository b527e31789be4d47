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
#include <random>
#include <string_view>

namespace idrl {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used both as the in-state generator of the
// environment and as the mixing function for seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Advances `state` and returns the next 64-bit output of a SplitMix64 stream.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed derivation tree: every consumer asks for a child of its parent seed
// by (index, purpose tag). Children of distinct (index, tag) pairs are
// statistically independent SplitMix64 streams.
//
//   master -> agent i       : derive_seed(master, i, "agent")
//   agent  -> env / net / … : derive_seed(agent, 0, "env"), …
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index,
                                    std::string_view tag) noexcept {
  return splitmix64(splitmix64(parent ^ fnv1a(tag)) + index);
}

// Uniform integer in [0, n) from a 64-bit draw (Lemire's multiply-shift;
// bias is below 2^-32 for the small n used here).
constexpr std::uint64_t bounded(std::uint64_t draw, std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(draw) * n) >> 64);
}

}  // namespace idrl
