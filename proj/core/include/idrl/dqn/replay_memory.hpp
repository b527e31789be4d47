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
#include <deque>
#include <filesystem>
#include <memory>
#include <vector>

#include "idrl/env/environment.hpp"
#include "idrl/env/frame.hpp"
#include "idrl/random.hpp"

namespace idrl::dqn {

// <s_t, a_t, r_t, s_{t+1}> plus the terminal flag. Frames are shared so that
// consecutive transitions reference the same observation once.
struct Transition {
  std::shared_ptr<const Frame> state;
  Action action = Action::Grab;
  double reward = 0.0;
  std::shared_ptr<const Frame> next_state;
  bool terminal = false;
};

// Bounded FIFO experience memory; pushing into a full memory evicts the
// oldest transition.
class ReplayMemory {
 public:
  static constexpr std::size_t kDefaultCapacity = 50'000;

  explicit ReplayMemory(std::size_t capacity = kDefaultCapacity);

  void push(Transition t);
  std::size_t size() const noexcept { return buffer_.size(); }
  bool empty() const noexcept { return buffer_.empty(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const Transition& operator[](std::size_t i) const { return buffer_[i]; }
  const Transition& at(std::size_t i) const { return buffer_.at(i); }

  auto begin() const noexcept { return buffer_.begin(); }
  auto end() const noexcept { return buffer_.end(); }

 private:
  std::size_t capacity_;
  std::deque<Transition> buffer_;
};

// n distinct indices drawn uniformly (Floyd's algorithm), returned in draw
// order. Throws ContractViolation when n > mem.size().
std::vector<std::size_t> sample_indices(const ReplayMemory& mem, std::size_t n, Rng& rng);
std::vector<Transition> sample_batch(const ReplayMemory& mem, std::size_t n, Rng& rng);

// Binary dump of a memory, frames deduplicated by identity. Used by the
// interrupted-pretraining checkpoint.
void save_memory(const ReplayMemory& mem, std::ostream& out);
ReplayMemory load_memory(std::istream& in);

}  // namespace idrl::dqn
