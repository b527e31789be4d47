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

#include "idrl/dqn/replay_memory.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "idrl/errors.hpp"

namespace idrl::dqn {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ContractViolation("replay memory capacity must be positive");
}

void ReplayMemory::push(Transition t) {
  if (!t.state || !t.next_state) throw ContractViolation("transition frames must be set");
  if (buffer_.size() == capacity_) buffer_.pop_front();
  buffer_.push_back(std::move(t));
}

std::vector<std::size_t> sample_indices(const ReplayMemory& mem, std::size_t n, Rng& rng) {
  const std::size_t total = mem.size();
  if (n > total) {
    throw ContractViolation("cannot sample " + std::to_string(n) + " transitions from " +
                            std::to_string(total));
  }
  std::vector<std::size_t> out;
  out.reserve(n);
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(n * 2);
  for (std::size_t j = total - n; j < total; ++j) {
    const std::size_t t = bounded(rng(), j + 1);
    const std::size_t pick = chosen.contains(t) ? j : t;
    chosen.insert(pick);
    out.push_back(pick);
  }
  return out;
}

std::vector<Transition> sample_batch(const ReplayMemory& mem, std::size_t n, Rng& rng) {
  std::vector<Transition> batch;
  batch.reserve(n);
  for (std::size_t i : sample_indices(mem, n, rng)) batch.push_back(mem[i]);
  return batch;
}

namespace {

template <typename V>
void put(std::ostream& out, const V& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename V>
V get(std::istream& in) {
  V v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("memory dump truncated");
  return v;
}

constexpr std::uint64_t kMemoryMagic = 0x314d454d4c524449ULL;  // "IDRLMEM1"

}  // namespace

void save_memory(const ReplayMemory& mem, std::ostream& out) {
  std::unordered_map<const Frame*, std::uint32_t> ids;
  std::vector<const Frame*> frames;
  auto id_of = [&](const std::shared_ptr<const Frame>& f) {
    auto [it, inserted] = ids.emplace(f.get(), static_cast<std::uint32_t>(frames.size()));
    if (inserted) frames.push_back(f.get());
    return it->second;
  };
  std::vector<std::array<std::uint32_t, 2>> refs;
  for (const Transition& t : mem) refs.push_back({id_of(t.state), id_of(t.next_state)});

  put(out, kMemoryMagic);
  put(out, static_cast<std::uint64_t>(mem.capacity()));
  put(out, static_cast<std::uint32_t>(frames.size()));
  for (const Frame* f : frames) {
    put(out, static_cast<std::int32_t>(f->height()));
    put(out, static_cast<std::int32_t>(f->width()));
    out.write(reinterpret_cast<const char*>(f->bytes().data()), static_cast<std::streamsize>(f->size()));
  }
  put(out, static_cast<std::uint32_t>(mem.size()));
  std::size_t i = 0;
  for (const Transition& t : mem) {
    put(out, refs[i][0]);
    put(out, static_cast<std::uint8_t>(t.action));
    put(out, t.reward);
    put(out, refs[i][1]);
    put(out, static_cast<std::uint8_t>(t.terminal));
    ++i;
  }
  if (!out) throw Error("failed writing replay memory");
}

ReplayMemory load_memory(std::istream& in) {
  if (get<std::uint64_t>(in) != kMemoryMagic) throw FormatError("not a replay memory dump");
  ReplayMemory mem(static_cast<std::size_t>(get<std::uint64_t>(in)));
  const auto n_frames = get<std::uint32_t>(in);
  std::vector<std::shared_ptr<const Frame>> frames;
  frames.reserve(n_frames);
  for (std::uint32_t k = 0; k < n_frames; ++k) {
    const auto h = get<std::int32_t>(in);
    const auto w = get<std::int32_t>(in);
    if (h <= 0 || w <= 0 || h > 4096 || w > 4096) throw FormatError("bad frame size in memory dump");
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(h) * w * 3);
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()))) {
      throw FormatError("memory dump truncated");
    }
    frames.push_back(std::make_shared<const Frame>(h, w, std::move(bytes)));
  }
  const auto n = get<std::uint32_t>(in);
  for (std::uint32_t k = 0; k < n; ++k) {
    Transition t;
    const auto s = get<std::uint32_t>(in);
    const auto a = get<std::uint8_t>(in);
    t.reward = get<double>(in);
    const auto s2 = get<std::uint32_t>(in);
    t.terminal = get<std::uint8_t>(in) != 0;
    if (s >= frames.size() || s2 >= frames.size() || a >= kNumActions) {
      throw FormatError("bad transition in memory dump");
    }
    t.state = frames[s];
    t.next_state = frames[s2];
    t.action = static_cast<Action>(a);
    mem.push(std::move(t));
  }
  return mem;
}

}  // namespace idrl::dqn
