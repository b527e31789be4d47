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

#include <set>

#include <gtest/gtest.h>

#include "idrl/random.hpp"

namespace idrl {
namespace {

TEST(SplitMix, MatchesPublishedReferenceStream) {
  // First outputs of the reference SplitMix64 generator seeded with 0.
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64_next(state), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64_next(state), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(splitmix64_next(state), 0x06c45d188009454fULL);
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Fnv1a, MatchesReferenceVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(DeriveSeed, IsDeterministicAndSeparatesIndexAndTag) {
  EXPECT_EQ(derive_seed(7, 3, "agent"), derive_seed(7, 3, "agent"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100; ++i) {
    seen.insert(derive_seed(7, i, "agent"));
    seen.insert(derive_seed(7, i, "env"));
    seen.insert(derive_seed(8, i, "agent"));
  }
  EXPECT_EQ(seen.size(), 300u);
}

TEST(Bounded, StaysInRangeAndCoversIt) {
  std::uint64_t state = 99;
  std::array<int, 6> hist{};
  for (int i = 0; i < 60000; ++i) {
    auto v = bounded(splitmix64_next(state), 6);
    ASSERT_LT(v, 6u);
    ++hist[v];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
  EXPECT_EQ(bounded(0, 9), 0u);
  EXPECT_EQ(bounded(~0ULL, 9), 8u);
}

}  // namespace
}  // namespace idrl
