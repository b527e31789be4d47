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
#include <string>
#include <string_view>
#include <vector>

namespace idrl::nn {

struct Shape3 {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(channels) * height * width;
  }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

enum class LayerKind { Conv, MaxPool, Dense };

struct LayerSpec {
  LayerKind kind = LayerKind::Dense;
  int size = 0;  // conv: kernel side; pool: window side; dense: units
  int filters = 0;  // conv only

  static LayerSpec conv(int kernel, int filters) { return {LayerKind::Conv, kernel, filters}; }
  static LayerSpec pool(int window) { return {LayerKind::MaxPool, window, 0}; }
  static LayerSpec dense(int units) { return {LayerKind::Dense, units, 0}; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

enum class Head { Softmax, Linear };

// A feed-forward stack. Convolutions are stride 1 with zero "same" padding
// (for even kernels the extra row/column goes after), each followed by ReLU.
// Pools are non-overlapping (stride = window). Every dense layer but the last
// is followed by ReLU; the last one feeds the head and must have one unit per
// action.
struct NetworkConfig {
  int input_height = 64;
  int input_width = 64;
  int input_channels = 3;
  std::vector<LayerSpec> layers;
  Head head = Head::Softmax;

  // 64x64x3 -> conv8x4 -> pool2 -> conv4x8 -> pool2 -> conv2x16 -> pool2
  //         -> flatten(1024) -> dense256 -> dense4 -> softmax
  static NetworkConfig standard(Head head = Head::Softmax);
  // Same layer pattern on a smaller input with a narrower hidden layer.
  static NetworkConfig reduced(int input_side, int hidden = 32, Head head = Head::Softmax);

  int num_outputs() const;
  // Canonical text form, e.g. "in64x64x3/conv8x4/pool2/.../dense4/softmax".
  std::string architecture() const;
  static NetworkConfig parse_architecture(std::string_view arch);
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

enum class OptimizerKind { Adam, Sgd };

// Hyper-parameters of one learning run. Defaults match the published setup.
struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 128;
  double gamma = 0.9;
  double epsilon_decay = 0.9995;
  double epsilon_init = 1.0;
  int episodes = 300;

  OptimizerKind optimizer = OptimizerKind::Adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  // 0 disables the frozen target network (targets use the online network).
  int target_sync_interval = 0;

  void validate() const;
};

std::string_view to_string(OptimizerKind k) noexcept;
std::string_view to_string(Head h) noexcept;

}  // namespace idrl::nn
