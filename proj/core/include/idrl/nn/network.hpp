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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "idrl/env/frame.hpp"
#include "idrl/nn/config.hpp"
#include "idrl/nn/layers.hpp"

namespace idrl::nn {

// Convolutional Q-value approximator built from a NetworkConfig.
//
// forward() caches every intermediate activation of the batch so that a
// following backward() can accumulate parameter gradients; predict() is the
// cache-free const path used for action selection and bootstrapped targets.
// T is float for training and double for finite-difference verification.
template <typename T>
class BasicQNetwork {
 public:
  using Output = std::vector<T>;

  BasicQNetwork(NetworkConfig config, std::uint64_t init_seed);
  BasicQNetwork(const BasicQNetwork& other);
  BasicQNetwork& operator=(const BasicQNetwork& other);
  BasicQNetwork(BasicQNetwork&&) noexcept = default;
  BasicQNetwork& operator=(BasicQNetwork&&) noexcept = default;

  const NetworkConfig& config() const noexcept { return config_; }
  std::string architecture() const { return config_.architecture(); }
  int num_outputs() const noexcept { return num_outputs_; }
  std::size_t flatten_size() const noexcept { return flatten_size_; }

  // Frame -> CHW buffer of byte / 255. Throws ContractViolation on a shape
  // mismatch with the configured input.
  std::vector<T> encode_input(const Frame& frame) const;

  Output predict(const Frame& frame) const;
  Output predict_encoded(std::span<const T> input) const;

  std::vector<Output> forward(std::span<const Frame> frames);
  std::vector<Output> forward_encoded(std::span<const std::vector<T>> inputs);

  // Accumulates into parameter gradients, one output gradient per cached
  // sample of the last forward() call.
  void backward(std::span<const Output> output_grads);
  void zero_grad() noexcept;

  // Pattern of rectifier states and pooling winners for the cached batch;
  // changes whenever an input or parameter perturbation crosses a kink.
  std::vector<std::uint32_t> activation_pattern() const;

  std::vector<Param<T>*> parameters();
  std::vector<const Param<T>*> parameters() const;
  std::size_t parameter_count() const;

  // Applies one optimizer update from the accumulated gradients.
  void apply_gradients(const TrainConfig& cfg);
  std::uint64_t optimizer_steps() const noexcept { return adam_step_; }

  // Copies parameter values (not optimizer state) from a network with the
  // same architecture.
  void copy_parameters_from(const BasicQNetwork& other);

 private:
  void build();
  void initialize(std::uint64_t seed);
  void run_layers(std::span<const T> input, std::vector<std::vector<T>>& acts) const;
  void head(std::span<const T> logits, Output& out) const;

  NetworkConfig config_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  int num_outputs_ = 0;
  std::size_t flatten_size_ = 0;

  // acts[sample][0] is the encoded input, acts[sample][l + 1] the output of layer l.
  std::vector<std::vector<std::vector<T>>> cache_;
  std::vector<Output> cached_outputs_;
  std::size_t cached_count_ = 0;

  std::vector<std::vector<T>> adam_m_;
  std::vector<std::vector<T>> adam_v_;
  std::uint64_t adam_step_ = 0;
};

using QNetwork = BasicQNetwork<float>;
using QNetworkF64 = BasicQNetwork<double>;

// Mean squared error on the taken-action outputs, backpropagation and one
// optimizer step. Returns the loss before the step. Throws ContractViolation
// on mismatched lengths and DivergenceError on a non-finite loss.
template <typename T>
double train_batch(BasicQNetwork<T>& net, std::span<const Frame> frames,
                   std::span<const int> actions, std::span<const double> targets,
                   const TrainConfig& cfg);

}  // namespace idrl::nn
