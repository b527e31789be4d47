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

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "idrl/nn/config.hpp"
#include "idrl/random.hpp"

namespace idrl::nn {

template <typename T>
struct Param {
  std::string name;
  std::vector<int> dims;
  std::vector<T> value;
  std::vector<T> grad;

  Param(std::string n, std::vector<int> d);
};

// One stage of the network. Activations are flat CHW buffers. Layers own
// their parameters but no per-call state, so forward() is const and a layer
// may be evaluated from several threads on distinct buffers.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const noexcept = 0;
  virtual Shape3 input_shape() const noexcept = 0;
  virtual Shape3 output_shape() const noexcept = 0;
  // True when the output passes through a rectifier.
  virtual bool rectified() const noexcept { return false; }

  virtual void forward(std::span<const T> in, std::span<T> out) const = 0;

  // Accumulates parameter gradients from `out_grad` (gradient w.r.t. this
  // layer's output). Writes the input gradient into `in_grad` unless it is
  // empty, in which case the input gradient is not computed.
  virtual void backward(std::span<const T> in, std::span<const T> out,
                        std::span<const T> out_grad, std::span<T> in_grad) = 0;

  virtual std::span<Param<T>> params() noexcept { return {}; }
  virtual std::span<const Param<T>> params() const noexcept { return {}; }
  virtual std::unique_ptr<Layer> clone() const = 0;
};

template <typename T>
class Conv2D final : public Layer<T> {
 public:
  Conv2D(Shape3 in, int kernel, int filters, bool relu);

  LayerKind kind() const noexcept override { return LayerKind::Conv; }
  Shape3 input_shape() const noexcept override { return in_; }
  Shape3 output_shape() const noexcept override { return {filters_, in_.height, in_.width}; }
  bool rectified() const noexcept override { return relu_; }

  void forward(std::span<const T> in, std::span<T> out) const override;
  void backward(std::span<const T> in, std::span<const T> out, std::span<const T> out_grad,
                std::span<T> in_grad) override;

  std::span<Param<T>> params() noexcept override { return params_; }
  std::span<const Param<T>> params() const noexcept override { return params_; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Conv2D>(*this); }

 private:
  int pad_before() const noexcept { return (kernel_ - 1) / 2; }
  int padded_height() const noexcept { return in_.height + kernel_ - 1; }
  int padded_width() const noexcept { return in_.width + kernel_ - 1; }
  void pad_input(std::span<const T> in, std::vector<T>& padded) const;

  Shape3 in_;
  int kernel_;
  int filters_;
  bool relu_;
  std::vector<Param<T>> params_;  // [0] weight [filters][channels][k][k], [1] bias
};

template <typename T>
class MaxPool2D final : public Layer<T> {
 public:
  MaxPool2D(Shape3 in, int window);

  LayerKind kind() const noexcept override { return LayerKind::MaxPool; }
  Shape3 input_shape() const noexcept override { return in_; }
  Shape3 output_shape() const noexcept override {
    return {in_.channels, in_.height / window_, in_.width / window_};
  }

  void forward(std::span<const T> in, std::span<T> out) const override;
  void backward(std::span<const T> in, std::span<const T> out, std::span<const T> out_grad,
                std::span<T> in_grad) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<MaxPool2D>(*this); }

  // Flat input index of the maximum feeding output element `o`
  // (first in scan order on ties).
  std::size_t argmax(std::span<const T> in, std::size_t o) const noexcept;

 private:
  Shape3 in_;
  int window_;
};

template <typename T>
class Dense final : public Layer<T> {
 public:
  Dense(Shape3 in, int units, bool relu);

  LayerKind kind() const noexcept override { return LayerKind::Dense; }
  Shape3 input_shape() const noexcept override { return in_; }
  Shape3 output_shape() const noexcept override { return {units_, 1, 1}; }
  bool rectified() const noexcept override { return relu_; }

  void forward(std::span<const T> in, std::span<T> out) const override;
  void backward(std::span<const T> in, std::span<const T> out, std::span<const T> out_grad,
                std::span<T> in_grad) override;

  std::span<Param<T>> params() noexcept override { return params_; }
  std::span<const Param<T>> params() const noexcept override { return params_; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Dense>(*this); }

 private:
  Shape3 in_;
  int units_;
  bool relu_;
  std::vector<Param<T>> params_;  // [0] weight [inputs][units], [1] bias
};

}  // namespace idrl::nn
