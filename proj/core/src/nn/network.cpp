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

#include "idrl/nn/network.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "idrl/errors.hpp"
#include "idrl/random.hpp"

namespace idrl::nn {

namespace {

template <typename T>
const std::array<T, 256>& byte_table() {
  static const std::array<T, 256> table = [] {
    std::array<T, 256> t{};
    for (int i = 0; i < 256; ++i) t[i] = static_cast<T>(i / 255.0);
    return t;
  }();
  return table;
}

}  // namespace

template <typename T>
BasicQNetwork<T>::BasicQNetwork(NetworkConfig config, std::uint64_t init_seed)
    : config_(std::move(config)) {
  config_.validate();
  build();
  initialize(init_seed);
}

template <typename T>
BasicQNetwork<T>::BasicQNetwork(const BasicQNetwork& other)
    : config_(other.config_),
      num_outputs_(other.num_outputs_),
      flatten_size_(other.flatten_size_),
      adam_m_(other.adam_m_),
      adam_v_(other.adam_v_),
      adam_step_(other.adam_step_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

template <typename T>
BasicQNetwork<T>& BasicQNetwork<T>::operator=(const BasicQNetwork& other) {
  if (this != &other) {
    BasicQNetwork copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
void BasicQNetwork<T>::build() {
  Shape3 shape{config_.input_channels, config_.input_height, config_.input_width};
  const std::size_t n = config_.layers.size();
  for (std::size_t i = 0; i < n; ++i) {
    const LayerSpec& spec = config_.layers[i];
    const bool last = i + 1 == n;
    switch (spec.kind) {
      case LayerKind::Conv:
        layers_.push_back(std::make_unique<Conv2D<T>>(shape, spec.size, spec.filters, true));
        break;
      case LayerKind::MaxPool:
        layers_.push_back(std::make_unique<MaxPool2D<T>>(shape, spec.size));
        break;
      case LayerKind::Dense:
        if (flatten_size_ == 0) flatten_size_ = shape.size();
        layers_.push_back(std::make_unique<Dense<T>>(shape, spec.size, !last));
        break;
    }
    shape = layers_.back()->output_shape();
  }
  num_outputs_ = static_cast<int>(shape.size());
  if (config_ == NetworkConfig::standard(config_.head) && flatten_size_ != 8 * 8 * 16) {
    throw ContractViolation("standard network must flatten to 8x8x16");
  }
}

template <typename T>
void BasicQNetwork<T>::initialize(std::uint64_t seed) {
  // He-style uniform: U(-sqrt(6 / fan_in), +sqrt(6 / fan_in)); biases start at zero.
  Rng rng(seed);
  for (auto& layer : layers_) {
    auto ps = layer->params();
    if (ps.empty()) continue;
    Param<T>& w = ps[0];
    std::size_t fan_in = 1;
    for (std::size_t d = 1; d < w.dims.size(); ++d) fan_in *= static_cast<std::size_t>(w.dims[d]);
    if (layer->kind() == LayerKind::Dense) fan_in = static_cast<std::size_t>(w.dims[0]);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (T& v : w.value) v = static_cast<T>(dist(rng));
  }
  adam_m_.clear();
  adam_v_.clear();
  adam_step_ = 0;
}

template <typename T>
std::vector<T> BasicQNetwork<T>::encode_input(const Frame& frame) const {
  if (frame.height() != config_.input_height || frame.width() != config_.input_width ||
      Frame::channels() != config_.input_channels) {
    throw ContractViolation("input frame is " + std::to_string(frame.height()) + "x" +
                            std::to_string(frame.width()) + ", network expects " +
                            std::to_string(config_.input_height) + "x" +
                            std::to_string(config_.input_width));
  }
  const auto& table = byte_table<T>();
  const int H = frame.height(), W = frame.width(), C = Frame::channels();
  std::vector<T> out(static_cast<std::size_t>(C) * H * W);
  const auto bytes = frame.bytes();
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      for (int c = 0; c < C; ++c) {
        out[(static_cast<std::size_t>(c) * H + y) * W + x] =
            table[bytes[(static_cast<std::size_t>(y) * W + x) * C + c]];
      }
    }
  }
  return out;
}

template <typename T>
void BasicQNetwork<T>::run_layers(std::span<const T> input, std::vector<std::vector<T>>& acts) const {
  const Shape3 in_shape{config_.input_channels, config_.input_height, config_.input_width};
  if (input.size() != in_shape.size()) {
    throw ContractViolation("encoded input has wrong size");
  }
  acts.resize(layers_.size() + 1);
  acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    acts[l + 1].resize(layers_[l]->output_shape().size());
    layers_[l]->forward(acts[l], acts[l + 1]);
  }
}

template <typename T>
void BasicQNetwork<T>::head(std::span<const T> logits, Output& out) const {
  out.assign(logits.begin(), logits.end());
  if (config_.head == Head::Linear) return;
  const T mx = *std::max_element(out.begin(), out.end());
  T sum = 0;
  for (T& v : out) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (T& v : out) v /= sum;
}

template <typename T>
auto BasicQNetwork<T>::predict(const Frame& frame) const -> Output {
  return predict_encoded(encode_input(frame));
}

template <typename T>
auto BasicQNetwork<T>::predict_encoded(std::span<const T> input) const -> Output {
  thread_local std::vector<std::vector<T>> acts;
  run_layers(input, acts);
  Output out;
  head(acts.back(), out);
  return out;
}

template <typename T>
auto BasicQNetwork<T>::forward(std::span<const Frame> frames) -> std::vector<Output> {
  std::vector<std::vector<T>> inputs;
  inputs.reserve(frames.size());
  for (const Frame& f : frames) inputs.push_back(encode_input(f));
  return forward_encoded(inputs);
}

template <typename T>
auto BasicQNetwork<T>::forward_encoded(std::span<const std::vector<T>> inputs) -> std::vector<Output> {
  if (cache_.size() < inputs.size()) cache_.resize(inputs.size());
  cached_outputs_.resize(inputs.size());
  cached_count_ = inputs.size();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    run_layers(inputs[i], cache_[i]);
    head(cache_[i].back(), cached_outputs_[i]);
  }
  return {cached_outputs_.begin(), cached_outputs_.begin() + static_cast<std::ptrdiff_t>(inputs.size())};
}

template <typename T>
void BasicQNetwork<T>::backward(std::span<const Output> output_grads) {
  if (output_grads.size() != cached_count_) {
    throw ContractViolation("backward() needs one output gradient per cached sample");
  }
  std::vector<T> grad, below;
  for (std::size_t i = 0; i < cached_count_; ++i) {
    const Output& q = cached_outputs_[i];
    const Output& g = output_grads[i];
    if (g.size() != q.size()) throw ContractViolation("output gradient has wrong length");

    grad.assign(g.begin(), g.end());
    if (config_.head == Head::Softmax) {
      // d logit_k = q_k * (g_k - sum_j q_j g_j)
      T dot = 0;
      for (std::size_t k = 0; k < q.size(); ++k) dot += q[k] * g[k];
      for (std::size_t k = 0; k < q.size(); ++k) grad[k] = q[k] * (g[k] - dot);
    }

    auto& acts = cache_[i];
    for (std::size_t l = layers_.size(); l-- > 0;) {
      if (l > 0) {
        below.assign(acts[l].size(), T(0));
        layers_[l]->backward(acts[l], acts[l + 1], grad, below);
        grad.swap(below);
      } else {
        layers_[l]->backward(acts[l], acts[l + 1], grad, {});
      }
    }
  }
}

template <typename T>
void BasicQNetwork<T>::zero_grad() noexcept {
  for (auto& layer : layers_) {
    for (Param<T>& p : layer->params()) std::fill(p.grad.begin(), p.grad.end(), T(0));
  }
}

template <typename T>
std::vector<std::uint32_t> BasicQNetwork<T>::activation_pattern() const {
  std::vector<std::uint32_t> pattern;
  for (std::size_t i = 0; i < cached_count_; ++i) {
    const auto& acts = cache_[i];
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      if (layers_[l]->rectified()) {
        std::uint32_t word = 0;
        int bit = 0;
        for (T v : acts[l + 1]) {
          word |= static_cast<std::uint32_t>(v > T(0)) << bit;
          if (++bit == 32) {
            pattern.push_back(word);
            word = 0;
            bit = 0;
          }
        }
        pattern.push_back(word);
      } else if (layers_[l]->kind() == LayerKind::MaxPool) {
        const auto& pool = static_cast<const MaxPool2D<T>&>(*layers_[l]);
        for (std::size_t o = 0; o < acts[l + 1].size(); ++o) {
          pattern.push_back(static_cast<std::uint32_t>(pool.argmax(acts[l], o)));
        }
      }
    }
  }
  return pattern;
}

template <typename T>
std::vector<Param<T>*> BasicQNetwork<T>::parameters() {
  std::vector<Param<T>*> out;
  for (auto& layer : layers_) {
    for (Param<T>& p : layer->params()) out.push_back(&p);
  }
  return out;
}

template <typename T>
std::vector<const Param<T>*> BasicQNetwork<T>::parameters() const {
  std::vector<const Param<T>*> out;
  for (const auto& layer : layers_) {
    for (const Param<T>& p : std::as_const(*layer).params()) out.push_back(&p);
  }
  return out;
}

template <typename T>
std::size_t BasicQNetwork<T>::parameter_count() const {
  std::size_t n = 0;
  for (const Param<T>* p : parameters()) n += p->value.size();
  return n;
}

template <typename T>
void BasicQNetwork<T>::apply_gradients(const TrainConfig& cfg) {
  auto params = parameters();
  if (cfg.optimizer == OptimizerKind::Sgd) {
    const T lr = static_cast<T>(cfg.learning_rate);
    for (Param<T>* p : params) {
      for (std::size_t k = 0; k < p->value.size(); ++k) p->value[k] -= lr * p->grad[k];
    }
    ++adam_step_;
    return;
  }

  if (adam_m_.size() != params.size()) {
    adam_m_.assign(params.size(), {});
    adam_v_.assign(params.size(), {});
    for (std::size_t i = 0; i < params.size(); ++i) {
      adam_m_[i].assign(params[i]->value.size(), T(0));
      adam_v_[i].assign(params[i]->value.size(), T(0));
    }
  }
  ++adam_step_;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(adam_step_));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(adam_step_));
  // lr_t = lr * sqrt(1 - b2^t) / (1 - b1^t), epsilon scaled to match the
  // textbook m_hat / (sqrt(v_hat) + eps) form.
  const T step = static_cast<T>(cfg.learning_rate * std::sqrt(corr2) / corr1);
  const T eps = static_cast<T>(cfg.adam_epsilon * std::sqrt(corr2));
  const T tb1 = static_cast<T>(b1), tb2 = static_cast<T>(b2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    T* __restrict v = params[i]->value.data();
    const T* __restrict g = params[i]->grad.data();
    T* __restrict m1 = adam_m_[i].data();
    T* __restrict m2 = adam_v_[i].data();
    const std::size_t n = params[i]->value.size();
    for (std::size_t k = 0; k < n; ++k) {
      m1[k] = tb1 * m1[k] + (T(1) - tb1) * g[k];
      m2[k] = tb2 * m2[k] + (T(1) - tb2) * g[k] * g[k];
      v[k] -= step * m1[k] / (std::sqrt(m2[k]) + eps);
    }
  }
}

template <typename T>
void BasicQNetwork<T>::copy_parameters_from(const BasicQNetwork& other) {
  if (other.config_ != config_) throw ContractViolation("architecture mismatch in parameter copy");
  auto dst = parameters();
  auto src = other.parameters();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i]->value = src[i]->value;
}

template <typename T>
double train_batch(BasicQNetwork<T>& net, std::span<const Frame> frames, std::span<const int> actions,
                   std::span<const double> targets, const TrainConfig& cfg) {
  if (frames.size() != actions.size() || frames.size() != targets.size()) {
    throw ContractViolation("train_batch: frames, actions and targets differ in length");
  }
  if (frames.empty()) throw ContractViolation("train_batch: empty batch");
  for (int a : actions) {
    if (a < 0 || a >= net.num_outputs()) throw ContractViolation("train_batch: action out of range");
  }

  const auto q = net.forward(frames);
  const double n = static_cast<double>(frames.size());
  double loss = 0.0;
  std::vector<typename BasicQNetwork<T>::Output> grads(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const double err = static_cast<double>(q[i][actions[i]]) - targets[i];
    loss += err * err;
    grads[i].assign(q[i].size(), T(0));
    grads[i][actions[i]] = static_cast<T>(2.0 * err / n);
  }
  loss /= n;
  if (!std::isfinite(loss)) throw DivergenceError("non-finite training loss");

  net.zero_grad();
  net.backward(grads);
  net.apply_gradients(cfg);
  return loss;
}

template class BasicQNetwork<float>;
template class BasicQNetwork<double>;
template double train_batch(BasicQNetwork<float>&, std::span<const Frame>, std::span<const int>,
                            std::span<const double>, const TrainConfig&);
template double train_batch(BasicQNetwork<double>&, std::span<const Frame>, std::span<const int>,
                            std::span<const double>, const TrainConfig&);

}  // namespace idrl::nn
