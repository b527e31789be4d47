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

#include "idrl/nn/layers.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <type_traits>

#include "idrl/errors.hpp"

namespace idrl::nn {

template <typename T>
Param<T>::Param(std::string n, std::vector<int> d) : name(std::move(n)), dims(std::move(d)) {
  const auto count = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                     [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
  value.assign(count, T(0));
  grad.assign(count, T(0));
}

namespace {

template <typename T>
void check_span(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ContractViolation(std::string(what) + ": expected " + std::to_string(want) +
                            " values, got " + std::to_string(got));
  }
}

// Gradient through an optional rectifier, evaluated from the layer output.
template <typename T>
const T* rectified_grad(std::span<const T> out, std::span<const T> out_grad, bool relu,
                        std::vector<T>& scratch) {
  if (!relu) return out_grad.data();
  scratch.resize(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    scratch[i] = out[i] > T(0) ? out_grad[i] : T(0);
  }
  return scratch.data();
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv2D

template <typename T>
Conv2D<T>::Conv2D(Shape3 in, int kernel, int filters, bool relu)
    : in_(in), kernel_(kernel), filters_(filters), relu_(relu) {
  params_.emplace_back("conv" + std::to_string(kernel) + "x" + std::to_string(filters) + ".weight",
                       std::vector<int>{filters, in.channels, kernel, kernel});
  params_.emplace_back("conv" + std::to_string(kernel) + "x" + std::to_string(filters) + ".bias",
                       std::vector<int>{filters});
}

template <typename T>
void Conv2D<T>::pad_input(std::span<const T> in, std::vector<T>& padded) const {
  const int ph = padded_height(), pw = padded_width(), pb = pad_before();
  padded.assign(static_cast<std::size_t>(in_.channels) * ph * pw, T(0));
  for (int c = 0; c < in_.channels; ++c) {
    for (int y = 0; y < in_.height; ++y) {
      const T* src = in.data() + (static_cast<std::size_t>(c) * in_.height + y) * in_.width;
      T* dst = padded.data() + (static_cast<std::size_t>(c) * ph + y + pb) * pw + pb;
      std::copy(src, src + in_.width, dst);
    }
  }
}

namespace {

// out_row[x] += sum over (ci, ky, kx) of w * padded[ci][y + ky][x + kx] for
// one output row. With a compile-time width the accumulator stays in
// registers across the whole kernel.
template <typename T, int kWidth>
void conv_row(T* __restrict out_row, const T* __restrict padded, const T* __restrict weight,
              int channels, int kernel, int padded_h, int padded_w, int y, int width) {
  constexpr bool kFixed = kWidth > 0;
  const int W = kFixed ? kWidth : width;
  T acc[kFixed ? kWidth : 1];
  T* a = kFixed ? acc : out_row;
  for (int x = 0; x < W; ++x) a[x] = out_row[x];
  for (int ci = 0; ci < channels; ++ci) {
    const T* p = padded + static_cast<std::size_t>(ci) * padded_h * padded_w;
    const T* wk = weight + static_cast<std::size_t>(ci) * kernel * kernel;
    for (int ky = 0; ky < kernel; ++ky) {
      const T* prow = p + static_cast<std::size_t>(y + ky) * padded_w;
      for (int kx = 0; kx < kernel; ++kx) {
        const T wv = wk[ky * kernel + kx];
        for (int x = 0; x < W; ++x) a[x] += wv * prow[x + kx];
      }
    }
  }
  if (kFixed) {
    for (int x = 0; x < W; ++x) out_row[x] = acc[x];
  }
}

// gk[ky][kx] += sum over (y, x) of d[y][x] * padded[y + ky][x + kx]: lane-wise
// accumulation over rows, one horizontal sum per kernel tap.
template <typename T, int kWidth>
void conv_weight_grad(T* __restrict gk, const T* __restrict d, const T* __restrict p, int kernel,
                      int height, int padded_w, int width) {
  constexpr bool kFixed = kWidth > 0;
  const int W = kFixed ? kWidth : width;
  thread_local std::vector<T> dyn;
  T fixed[kFixed ? kWidth : 1];
  T* acc = fixed;
  if (!kFixed) {
    dyn.resize(static_cast<std::size_t>(W));
    acc = dyn.data();
  }
  for (int ky = 0; ky < kernel; ++ky) {
    for (int kx = 0; kx < kernel; ++kx) {
      for (int x = 0; x < W; ++x) acc[x] = T(0);
      for (int y = 0; y < height; ++y) {
        const T* __restrict prow = p + static_cast<std::size_t>(y + ky) * padded_w + kx;
        const T* __restrict drow = d + static_cast<std::size_t>(y) * W;
        for (int x = 0; x < W; ++x) acc[x] += drow[x] * prow[x];
      }
      T s = 0;
      for (int x = 0; x < W; ++x) s += acc[x];
      gk[ky * kernel + kx] += s;
    }
  }
}

template <typename F>
void dispatch_width(int width, F&& f) {
  switch (width) {
    case 64: f(std::integral_constant<int, 64>{}); break;
    case 32: f(std::integral_constant<int, 32>{}); break;
    default: f(std::integral_constant<int, 0>{}); break;
  }
}

}  // namespace

template <typename T>
void Conv2D<T>::forward(std::span<const T> in, std::span<T> out) const {
  check_span<T>(in.size(), in_.size(), "conv input");
  check_span<T>(out.size(), output_shape().size(), "conv output");
  thread_local std::vector<T> padded;
  pad_input(in, padded);

  const int H = in_.height, W = in_.width, C = in_.channels, K = kernel_;
  const int PH = padded_height(), PW = padded_width();
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  const T* weight = params_[0].value.data();
  const T* bias = params_[1].value.data();

  dispatch_width(W, [&](auto width_tag) {
    constexpr int kW = decltype(width_tag)::value;
    for (int co = 0; co < filters_; ++co) {
      T* o = out.data() + co * plane;
      std::fill(o, o + plane, bias[co]);
      const T* wco = weight + static_cast<std::size_t>(co) * C * K * K;
      if constexpr (kW > 0) {
        for (int y = 0; y < H; ++y) {
          conv_row<T, kW>(o + static_cast<std::size_t>(y) * W, padded.data(), wco, C, K, PH, PW, y, W);
        }
      } else {
        // Narrow planes: one pass over the whole output plane per kernel tap.
        for (int ci = 0; ci < C; ++ci) {
          const T* p = padded.data() + static_cast<std::size_t>(ci) * PH * PW;
          const T* wk = wco + static_cast<std::size_t>(ci) * K * K;
          for (int ky = 0; ky < K; ++ky) {
            for (int kx = 0; kx < K; ++kx) {
              const T wv = wk[ky * K + kx];
              for (int y = 0; y < H; ++y) {
                const T* __restrict prow = p + static_cast<std::size_t>(y + ky) * PW + kx;
                T* __restrict orow = o + static_cast<std::size_t>(y) * W;
                for (int x = 0; x < W; ++x) orow[x] += wv * prow[x];
              }
            }
          }
        }
      }
      if (relu_) {
        for (std::size_t i = 0; i < plane; ++i) o[i] = std::max(o[i], T(0));
      }
    }
  });
}

template <typename T>
void Conv2D<T>::backward(std::span<const T> in, std::span<const T> out, std::span<const T> out_grad,
                         std::span<T> in_grad) {
  check_span<T>(out_grad.size(), output_shape().size(), "conv output gradient");
  thread_local std::vector<T> scratch;
  thread_local std::vector<T> padded;
  const T* d = rectified_grad(out, out_grad, relu_, scratch);
  pad_input(in, padded);

  const int H = in_.height, W = in_.width, C = in_.channels, K = kernel_;
  const int PH = padded_height(), PW = padded_width();
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  T* gweight = params_[0].grad.data();
  T* gbias = params_[1].grad.data();

  dispatch_width(W, [&](auto width_tag) {
    constexpr int kW = decltype(width_tag)::value;
    for (int co = 0; co < filters_; ++co) {
      const T* dco = d + co * plane;
      T s = 0;
      for (std::size_t i = 0; i < plane; ++i) s += dco[i];
      gbias[co] += s;
      for (int ci = 0; ci < C; ++ci) {
        conv_weight_grad<T, kW>(gweight + (static_cast<std::size_t>(co) * C + ci) * K * K, dco,
                                padded.data() + static_cast<std::size_t>(ci) * PH * PW, K, H, PW, W);
      }
    }
  });

  if (in_grad.empty()) return;
  check_span<T>(in_grad.size(), in_.size(), "conv input gradient");
  // Input gradient is a full correlation of the output gradient with the
  // flipped kernel; scatter form over the padded buffer.
  thread_local std::vector<T> dpad;
  dpad.assign(static_cast<std::size_t>(C) * PH * PW, T(0));
  const T* weight = params_[0].value.data();
  for (int ci = 0; ci < C; ++ci) {
    T* dp = dpad.data() + static_cast<std::size_t>(ci) * PH * PW;
    for (int co = 0; co < filters_; ++co) {
      const T* dco = d + co * plane;
      const T* wk = weight + (static_cast<std::size_t>(co) * C + ci) * K * K;
      for (int ky = 0; ky < K; ++ky) {
        for (int kx = 0; kx < K; ++kx) {
          const T wv = wk[ky * K + kx];
          for (int y = 0; y < H; ++y) {
            T* __restrict prow = dp + static_cast<std::size_t>(y + ky) * PW + kx;
            const T* __restrict drow = dco + static_cast<std::size_t>(y) * W;
            for (int x = 0; x < W; ++x) prow[x] += wv * drow[x];
          }
        }
      }
    }
  }
  const int pb = pad_before();
  for (int c = 0; c < C; ++c) {
    for (int y = 0; y < H; ++y) {
      const T* src = dpad.data() + (static_cast<std::size_t>(c) * PH + y + pb) * PW + pb;
      std::copy(src, src + W, in_grad.data() + (static_cast<std::size_t>(c) * H + y) * W);
    }
  }
}

// ---------------------------------------------------------------------------
// MaxPool2D

template <typename T>
MaxPool2D<T>::MaxPool2D(Shape3 in, int window) : in_(in), window_(window) {}

template <typename T>
std::size_t MaxPool2D<T>::argmax(std::span<const T> in, std::size_t o) const noexcept {
  const Shape3 os = output_shape();
  const std::size_t oplane = static_cast<std::size_t>(os.height) * os.width;
  const int c = static_cast<int>(o / oplane);
  const int oy = static_cast<int>((o % oplane) / os.width);
  const int ox = static_cast<int>(o % os.width);
  std::size_t best = (static_cast<std::size_t>(c) * in_.height + oy * window_) * in_.width + ox * window_;
  for (int dy = 0; dy < window_; ++dy) {
    for (int dx = 0; dx < window_; ++dx) {
      const std::size_t i =
          (static_cast<std::size_t>(c) * in_.height + oy * window_ + dy) * in_.width + ox * window_ + dx;
      if (in[i] > in[best]) best = i;
    }
  }
  return best;
}

template <typename T>
void MaxPool2D<T>::forward(std::span<const T> in, std::span<T> out) const {
  check_span<T>(in.size(), in_.size(), "pool input");
  check_span<T>(out.size(), output_shape().size(), "pool output");
  if (window_ == 2) {
    const int OH = in_.height / 2, OW = in_.width / 2;
    for (int c = 0; c < in_.channels; ++c) {
      for (int oy = 0; oy < OH; ++oy) {
        const T* r0 = in.data() + (static_cast<std::size_t>(c) * in_.height + 2 * oy) * in_.width;
        const T* r1 = r0 + in_.width;
        T* o = out.data() + (static_cast<std::size_t>(c) * OH + oy) * OW;
        for (int ox = 0; ox < OW; ++ox) {
          o[ox] = std::max(std::max(r0[2 * ox], r0[2 * ox + 1]), std::max(r1[2 * ox], r1[2 * ox + 1]));
        }
      }
    }
    return;
  }
  for (std::size_t o = 0; o < out.size(); ++o) out[o] = in[argmax(in, o)];
}

template <typename T>
void MaxPool2D<T>::backward(std::span<const T> in, std::span<const T>, std::span<const T> out_grad,
                            std::span<T> in_grad) {
  if (in_grad.empty()) return;
  check_span<T>(in_grad.size(), in_.size(), "pool input gradient");
  std::fill(in_grad.begin(), in_grad.end(), T(0));
  if (window_ == 2) {
    const int OH = in_.height / 2, OW = in_.width / 2, Wd = in_.width;
    for (int c = 0; c < in_.channels; ++c) {
      for (int oy = 0; oy < OH; ++oy) {
        const std::size_t r0 = (static_cast<std::size_t>(c) * in_.height + 2 * oy) * Wd;
        const T* g = out_grad.data() + (static_cast<std::size_t>(c) * OH + oy) * OW;
        for (int ox = 0; ox < OW; ++ox) {
          // Same winner as argmax(): first maximum in scan order.
          std::size_t best = r0 + 2 * ox;
          for (std::size_t i : {r0 + 2 * ox + 1, r0 + Wd + 2 * ox, r0 + Wd + 2 * ox + 1}) {
            if (in[i] > in[best]) best = i;
          }
          in_grad[best] += g[ox];
        }
      }
    }
    return;
  }
  for (std::size_t o = 0; o < out_grad.size(); ++o) in_grad[argmax(in, o)] += out_grad[o];
}

// ---------------------------------------------------------------------------
// Dense

template <typename T>
Dense<T>::Dense(Shape3 in, int units, bool relu) : in_(in), units_(units), relu_(relu) {
  const int inputs = static_cast<int>(in.size());
  params_.emplace_back("dense" + std::to_string(units) + ".weight", std::vector<int>{inputs, units});
  params_.emplace_back("dense" + std::to_string(units) + ".bias", std::vector<int>{units});
}

template <typename T>
void Dense<T>::forward(std::span<const T> in, std::span<T> out) const {
  check_span<T>(in.size(), in_.size(), "dense input");
  check_span<T>(out.size(), static_cast<std::size_t>(units_), "dense output");
  const T* weight = params_[0].value.data();
  std::copy(params_[1].value.begin(), params_[1].value.end(), out.begin());
  T* __restrict o = out.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const T xi = in[i];
    if (xi == T(0)) continue;
    const T* __restrict row = weight + i * units_;
    for (int j = 0; j < units_; ++j) o[j] += xi * row[j];
  }
  if (relu_) {
    for (int j = 0; j < units_; ++j) o[j] = std::max(o[j], T(0));
  }
}

template <typename T>
void Dense<T>::backward(std::span<const T> in, std::span<const T> out, std::span<const T> out_grad,
                        std::span<T> in_grad) {
  check_span<T>(out_grad.size(), static_cast<std::size_t>(units_), "dense output gradient");
  thread_local std::vector<T> scratch;
  const T* __restrict d = rectified_grad(out, out_grad, relu_, scratch);
  T* gweight = params_[0].grad.data();
  T* gbias = params_[1].grad.data();
  for (int j = 0; j < units_; ++j) gbias[j] += d[j];
  for (std::size_t i = 0; i < in.size(); ++i) {
    const T xi = in[i];
    if (xi == T(0)) continue;
    T* __restrict grow = gweight + i * units_;
    for (int j = 0; j < units_; ++j) grow[j] += xi * d[j];
  }
  if (in_grad.empty()) return;
  check_span<T>(in_grad.size(), in_.size(), "dense input gradient");
  const T* weight = params_[0].value.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const T* row = weight + i * units_;
    T s = 0;
#pragma omp simd reduction(+ : s)
    for (int j = 0; j < units_; ++j) s += row[j] * d[j];
    in_grad[i] = s;
  }
}

template struct Param<float>;
template struct Param<double>;
template class Conv2D<float>;
template class Conv2D<double>;
template class MaxPool2D<float>;
template class MaxPool2D<double>;
template class Dense<float>;
template class Dense<double>;

}  // namespace idrl::nn
