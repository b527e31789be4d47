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

#include "idrl/nn/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "idrl/errors.hpp"

namespace idrl::nn {

NetworkConfig NetworkConfig::standard(Head head) {
  NetworkConfig c;
  c.layers = {LayerSpec::conv(8, 4), LayerSpec::pool(2), LayerSpec::conv(4, 8), LayerSpec::pool(2),
              LayerSpec::conv(2, 16), LayerSpec::pool(2), LayerSpec::dense(256),
              LayerSpec::dense(4)};
  c.head = head;
  return c;
}

NetworkConfig NetworkConfig::reduced(int input_side, int hidden, Head head) {
  NetworkConfig c = standard(head);
  c.input_height = input_side;
  c.input_width = input_side;
  c.layers[6] = LayerSpec::dense(hidden);
  return c;
}

int NetworkConfig::num_outputs() const {
  if (layers.empty() || layers.back().kind != LayerKind::Dense) {
    throw ContractViolation("network must end with a dense layer");
  }
  return layers.back().size;
}

std::string NetworkConfig::architecture() const {
  std::ostringstream out;
  out << "in" << input_height << 'x' << input_width << 'x' << input_channels;
  for (const LayerSpec& l : layers) {
    switch (l.kind) {
      case LayerKind::Conv: out << "/conv" << l.size << 'x' << l.filters; break;
      case LayerKind::MaxPool: out << "/pool" << l.size; break;
      case LayerKind::Dense: out << "/dense" << l.size; break;
    }
  }
  out << '/' << to_string(head);
  return out.str();
}

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("bad architecture string: " + std::string(whole));
  }
  return v;
}

// "8x4" -> {8, 4}
std::pair<int, int> parse_pair(std::string_view s, std::string_view whole) {
  auto x = s.find('x');
  if (x == std::string_view::npos) throw FormatError("bad architecture string: " + std::string(whole));
  return {parse_int(s.substr(0, x), whole), parse_int(s.substr(x + 1), whole)};
}

}  // namespace

NetworkConfig NetworkConfig::parse_architecture(std::string_view arch) {
  NetworkConfig c;
  std::vector<std::string_view> tokens;
  for (std::size_t start = 0; start <= arch.size();) {
    auto end = arch.find('/', start);
    if (end == std::string_view::npos) end = arch.size();
    tokens.push_back(arch.substr(start, end - start));
    start = end + 1;
  }
  if (tokens.size() < 3 || !tokens.front().starts_with("in")) {
    throw FormatError("bad architecture string: " + std::string(arch));
  }
  {
    auto dims = tokens.front().substr(2);
    auto x1 = dims.find('x');
    auto x2 = dims.find('x', x1 + 1);
    if (x1 == std::string_view::npos || x2 == std::string_view::npos) {
      throw FormatError("bad architecture string: " + std::string(arch));
    }
    c.input_height = parse_int(dims.substr(0, x1), arch);
    c.input_width = parse_int(dims.substr(x1 + 1, x2 - x1 - 1), arch);
    c.input_channels = parse_int(dims.substr(x2 + 1), arch);
  }
  for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
    auto t = tokens[i];
    if (t.starts_with("conv")) {
      auto [k, f] = parse_pair(t.substr(4), arch);
      c.layers.push_back(LayerSpec::conv(k, f));
    } else if (t.starts_with("pool")) {
      c.layers.push_back(LayerSpec::pool(parse_int(t.substr(4), arch)));
    } else if (t.starts_with("dense")) {
      c.layers.push_back(LayerSpec::dense(parse_int(t.substr(5), arch)));
    } else {
      throw FormatError("bad architecture token '" + std::string(t) + "'");
    }
  }
  if (tokens.back() == "softmax") c.head = Head::Softmax;
  else if (tokens.back() == "linear") c.head = Head::Linear;
  else throw FormatError("bad architecture head '" + std::string(tokens.back()) + "'");
  c.validate();
  return c;
}

void NetworkConfig::validate() const {
  if (input_height <= 0 || input_width <= 0 || input_channels <= 0) {
    throw ContractViolation("input dimensions must be positive");
  }
  bool seen_dense = false;
  Shape3 s{input_channels, input_height, input_width};
  for (const LayerSpec& l : layers) {
    if (l.size <= 0) throw ContractViolation("layer sizes must be positive");
    switch (l.kind) {
      case LayerKind::Conv:
        if (seen_dense) throw ContractViolation("convolution after a dense layer");
        if (l.filters <= 0) throw ContractViolation("conv filters must be positive");
        s.channels = l.filters;
        break;
      case LayerKind::MaxPool:
        if (seen_dense) throw ContractViolation("pooling after a dense layer");
        s.height /= l.size;
        s.width /= l.size;
        if (s.height == 0 || s.width == 0) throw ContractViolation("pooling shrinks input to zero");
        break;
      case LayerKind::Dense:
        seen_dense = true;
        break;
    }
  }
  num_outputs();
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ContractViolation("learning rate must be > 0");
  if (batch_size < 1) throw ContractViolation("batch size must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ContractViolation("gamma must be in [0, 1)");
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) {
    throw ContractViolation("epsilon decay must be in (0, 1]");
  }
  if (!(epsilon_init >= 0.0 && epsilon_init <= 1.0)) {
    throw ContractViolation("initial epsilon must be in [0, 1]");
  }
  if (episodes < 0) throw ContractViolation("episodes must be >= 0");
  if (target_sync_interval < 0) throw ContractViolation("target sync interval must be >= 0");
}

std::string_view to_string(OptimizerKind k) noexcept {
  return k == OptimizerKind::Adam ? "adam" : "sgd";
}

std::string_view to_string(Head h) noexcept {
  return h == Head::Softmax ? "softmax" : "linear";
}

}  // namespace idrl::nn
