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

#include "idrl/nn/network.hpp"

namespace idrl::nn {

struct GradCheckOptions {
  double eps = 1e-4;
  std::size_t min_parameters = 200;  // sampled across every parameter tensor
  std::uint64_t seed = 1;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  // Parameters whose +-eps perturbation flips a rectifier or pooling winner;
  // the finite difference is not a derivative there, so they are resampled.
  std::size_t skipped_kinks = 0;
};

// Compares analytic gradients of L = 1/2 * sum_a (q_a - t_a)^2, with fixed
// pseudo-random t, against central differences (L(w+eps) - L(w-eps)) / 2eps.
// Throws ContractViolation when eps <= 0.
template <typename T>
GradCheckReport grad_check_report(BasicQNetwork<T>& net, const Frame& frame,
                                  const GradCheckOptions& options = {});

template <typename T>
double grad_check(BasicQNetwork<T>& net, const Frame& frame, double eps = 1e-4) {
  GradCheckOptions o;
  o.eps = eps;
  return grad_check_report(net, frame, o).max_relative_error;
}

}  // namespace idrl::nn
