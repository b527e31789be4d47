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

#include "idrl/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "idrl/errors.hpp"
#include "idrl/random.hpp"

namespace idrl::nn {

namespace {

template <typename T>
double half_squared_error(const std::vector<T>& q, const std::vector<double>& target) {
  double l = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    const double e = static_cast<double>(q[a]) - target[a];
    l += 0.5 * e * e;
  }
  return l;
}

}  // namespace

template <typename T>
GradCheckReport grad_check_report(BasicQNetwork<T>& net, const Frame& frame,
                                  const GradCheckOptions& options) {
  if (!(options.eps > 0.0)) throw ContractViolation("grad_check: eps must be > 0");
  Rng rng(options.seed);

  std::vector<double> target(static_cast<std::size_t>(net.num_outputs()));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& t : target) t = unit(rng);

  const Frame frames[1] = {frame};
  auto evaluate = [&](std::vector<std::uint32_t>* pattern) {
    auto q = net.forward(frames);
    if (pattern) *pattern = net.activation_pattern();
    return half_squared_error(q[0], target);
  };

  // Analytic gradient.
  std::vector<std::uint32_t> base_pattern;
  {
    auto q = net.forward(frames);
    base_pattern = net.activation_pattern();
    std::vector<typename BasicQNetwork<T>::Output> g(1);
    g[0].resize(q[0].size());
    for (std::size_t a = 0; a < q[0].size(); ++a) g[0][a] = static_cast<T>(q[0][a] - target[a]);
    net.zero_grad();
    net.backward(g);
  }

  auto params = net.parameters();
  // Even split of min_parameters; what small tensors (biases) cannot take
  // moves to the larger ones.
  std::vector<std::size_t> quota(params.size(), 0);
  {
    std::size_t left = options.min_parameters;
    std::size_t open = params.size();
    std::vector<bool> full(params.size(), false);
    while (left > 0 && open > 0) {
      const std::size_t share = std::max<std::size_t>(1, left / open);
      for (std::size_t i = 0; i < params.size() && left > 0; ++i) {
        if (full[i]) continue;
        const std::size_t take = std::min({share, params[i]->value.size() - quota[i], left});
        quota[i] += take;
        left -= take;
        if (quota[i] == params[i]->value.size()) {
          full[i] = true;
          --open;
        }
      }
    }
  }

  GradCheckReport report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Param<T>* p = params[pi];
    const std::size_t n = p->value.size();
    const std::size_t want = quota[pi];
    std::set<std::size_t> tried;
    std::size_t done = 0;
    while (done < want && tried.size() < n) {
      const std::size_t k = bounded(rng(), n);
      if (!tried.insert(k).second) continue;

      const T original = p->value[k];
      std::vector<std::uint32_t> plus_pattern, minus_pattern;
      p->value[k] = static_cast<T>(original + options.eps);
      const double plus = evaluate(&plus_pattern);
      p->value[k] = static_cast<T>(original - options.eps);
      const double minus = evaluate(&minus_pattern);
      p->value[k] = original;

      if (plus_pattern != base_pattern || minus_pattern != base_pattern) {
        ++report.skipped_kinks;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * options.eps);
      const double analytic = static_cast<double>(p->grad[k]);
      const double scale = std::max(std::abs(numeric), std::abs(analytic));
      const double rel = scale > 1e-10 ? std::abs(numeric - analytic) / scale : 0.0;
      report.max_relative_error = std::max(report.max_relative_error, rel);
      ++report.checked;
      ++done;
    }
  }
  // Leave the cache consistent with the unperturbed parameters.
  evaluate(nullptr);
  return report;
}

template GradCheckReport grad_check_report(BasicQNetwork<float>&, const Frame&, const GradCheckOptions&);
template GradCheckReport grad_check_report(BasicQNetwork<double>&, const Frame&, const GradCheckOptions&);

}  // namespace idrl::nn
