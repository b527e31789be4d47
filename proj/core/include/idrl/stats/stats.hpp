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

#include <span>

namespace idrl::stats {

// Compensated (Neumaier) sum.
double total_reward(std::span<const double> series) noexcept;

double mean(std::span<const double> x);
// Sample variance with n - 1 in the denominator; 0 for fewer than two values.
double sample_variance(std::span<const double> x);

// Product-moment correlation. Throws ContractViolation for unequal lengths,
// fewer than two points or a constant series.
double pearson(std::span<const double> x, std::span<const double> y);

enum class TTestVariant { Pooled, Welch };

struct TTestResult {
  double t = 0.0;
  double p = 1.0;   // two-sided
  double df = 0.0;
};

// Two-sample t-test, pooled variance by default. Throws ContractViolation if
// either sample has fewer than two values or the variance estimate is zero.
TTestResult t_test(std::span<const double> a, std::span<const double> b,
                   TTestVariant variant = TTestVariant::Pooled);

// I_x(a, b) by Lentz's continued fraction; absolute error below 1e-13 for
// the parameter ranges used here.
double regularized_incomplete_beta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

// Relative gain of `value` over `baseline` in percent, (value - baseline) / |baseline| * 100.
// Equals (value / baseline - 1) * 100 for a positive baseline. Throws when baseline is 0.
double improvement_percent(double value, double baseline);

}  // namespace idrl::stats
