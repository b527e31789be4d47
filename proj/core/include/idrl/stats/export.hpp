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

#include <filesystem>
#include <string>
#include <vector>

#include "idrl/stats/stats.hpp"

namespace idrl::trainer {
struct RunMetrics;
}

namespace idrl::stats {

// Per-episode rewards of every agent of one mode.
struct SeriesSet {
  std::string label;
  std::vector<std::vector<double>> agents;  // agents[i][episode]

  std::size_t episodes() const;
  std::vector<double> mean_curve() const;
  std::vector<double> std_curve() const;   // sample standard deviation, 0 for one agent
  std::vector<double> r_totals() const;
  double mean_r_total() const;
};

SeriesSet from_metrics(const trainer::RunMetrics& metrics);

struct ExportOptions {
  std::string baseline = "autonomous";  // label improvements are measured against
  TTestVariant variant = TTestVariant::Pooled;
  bool svg = true;
};

// rewards_<label>.csv: episode,agent_0,...,agent_{n-1},mean,std
void write_rewards_csv(const SeriesSet& s, const std::filesystem::path& path);
SeriesSet read_rewards_csv(const std::filesystem::path& path);

struct PairwiseTest {
  std::string a;
  std::string b;
  std::string unit;  // "episode-mean" or "agent-total"
  bool defined = false;
  TTestResult result;
  std::string note;
};

struct Summary {
  std::vector<SeriesSet> sets;
  std::string baseline;
  std::vector<double> improvement;         // percent vs baseline, per set; NaN without a baseline
  std::vector<PairwiseTest> tests;
  std::vector<std::vector<double>> correlation;  // between mean curves; NaN when undefined
};

Summary summarize(const std::vector<SeriesSet>& sets, const ExportOptions& options = {});
std::string format_summary(const Summary& s);
void write_correlation_csv(const Summary& s, const std::filesystem::path& path);
void write_curves_svg(const std::vector<SeriesSet>& sets, const std::filesystem::path& path);

// Writes rewards_<label>.csv for every set plus summary.txt, correlation.csv
// and (optionally) curves.svg into `dir`. Throws Error when a file cannot be written.
Summary export_results(const std::vector<SeriesSet>& sets, const std::filesystem::path& dir,
                       const ExportOptions& options = {});

}  // namespace idrl::stats
