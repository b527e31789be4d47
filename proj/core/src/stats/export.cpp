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

#include "idrl/stats/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "idrl/errors.hpp"
#include "idrl/trainer/experiment.hpp"

namespace idrl::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v, const char* fmt = "%.17g") {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::size_t SeriesSet::episodes() const { return agents.empty() ? 0 : agents.front().size(); }

std::vector<double> SeriesSet::mean_curve() const {
  const std::size_t n = episodes();
  std::vector<double> m(n, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    std::vector<double> col;
    for (const auto& a : agents) col.push_back(a.at(e));
    m[e] = mean(col);
  }
  return m;
}

std::vector<double> SeriesSet::std_curve() const {
  const std::size_t n = episodes();
  std::vector<double> sd(n, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    std::vector<double> col;
    for (const auto& a : agents) col.push_back(a.at(e));
    sd[e] = std::sqrt(sample_variance(col));
  }
  return sd;
}

std::vector<double> SeriesSet::r_totals() const {
  std::vector<double> out;
  for (const auto& a : agents) out.push_back(total_reward(a));
  return out;
}

double SeriesSet::mean_r_total() const { return mean(r_totals()); }

SeriesSet from_metrics(const trainer::RunMetrics& metrics) {
  return {metrics.label, metrics.reward_series()};
}

void write_rewards_csv(const SeriesSet& s, const std::filesystem::path& path) {
  for (const auto& a : s.agents) {
    if (a.size() != s.episodes()) throw ContractViolation("agents have different episode counts");
  }
  auto out = open_out(path);
  out << "episode";
  for (std::size_t i = 0; i < s.agents.size(); ++i) out << ",agent_" << i;
  out << ",mean,std\n";
  const auto m = s.mean_curve();
  const auto sd = s.std_curve();
  for (std::size_t e = 0; e < s.episodes(); ++e) {
    out << e;
    for (const auto& a : s.agents) out << ',' << num(a[e]);
    out << ',' << num(m[e]) << ',' << num(sd[e]) << '\n';
  }
  check_written(out, path);
}

SeriesSet read_rewards_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path.string());
  SeriesSet s;
  s.label = path.stem().string();
  if (s.label.rfind("rewards_", 0) == 0) s.label = s.label.substr(8);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  std::size_t n_agents = 0;
  {
    std::stringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.rfind("agent_", 0) == 0) ++n_agents;
    }
  }
  if (n_agents == 0) throw FormatError(path.string() + ": no agent columns");
  s.agents.assign(n_agents, {});
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');  // episode index
    for (std::size_t i = 0; i < n_agents; ++i) {
      if (!std::getline(ls, cell, ',')) {
        throw FormatError(path.string() + ":" + std::to_string(lineno) + ": missing column");
      }
      try {
        std::size_t used = 0;
        s.agents[i].push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
  }
  return s;
}

Summary summarize(const std::vector<SeriesSet>& sets, const ExportOptions& options) {
  Summary s;
  s.sets = sets;
  s.baseline = options.baseline;
  const SeriesSet* base = nullptr;
  for (const SeriesSet& set : sets) {
    if (set.label == options.baseline) base = &set;
  }
  for (const SeriesSet& set : sets) {
    double imp = kNaN;
    if (base && base->mean_r_total() != 0.0) imp = improvement_percent(set.mean_r_total(), base->mean_r_total());
    s.improvement.push_back(imp);
  }

  auto run_test = [&](const SeriesSet& a, const SeriesSet& b, bool per_episode) {
    PairwiseTest pt;
    pt.a = a.label;
    pt.b = b.label;
    pt.unit = per_episode ? "episode-mean" : "agent-total";
    try {
      const auto xa = per_episode ? a.mean_curve() : a.r_totals();
      const auto xb = per_episode ? b.mean_curve() : b.r_totals();
      pt.result = t_test(xa, xb, options.variant);
      pt.defined = true;
    } catch (const ContractViolation& e) {
      pt.note = e.what();
    }
    return pt;
  };
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      s.tests.push_back(run_test(sets[i], sets[j], true));
      s.tests.push_back(run_test(sets[i], sets[j], false));
    }
  }

  s.correlation.assign(sets.size(), std::vector<double>(sets.size(), kNaN));
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = 0; j < sets.size(); ++j) {
      try {
        s.correlation[i][j] = pearson(sets[i].mean_curve(), sets[j].mean_curve());
      } catch (const ContractViolation&) {
      }
    }
  }
  return s;
}

std::string format_summary(const Summary& s) {
  std::ostringstream os;
  os << "mode            agents  episodes        mean R_T          sd R_T   improvement\n";
  for (std::size_t i = 0; i < s.sets.size(); ++i) {
    const SeriesSet& set = s.sets[i];
    const auto totals = set.r_totals();
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %7zu %9zu %15.4f %15.4f   %s\n", set.label.c_str(), set.agents.size(),
                  set.episodes(), mean(totals), std::sqrt(sample_variance(totals)),
                  std::isnan(s.improvement[i]) ? "n/a" : (num(s.improvement[i], "%+.2f") + "%").c_str());
    os << line;
  }
  os << "\nper-agent R_T\n";
  for (const SeriesSet& set : s.sets) {
    os << "  " << set.label << ':';
    for (double t : set.r_totals()) os << ' ' << num(t, "%.4f");
    os << '\n';
  }
  if (!s.tests.empty()) {
    os << "\nt-tests (two-sided)\n";
    for (const PairwiseTest& t : s.tests) {
      os << "  " << t.a << " vs " << t.b << " [" << t.unit << "]: ";
      if (t.defined) {
        os << "t = " << num(t.result.t, "%.4f") << ", p = " << num(t.result.p, "%.4e") << ", df = "
           << num(t.result.df, "%.2f") << '\n';
      } else {
        os << "undefined (" << t.note << ")\n";
      }
    }
  }
  os << "\nPearson correlation of mean reward curves\n";
  os << "  " << std::string(14, ' ');
  for (const SeriesSet& set : s.sets) {
    char cell[32];
    std::snprintf(cell, sizeof cell, "%12s", set.label.c_str());
    os << cell;
  }
  os << '\n';
  for (std::size_t i = 0; i < s.sets.size(); ++i) {
    char head[32];
    std::snprintf(head, sizeof head, "  %-14s", s.sets[i].label.c_str());
    os << head;
    for (double r : s.correlation[i]) {
      char cell[32];
      std::snprintf(cell, sizeof cell, "%12s", num(r, "%.4f").c_str());
      os << cell;
    }
    os << '\n';
  }
  return os.str();
}

void write_correlation_csv(const Summary& s, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "mode";
  for (const SeriesSet& set : s.sets) out << ',' << set.label;
  out << '\n';
  for (std::size_t i = 0; i < s.sets.size(); ++i) {
    out << s.sets[i].label;
    for (double r : s.correlation[i]) out << ',' << num(r);
    out << '\n';
  }
  check_written(out, path);
}

void write_curves_svg(const std::vector<SeriesSet>& sets, const std::filesystem::path& path) {
  constexpr double kW = 800, kH = 450, kLeft = 60, kRight = 20, kTop = 20, kBottom = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  double lo = 0.0, hi = 0.0;
  std::size_t episodes = 1;
  for (const SeriesSet& s : sets) {
    const auto m = s.mean_curve();
    const auto sd = s.std_curve();
    episodes = std::max(episodes, m.size());
    for (std::size_t e = 0; e < m.size(); ++e) {
      lo = std::min(lo, m[e] - sd[e]);
      hi = std::max(hi, m[e] + sd[e]);
    }
  }
  if (hi - lo < 1e-9) hi = lo + 1.0;
  const auto px = [&](double e) {
    return kLeft + (kW - kLeft - kRight) * e / std::max<double>(1.0, static_cast<double>(episodes - 1));
  };
  const auto py = [&](double v) { return kTop + (kH - kTop - kBottom) * (hi - v) / (hi - lo); };

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kW - kRight << "\" y2=\"" << py(0)
      << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">episode</text>\n";
  out << "<text x=\"14\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 14 " << kH / 2
      << ")\" text-anchor=\"middle\">mean reward</text>\n";
  out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(hi) + 4 << "\" text-anchor=\"end\">" << num(hi, "%.2f")
      << "</text>\n";
  out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(lo) + 4 << "\" text-anchor=\"end\">" << num(lo, "%.2f")
      << "</text>\n";
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const char* color = kColors[k % 5];
    const auto m = sets[k].mean_curve();
    const auto sd = sets[k].std_curve();
    out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (std::size_t e = 0; e < m.size(); ++e) out << num(px(e), "%.2f") << ',' << num(py(m[e] + sd[e]), "%.2f") << ' ';
    for (std::size_t e = m.size(); e-- > 0;) out << num(px(e), "%.2f") << ',' << num(py(m[e] - sd[e]), "%.2f") << ' ';
    out << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t e = 0; e < m.size(); ++e) out << num(px(e), "%.2f") << ',' << num(py(m[e]), "%.2f") << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 14 + 16 * k << "\" fill=\"" << color << "\">"
        << sets[k].label << "</text>\n";
  }
  out << "</svg>\n";
  check_written(out, path);
}

Summary export_results(const std::vector<SeriesSet>& sets, const std::filesystem::path& dir,
                       const ExportOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  for (const SeriesSet& s : sets) write_rewards_csv(s, dir / ("rewards_" + s.label + ".csv"));
  Summary summary = summarize(sets, options);
  {
    auto out = open_out(dir / "summary.txt");
    out << format_summary(summary);
    check_written(out, dir / "summary.txt");
  }
  write_correlation_csv(summary, dir / "correlation.csv");
  if (options.svg) write_curves_svg(sets, dir / "curves.svg");
  return summary;
}

}  // namespace idrl::stats
