// Copyright 2026 The perturbmc Authors
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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "perturbmc/csv.hpp"
#include "perturbmc/errors.hpp"
#include "perturbmc/experiments.hpp"

namespace perturbmc {

// Acceptance thresholds, pinned here so summaries and the acceptance suite
// agree by construction.
namespace criteria {
inline constexpr double kGapDeficitOverEpsMax = 10.0;
inline constexpr double kGapDeficitSlopeMin = 0.8;
inline constexpr double kChi2SlopeLo = 1.7;
inline constexpr double kChi2SlopeHi = 2.3;
inline constexpr double kMcSlopeLo = -1.15;
inline constexpr double kMcSlopeHi = -0.85;
inline constexpr double kRk2RatioLo = 1.8;
inline constexpr double kRk2RatioHi = 2.2;
inline constexpr double kIatPooledSdFactor = 2.0;
inline constexpr double kKsMax = 0.05;
}  // namespace criteria

namespace {

double field(const CsvTable& table, const std::vector<std::string>& row, const char* name) {
  const int c = table.column(name);
  if (c < 0) throw std::invalid_argument(std::string("summarize: missing column ") + name);
  return std::stod(row[static_cast<std::size_t>(c)]);
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

std::vector<CriterionResult> summarize_sweep(const CsvTable& table) {
  // instance -> rows of (eps, deficit, chi2)
  std::map<std::string, std::vector<std::array<double, 3>>> instances;
  const int name_col = table.column("instance");
  for (const auto& row : table.rows) {
    const double eps = field(table, row, "eps");
    if (eps <= 0.0) continue;
    const double deficit =
        std::max(0.0, field(table, row, "kappa_base") - field(table, row, "kappa_pert"));
    instances[row[static_cast<std::size_t>(name_col)]].push_back(
        {eps, deficit, field(table, row, "chi2")});
  }
  if (instances.empty()) throw MissingFileError("summarize: sweep.csv has no usable rows");

  double worst_ratio = 0.0;
  double worst_deficit_slope = std::numeric_limits<double>::infinity();
  double chi2_lo = std::numeric_limits<double>::infinity();
  double chi2_hi = -std::numeric_limits<double>::infinity();
  bool deficit_fit_ok = true;
  for (const auto& [name, rows] : instances) {
    std::vector<double> eps, deficit, chi2;
    for (const auto& r : rows) {
      eps.push_back(r[0]);
      worst_ratio = std::max(worst_ratio, r[1] / r[0]);
      if (r[1] > 0.0) deficit.push_back(r[1]);
      chi2.push_back(r[2]);
    }
    if (deficit.size() == eps.size())
      worst_deficit_slope = std::min(worst_deficit_slope, log_log_slope(eps, deficit));
    else
      deficit_fit_ok = false;
    chi2_lo = std::min(chi2_lo, log_log_slope(eps, chi2));
    chi2_hi = std::max(chi2_hi, log_log_slope(eps, chi2));
  }

  std::vector<CriterionResult> results;
  {
    CriterionResult c;
    c.name = "spectral-gap degradation (deficit/eps and slope)";
    c.pass = worst_ratio <= criteria::kGapDeficitOverEpsMax && deficit_fit_ok &&
             worst_deficit_slope >= criteria::kGapDeficitSlopeMin;
    c.detail = "max deficit/eps = " + fmt(worst_ratio) + " (<= 10), min slope = " +
               (deficit_fit_ok ? fmt(worst_deficit_slope) : std::string("undefined")) +
               " (>= 0.8)";
    results.push_back(c);
  }
  {
    CriterionResult c;
    c.name = "chi-square quadratic law (slope in [1.7, 2.3])";
    c.pass = chi2_lo >= criteria::kChi2SlopeLo && chi2_hi <= criteria::kChi2SlopeHi;
    c.detail = "slope range [" + fmt(chi2_lo) + ", " + fmt(chi2_hi) + "]";
    results.push_back(c);
  }
  return results;
}

std::vector<CriterionResult> summarize_stability(const CsvTable& iat, const CsvTable& samples) {
  std::set<double> level_set;
  for (const auto& row : iat.rows) level_set.insert(field(iat, row, "h"));
  if (level_set.size() < 2)
    throw MissingFileError("summarize: need at least two h levels in iat.csv");
  std::vector<double> levels(level_set.begin(), level_set.end());
  const double h_fine = levels[0];
  const double h_next = levels[1];

  // per (level, coordinate): tau samples over replicates
  std::map<std::pair<double, int>, std::vector<double>> taus;
  int max_coord = 0;
  for (const auto& row : iat.rows) {
    const double h = field(iat, row, "h");
    const int c = static_cast<int>(field(iat, row, "coordinate"));
    max_coord = std::max(max_coord, c);
    taus[{h, c}].push_back(field(iat, row, "tau"));
  }

  CriterionResult iat_criterion;
  iat_criterion.name = "IAT stability across the two finest h levels";
  iat_criterion.pass = true;
  double worst_z = 0.0;
  for (int c = 0; c <= max_coord; ++c) {
    const auto& a = taus[{h_fine, c}];
    const auto& b = taus[{h_next, c}];
    if (a.size() < 2 || b.size() < 2)
      throw MissingFileError("summarize: too few replicates for coordinate " + std::to_string(c));
    auto mean_sd = [](const std::vector<double>& v) {
      double m = 0.0;
      for (double x : v) m += x;
      m /= static_cast<double>(v.size());
      double s = 0.0;
      for (double x : v) s += (x - m) * (x - m);
      return std::make_pair(m, std::sqrt(s / static_cast<double>(v.size() - 1)));
    };
    const auto [ma, sa] = mean_sd(a);
    const auto [mb, sb] = mean_sd(b);
    const double pooled = std::sqrt(0.5 * (sa * sa + sb * sb));
    const double z = pooled > 0.0 ? std::abs(ma - mb) / pooled
                                  : (ma == mb ? 0.0 : std::numeric_limits<double>::infinity());
    worst_z = std::max(worst_z, z);
    if (z >= criteria::kIatPooledSdFactor) iat_criterion.pass = false;
  }
  iat_criterion.detail = "max |mean diff| / pooled SD = " + fmt(worst_z) + " (< 2)";

  // pooled samples per (level, coordinate)
  CriterionResult ks_criterion;
  ks_criterion.name = "marginal stability (KS <= 0.05 per coordinate)";
  ks_criterion.pass = true;
  std::map<int, std::vector<double>> fine, next;
  for (const auto& row : samples.rows) {
    const double h = field(samples, row, "h");
    if (h != h_fine && h != h_next) continue;
    auto& dest = (h == h_fine) ? fine : next;
    for (int c = 0; c <= max_coord; ++c)
      dest[c].push_back(field(samples, row, ("x" + std::to_string(c)).c_str()));
  }
  double worst_ks = 0.0;
  for (int c = 0; c <= max_coord; ++c) {
    if (fine[c].empty() || next[c].empty())
      throw MissingFileError("summarize: samples.csv missing coordinate " + std::to_string(c));
    const double d = ks_distance(fine[c], next[c]);
    worst_ks = std::max(worst_ks, d);
    if (d > criteria::kKsMax) ks_criterion.pass = false;
  }
  ks_criterion.detail = "max KS = " + fmt(worst_ks) + " (<= 0.05)";

  return {iat_criterion, ks_criterion};
}

std::vector<CriterionResult> summarize_forward(const CsvTable& table) {
  CriterionResult c;
  c.name = "RK2 self-convergence order (log2 ratios in [1.8, 2.2])";
  c.pass = true;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  bool any = false;
  for (const auto& row : table.rows) {
    const int col = table.column("log2_ratio");
    const std::string& value = row[static_cast<std::size_t>(col)];
    const int status_col = table.column("status");
    if (row[static_cast<std::size_t>(status_col)] != "ok") {
      c.pass = false;
      c.detail = "blowup at j = " + row[0];
      return {c};
    }
    if (value.empty()) continue;
    const double ratio = std::stod(value);
    any = true;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (ratio < criteria::kRk2RatioLo || ratio > criteria::kRk2RatioHi) c.pass = false;
  }
  if (!any) {
    c.pass = false;
    c.detail = "no ratios present";
  } else {
    c.detail = "ratio range [" + fmt(lo) + ", " + fmt(hi) + "]";
  }
  return {c};
}

std::vector<CriterionResult> summarize_mc(const CsvTable& cells, const CsvTable& slopes) {
  CriterionResult bound_criterion;
  bound_criterion.name = "MC error bound dominates empirical MSE";
  bound_criterion.pass = true;
  double worst_margin = 0.0;
  for (const auto& row : cells.rows) {
    const double mse = field(cells, row, "mse");
    const double bound = field(cells, row, "bound");
    worst_margin = std::max(worst_margin, mse / bound);
    if (mse > bound) bound_criterion.pass = false;
  }
  bound_criterion.detail = "max mse/bound = " + fmt(worst_margin) + " (<= 1)";

  CriterionResult slope_criterion;
  slope_criterion.name = "MSE ~ 1/M (slope in [-1.15, -0.85])";
  slope_criterion.pass = true;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& row : slopes.rows) {
    const double s = field(slopes, row, "slope");
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    if (s < criteria::kMcSlopeLo || s > criteria::kMcSlopeHi) slope_criterion.pass = false;
  }
  slope_criterion.detail = "slope range [" + fmt(lo) + ", " + fmt(hi) + "]";
  return {bound_criterion, slope_criterion};
}

}  // namespace

std::vector<CriterionResult> summarize_manifest(const RunManifest& manifest,
                                                const std::filesystem::path& out_root) {
  const std::filesystem::path dir = out_root / manifest.out_dir;
  if (manifest.outputs.empty())
    throw MissingFileError("summarize: manifest lists no outputs");
  for (const auto& rel : manifest.outputs)
    if (!std::filesystem::exists(dir / rel))
      throw MissingFileError("summarize: missing output " + (dir / rel).string());

  if (manifest.kind == "oracle-sweep") return summarize_sweep(read_csv(dir / "sweep.csv"));
  if (manifest.kind == "rwm" || manifest.kind == "mala" || manifest.kind == "pt")
    return summarize_stability(read_csv(dir / "iat.csv"), read_csv(dir / "samples.csv"));
  if (manifest.kind == "forward-convergence")
    return summarize_forward(read_csv(dir / "convergence.csv"));
  if (manifest.kind == "mc-error")
    return summarize_mc(read_csv(dir / "mc_error.csv"), read_csv(dir / "mc_slopes.csv"));
  throw MissingFileError("summarize: unknown experiment kind '" + manifest.kind + "'");
}

int print_summary(const std::vector<CriterionResult>& results, std::ostream& out) {
  int failures = 0;
  for (const auto& r : results) {
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) out << ": " << r.detail;
    out << "\n";
    if (!r.pass) ++failures;
  }
  return failures;
}

}  // namespace perturbmc
