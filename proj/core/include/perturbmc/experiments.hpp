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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "perturbmc/config.hpp"
#include "perturbmc/finite_oracle.hpp"
#include "perturbmc/inverse_problem.hpp"

namespace perturbmc {

/// Index of everything a run produced. Rerunning the same config reproduces
/// identical CSV bytes; the manifest itself carries wall-clock, so only its
/// listed outputs are byte-stable.
struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  std::string kind;
  std::string out_dir;  // relative to the output root
  double wall_seconds = 0.0;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> replicate_seeds;
  std::vector<std::string> outputs;  // paths relative to out_dir

  void save(const std::filesystem::path& path) const;
  static RunManifest load(const std::filesystem::path& path);
};

/// Fans tasks over a bounded worker pool; each task writes only its own
/// result slot, so scheduling cannot change outputs. workers == 0 means
/// hardware concurrency.
void parallel_for(long n_tasks, int workers, const std::function<void(long)>& task);

// ---------------------------------------------------------------------------
// Posterior stability experiments (rwm | mala | pt)

struct ReplicateOutcome {
  bool ok = false;
  std::string error;           // set when !ok (blowups etc.); the sweep continues
  Eigen::VectorXd tau;         // per-coordinate IAT
  Eigen::VectorXd ess;
  Eigen::MatrixXd thinned;     // post-burn-in states, every thin-th row
  double acceptance = 0.0;     // level-K acceptance for pt
  double swap_rate = 0.0;      // pt only
  long burn_in = 0;
};

struct StabilityResult {
  std::vector<double> h_levels;
  // outcomes[level][replicate]
  std::vector<std::vector<ReplicateOutcome>> outcomes;
  std::vector<double> ladder;  // pt only
};

/// Runs the configured sampler on the predator-prey posterior at every h
/// level. Per-replicate streams and initial states derive from
/// (seed, replicate) only, shared across levels, so level comparisons see
/// common random numbers.
StabilityResult run_stability(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Oracle sweep experiment

struct OracleSweepResult {
  // One sweep per constructed instance; instance 0.. are random reversible
  // chains, the last instance is the discretized RWM family.
  std::vector<std::string> instance_names;
  std::vector<SweepResult> sweeps;
};

OracleSweepResult run_oracle_sweep(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Forward convergence experiment

struct ForwardConvergenceResult {
  std::vector<double> h;        // h0 * 2^-j, j = 0..j_max
  std::vector<double> l2_error; // against the j_ref reference
  std::vector<double> log2_ratio;  // consecutive ratios, size j_max
};

ForwardConvergenceResult run_forward_convergence(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Monte Carlo error-bound experiment

struct McErrorCell {
  int chain_id = 0;
  int f_id = 0;
  long M = 0;
  double mse = 0.0;
  double bound = 0.0;
};

struct McErrorResult {
  std::vector<McErrorCell> cells;
  std::vector<double> mse_slope_per_f;  // log-log slope of MSE vs M, per (chain, f)
};

McErrorResult run_mc_error(const ExperimentConfig& config);

// ---------------------------------------------------------------------------

/// Executes the configured experiment, writes CSV/JSON outputs under
/// out_root/<config.output>, and returns the manifest (also written there).
RunManifest run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_root);

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;  // measured vs expected
};

/// Re-evaluates every acceptance criterion applicable to the manifest's
/// experiment kind from its persisted outputs. Throws MissingFileError when
/// outputs are absent.
std::vector<CriterionResult> summarize_manifest(const RunManifest& manifest,
                                                const std::filesystem::path& out_root);

/// Renders the pass/fail table; returns the number of failed criteria.
int print_summary(const std::vector<CriterionResult>& results, std::ostream& out);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace perturbmc
