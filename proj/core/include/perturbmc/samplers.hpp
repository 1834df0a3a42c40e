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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "perturbmc/densities.hpp"
#include "perturbmc/rng.hpp"

namespace perturbmc {

enum class Proposal { kRandomWalk, kLangevin };

/// A Metropolis-Hastings kernel. Both proposals use covariance 2h I:
///   random walk:  x' = x + sqrt(2h) xi
///   Langevin:     x' = x + h grad log pi(x) + sqrt(2h) xi
/// The exponent -||.||^2 / (4h) defines the sampled law; normalizers only
/// matter where they fail to cancel (they always do for these two).
struct MHKernel {
  LogTarget target;
  Proposal proposal = Proposal::kRandomWalk;
  double step = 0.0;  // h > 0

  static MHKernel random_walk(LogTarget target, double h);
  static MHKernel langevin(LogTarget target, double h);

  std::string describe() const;
};

struct StepResult {
  Vector state;
  bool accepted = false;
};

/// One random-walk Metropolis step. Out-of-support (or -inf density)
/// proposals are rejected; the chain stays put.
StepResult rwm_step(const MHKernel& kernel, const Vector& x, RngStream& rng);

/// One MALA step. Throws NumericError if the gradient at x is non-finite.
StepResult mala_step(const MHKernel& kernel, const Vector& x, RngStream& rng);

/// log of the MALA Hastings ratio for a given proposal point:
/// log pi(x') - log pi(x) + log q(x',x) - log q(x,x'). Exactly 0 at x' == x.
double mala_log_accept_ratio(const MHKernel& kernel, const Vector& x, const Vector& proposal);

/// A seeded realization of a chain. Identical (kernel, x0, n, seed) replays
/// bit-identical states.
struct Trace {
  Eigen::MatrixXd states;  // n x dim, one row per step
  long acceptance_count = 0;
  std::uint64_t seed = 0;
  std::string kernel;

  long n() const { return states.rows(); }
  int dim() const { return static_cast<int>(states.cols()); }
};

/// Iterates the step operation n times from x0. Throws std::domain_error if
/// x0 is outside the support or has -inf log-density.
Trace run_chain(const MHKernel& kernel, const Vector& x0, long n, std::uint64_t seed);

/// beta_k = 1 + alpha^{-K} - alpha^{-k}, k = 0..K; strictly increasing with
/// beta_K = 1. Throws std::invalid_argument unless K >= 1 and alpha > 1.
std::vector<double> tempering_ladder(int K, double alpha);

/// Swap acceptance between neighboring tempering levels:
/// min{1, pi_k(x1) pi_{k+1}(x) / (pi_k(x) pi_{k+1}(x1))}.
double pt_swap_prob(const LogTarget& pi_k, const LogTarget& pi_k1, const Vector& x,
                    const Vector& x1);

/// Same acceptance from already-evaluated log-densities.
double swap_accept_prob(double lpk_x, double lpk_x1, double lpk1_x, double lpk1_x1);

struct PTLevel {
  MHKernel kernel;
  int steps = 1;  // t_k
};

struct PTConfig {
  std::vector<PTLevel> levels;  // K+1 levels, level K is the target
  int K() const { return static_cast<int>(levels.size()) - 1; }
};

struct SwapStats {
  std::vector<long> attempts;  // per swap index 0..K-1
  std::vector<long> accepts;
};

/// Parallel tempering over K+1 replicas: per iteration, each replica advances
/// t_k steps under its level kernel (one derived stream per level), then one
/// neighbor pair drawn uniformly from {0..K-1} swaps coordinate vectors with
/// the min-ratio probability. Swaps exchange states, not kernels.
class PTSampler {
 public:
  PTSampler(PTConfig config, std::vector<Vector> init, std::uint64_t seed);

  void step();

  const std::vector<Vector>& replicas() const { return replicas_; }
  long iteration() const { return iteration_; }
  const SwapStats& swap_stats() const { return stats_; }
  const std::vector<double>& replica_log_density() const { return logp_; }
  long level_acceptance(int k) const { return level_accepts_[k]; }

 private:
  PTConfig config_;
  std::vector<Vector> replicas_;
  std::vector<double> logp_;
  std::vector<long> level_accepts_;
  std::vector<RngStream> level_streams_;
  RngStream swap_stream_;
  SwapStats stats_;
  long iteration_ = 0;
};

struct PTRunResult {
  std::vector<int> recorded_levels;
  std::vector<Trace> level_traces;  // aligned with recorded_levels
  SwapStats swap_stats;
};

/// Runs n PT iterations, recording one trace per requested level (all levels
/// when record_levels is empty). Traces have equal length n.
PTRunResult pt_run(const PTConfig& config, const std::vector<Vector>& init, long n,
                   std::uint64_t seed, std::vector<int> record_levels = {});

/// Finite-state parallel tempering with row-stochastic level kernels; the
/// discrete mirror of PTSampler used to verify the exact product kernel.
/// Level moves draw from kernel rows, swaps use the same min-ratio rule on
/// the target pmfs.
class FinitePTSampler {
 public:
  FinitePTSampler(std::vector<Eigen::MatrixXd> level_kernels,
                  std::vector<Eigen::VectorXd> targets, std::vector<int> init,
                  std::uint64_t seed);

  void step();

  const std::vector<int>& state() const { return state_; }
  const SwapStats& swap_stats() const { return stats_; }

  /// Index of the current state in the product space (level 0 slowest).
  int product_index() const;

 private:
  std::vector<Eigen::MatrixXd> kernels_;
  std::vector<Eigen::VectorXd> targets_;
  std::vector<int> state_;
  std::vector<RngStream> level_streams_;
  RngStream swap_stream_;
  SwapStats stats_;
};

}  // namespace perturbmc
