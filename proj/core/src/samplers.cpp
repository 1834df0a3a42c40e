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

#include "perturbmc/samplers.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "perturbmc/errors.hpp"

namespace perturbmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Accept iff log U < log_ratio, U in (0,1]. min{1, e^r} is implied: r >= 0
// always accepts.
bool mh_accept(double log_ratio, RngStream& rng) {
  if (log_ratio >= 0.0) {
    rng.uniform_pos();  // keep the stream layout identical on both branches
    return true;
  }
  return std::log(rng.uniform_pos()) < log_ratio;
}

// Internal chain state carrying cached values so one iteration costs one
// density evaluation (plus one gradient for MALA).
struct ChainState {
  Vector x;
  double logp = 0.0;
  Vector grad;  // only maintained for Langevin kernels
};

double log_langevin_proposal(const Vector& from, const Vector& to, const Vector& grad_from,
                             double h) {
  return -(to - from - h * grad_from).squaredNorm() / (4.0 * h);
}

bool advance_rwm(const MHKernel& kernel, ChainState& s, RngStream& rng) {
  const double root = std::sqrt(2.0 * kernel.step);
  Vector prop = s.x + root * rng.normal_vector(kernel.target.dim());
  const double logp_prop = kernel.target.log_density(prop);
  const double ratio = logp_prop == kNegInf ? kNegInf : logp_prop - s.logp;
  if (mh_accept(ratio, rng)) {
    s.x = std::move(prop);
    s.logp = logp_prop;
    return true;
  }
  return false;
}

bool advance_mala(const MHKernel& kernel, ChainState& s, RngStream& rng) {
  if (s.grad.size() == 0) s.grad = kernel.target.gradient(s.x);
  if (!s.grad.allFinite()) throw NumericError("mala_step: gradient non-finite at current state");

  const double h = kernel.step;
  const double root = std::sqrt(2.0 * h);
  Vector prop = s.x + h * s.grad + root * rng.normal_vector(kernel.target.dim());
  const double logp_prop = kernel.target.log_density(prop);
  if (logp_prop == kNegInf) {
    mh_accept(kNegInf, rng);
    return false;
  }
  Vector grad_prop = kernel.target.gradient(prop);
  if (!grad_prop.allFinite()) {
    // Reverse move has no well-defined density; treat as zero acceptance.
    mh_accept(kNegInf, rng);
    return false;
  }
  const double log_fwd = log_langevin_proposal(s.x, prop, s.grad, h);
  const double log_rev = log_langevin_proposal(prop, s.x, grad_prop, h);
  const double ratio = logp_prop - s.logp + log_rev - log_fwd;
  if (mh_accept(ratio, rng)) {
    s.x = std::move(prop);
    s.logp = logp_prop;
    s.grad = std::move(grad_prop);
    return true;
  }
  return false;
}

bool advance(const MHKernel& kernel, ChainState& s, RngStream& rng) {
  return kernel.proposal == Proposal::kRandomWalk ? advance_rwm(kernel, s, rng)
                                                  : advance_mala(kernel, s, rng);
}

ChainState make_state(const MHKernel& kernel, const Vector& x) {
  if (!kernel.target.support().contains(x))
    throw std::domain_error("chain start outside target support");
  const double logp = kernel.target.log_density(x);
  if (!std::isfinite(logp))
    throw std::domain_error("chain start has non-finite log-density");
  return ChainState{x, logp, Vector()};
}

}  // namespace

MHKernel MHKernel::random_walk(LogTarget target, double h) {
  if (h <= 0.0) throw std::invalid_argument("MHKernel: step must be positive");
  return MHKernel{std::move(target), Proposal::kRandomWalk, h};
}

MHKernel MHKernel::langevin(LogTarget target, double h) {
  if (h <= 0.0) throw std::invalid_argument("MHKernel: step must be positive");
  return MHKernel{std::move(target), Proposal::kLangevin, h};
}

std::string MHKernel::describe() const {
  std::ostringstream out;
  out << (proposal == Proposal::kRandomWalk ? "rwm" : "mala") << "(h=" << step << ")";
  return out.str();
}

StepResult rwm_step(const MHKernel& kernel, const Vector& x, RngStream& rng) {
  if (kernel.proposal != Proposal::kRandomWalk)
    throw std::invalid_argument("rwm_step: kernel is not a random-walk kernel");
  ChainState s = make_state(kernel, x);
  const bool accepted = advance_rwm(kernel, s, rng);
  return StepResult{std::move(s.x), accepted};
}

StepResult mala_step(const MHKernel& kernel, const Vector& x, RngStream& rng) {
  if (kernel.proposal != Proposal::kLangevin)
    throw std::invalid_argument("mala_step: kernel is not a Langevin kernel");
  ChainState s = make_state(kernel, x);
  const bool accepted = advance_mala(kernel, s, rng);
  return StepResult{std::move(s.x), accepted};
}

double mala_log_accept_ratio(const MHKernel& kernel, const Vector& x, const Vector& proposal) {
  const double h = kernel.step;
  const double logp_x = kernel.target.log_density(x);
  const double logp_p = kernel.target.log_density(proposal);
  if (logp_p == kNegInf) return kNegInf;
  const Vector grad_x = kernel.target.gradient(x);
  const Vector grad_p = kernel.target.gradient(proposal);
  return logp_p - logp_x + log_langevin_proposal(proposal, x, grad_p, h) -
         log_langevin_proposal(x, proposal, grad_x, h);
}

Trace run_chain(const MHKernel& kernel, const Vector& x0, long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("run_chain: n must be >= 1");
  ChainState s = make_state(kernel, x0);
  RngStream rng = RngStream::derive(seed, 0);

  Trace trace;
  trace.states.resize(n, kernel.target.dim());
  trace.seed = seed;
  trace.kernel = kernel.describe();
  for (long i = 0; i < n; ++i) {
    if (advance(kernel, s, rng)) ++trace.acceptance_count;
    trace.states.row(i) = s.x.transpose();
  }
  return trace;
}

std::vector<double> tempering_ladder(int K, double alpha) {
  if (K < 1) throw std::invalid_argument("tempering_ladder: K must be >= 1");
  if (alpha <= 1.0) throw std::invalid_argument("tempering_ladder: alpha must exceed 1");
  std::vector<double> beta(K + 1);
  const double floor_term = std::pow(alpha, -K);
  for (int k = 0; k <= K; ++k) beta[k] = 1.0 + floor_term - std::pow(alpha, -k);
  return beta;
}

double swap_accept_prob(double lpk_x, double lpk_x1, double lpk1_x, double lpk1_x1) {
  const double log_ratio = lpk_x1 + lpk1_x - lpk_x - lpk1_x1;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

double pt_swap_prob(const LogTarget& pi_k, const LogTarget& pi_k1, const Vector& x,
                    const Vector& x1) {
  if (!pi_k.support().contains(x) || !pi_k.support().contains(x1) ||
      !pi_k1.support().contains(x) || !pi_k1.support().contains(x1))
    throw std::domain_error("pt_swap_prob: point outside support");
  return swap_accept_prob(pi_k.log_density(x), pi_k.log_density(x1), pi_k1.log_density(x),
                          pi_k1.log_density(x1));
}

PTSampler::PTSampler(PTConfig config, std::vector<Vector> init, std::uint64_t seed)
    : config_(std::move(config)), swap_stream_(RngStream::derive(seed, 1000000)) {
  const int K = config_.K();
  if (K < 1) throw std::invalid_argument("PTSampler: need at least two levels");
  if (static_cast<int>(init.size()) != K + 1)
    throw std::invalid_argument("PTSampler: one initial state per level required");
  for (const auto& level : config_.levels)
    if (level.steps < 1) throw std::invalid_argument("PTSampler: t_k must be >= 1");

  replicas_ = std::move(init);
  logp_.resize(K + 1);
  level_accepts_.assign(K + 1, 0);
  for (int k = 0; k <= K; ++k) {
    const auto& target = config_.levels[k].kernel.target;
    if (!target.support().contains(replicas_[k]))
      throw std::domain_error("PTSampler: replica outside its level support");
    logp_[k] = target.log_density(replicas_[k]);
    if (!std::isfinite(logp_[k]))
      throw std::domain_error("PTSampler: replica has non-finite log-density");
    level_streams_.push_back(RngStream::derive(seed, static_cast<std::uint64_t>(k)));
  }
  stats_.attempts.assign(K, 0);
  stats_.accepts.assign(K, 0);
}

void PTSampler::step() {
  const int K = config_.K();
  for (int k = 0; k <= K; ++k) {
    ChainState s{replicas_[k], logp_[k], Vector()};
    for (int t = 0; t < config_.levels[k].steps; ++t)
      if (advance(config_.levels[k].kernel, s, level_streams_[k])) ++level_accepts_[k];
    replicas_[k] = std::move(s.x);
    logp_[k] = s.logp;
  }

  const int k = swap_stream_.uniform_int(K);
  const auto& target_k = config_.levels[k].kernel.target;
  const auto& target_k1 = config_.levels[k + 1].kernel.target;
  const double lpk_x1 = target_k.log_density(replicas_[k + 1]);
  const double lpk1_x = target_k1.log_density(replicas_[k]);
  const double prob = swap_accept_prob(logp_[k], lpk_x1, lpk1_x, logp_[k + 1]);

  ++stats_.attempts[k];
  if (swap_stream_.uniform_pos() <= prob) {
    std::swap(replicas_[k], replicas_[k + 1]);
    logp_[k] = lpk_x1;
    logp_[k + 1] = lpk1_x;
    ++stats_.accepts[k];
  }
  ++iteration_;
}

PTRunResult pt_run(const PTConfig& config, const std::vector<Vector>& init, long n,
                   std::uint64_t seed, std::vector<int> record_levels) {
  if (n < 1) throw std::invalid_argument("pt_run: n must be >= 1");
  PTSampler sampler(config, init, seed);

  if (record_levels.empty())
    for (int k = 0; k <= config.K(); ++k) record_levels.push_back(k);

  PTRunResult result;
  result.recorded_levels = record_levels;
  result.level_traces.resize(record_levels.size());
  for (std::size_t i = 0; i < record_levels.size(); ++i) {
    auto& trace = result.level_traces[i];
    trace.states.resize(n, config.levels[record_levels[i]].kernel.target.dim());
    trace.seed = seed;
    trace.kernel = "pt/" + config.levels[record_levels[i]].kernel.describe();
  }

  for (long i = 0; i < n; ++i) {
    sampler.step();
    for (std::size_t j = 0; j < record_levels.size(); ++j)
      result.level_traces[j].states.row(i) = sampler.replicas()[record_levels[j]].transpose();
  }
  for (std::size_t j = 0; j < record_levels.size(); ++j)
    result.level_traces[j].acceptance_count = sampler.level_acceptance(record_levels[j]);
  result.swap_stats = sampler.swap_stats();
  return result;
}

FinitePTSampler::FinitePTSampler(std::vector<Eigen::MatrixXd> level_kernels,
                                 std::vector<Eigen::VectorXd> targets, std::vector<int> init,
                                 std::uint64_t seed)
    : kernels_(std::move(level_kernels)),
      targets_(std::move(targets)),
      state_(std::move(init)),
      swap_stream_(RngStream::derive(seed, 1000000)) {
  if (kernels_.size() < 2 || kernels_.size() != targets_.size() ||
      kernels_.size() != state_.size())
    throw std::invalid_argument("FinitePTSampler: level count mismatch");
  const int K = static_cast<int>(kernels_.size()) - 1;
  for (std::size_t k = 0; k < kernels_.size(); ++k)
    level_streams_.push_back(RngStream::derive(seed, static_cast<std::uint64_t>(k)));
  stats_.attempts.assign(K, 0);
  stats_.accepts.assign(K, 0);
}

void FinitePTSampler::step() {
  const int K = static_cast<int>(kernels_.size()) - 1;
  for (int k = 0; k <= K; ++k) {
    const auto row = kernels_[k].row(state_[k]);
    double u = level_streams_[k].uniform();
    int next = static_cast<int>(row.size()) - 1;
    double acc = 0.0;
    for (int j = 0; j < row.size(); ++j) {
      acc += row[j];
      if (u < acc) {
        next = j;
        break;
      }
    }
    state_[k] = next;
  }

  const int k = swap_stream_.uniform_int(K);
  const double prob =
      swap_accept_prob(std::log(targets_[k][state_[k]]), std::log(targets_[k][state_[k + 1]]),
                       std::log(targets_[k + 1][state_[k]]),
                       std::log(targets_[k + 1][state_[k + 1]]));
  ++stats_.attempts[k];
  if (swap_stream_.uniform_pos() <= prob) {
    std::swap(state_[k], state_[k + 1]);
    ++stats_.accepts[k];
  }
}

int FinitePTSampler::product_index() const {
  int index = 0;
  for (std::size_t k = 0; k < state_.size(); ++k)
    index = index * static_cast<int>(targets_[k].size()) + state_[k];
  return index;
}

}  // namespace perturbmc
