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

#include "perturbmc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "perturbmc/csv.hpp"
#include "perturbmc/diagnostics.hpp"
#include "perturbmc/errors.hpp"
#include "perturbmc/rng.hpp"
#include "perturbmc/samplers.hpp"
#include "perturbmc/version.hpp"

namespace perturbmc {

namespace {

std::uint64_t replicate_seed(std::uint64_t master, int replicate) {
  return mix64(mix64(master) + static_cast<std::uint64_t>(replicate) + 1);
}

Eigen::VectorXd column_of(const Eigen::MatrixXd& m, int c, long from) {
  return m.col(c).segment(from, m.rows() - from);
}

}  // namespace

void parallel_for(long n_tasks, int workers, const std::function<void(long)>& task) {
  if (n_tasks <= 0) return;
  int n_workers = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  n_workers = static_cast<int>(std::min<long>(n_workers, n_tasks));
  if (n_workers == 1) {
    for (long i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const long i = next.fetch_add(1);
        if (i >= n_tasks) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    const double ai = a[i];
    const double bj = b[j];
    if (ai <= bj) ++i;
    if (bj <= ai) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

// ---------------------------------------------------------------------------
// Stability experiments

namespace {

ReplicateOutcome analyze_trace(const Eigen::MatrixXd& states, long burn_in_cfg, int thin) {
  ReplicateOutcome outcome;
  const long n = states.rows();
  const long burn = burn_in_cfg >= 0 ? std::min(burn_in_cfg, n / 2) : suggest_burn_in(states);
  outcome.burn_in = burn;

  const int dim = static_cast<int>(states.cols());
  outcome.tau.resize(dim);
  outcome.ess.resize(dim);
  for (int c = 0; c < dim; ++c) {
    const Eigen::VectorXd series = column_of(states, c, burn);
    const std::span<const double> view(series.data(), static_cast<std::size_t>(series.size()));
    const IATResult iat = autocorr_time(view);
    outcome.tau[c] = iat.tau;
    outcome.ess[c] = iat.ess;
  }

  const long kept = (n - burn + thin - 1) / thin;
  outcome.thinned.resize(kept, dim);
  long row = 0;
  for (long i = burn; i < n; i += thin) outcome.thinned.row(row++) = states.row(i);
  outcome.ok = true;
  return outcome;
}

}  // namespace

StabilityResult run_stability(const ExperimentConfig& config) {
  config.validate();
  const ObservedData data = synth_data(PPParams{kThetaTrue}, config.h_ref, config.seed);
  const Vector anchor = probit_inverse(PPParams{kThetaTrue});

  std::vector<double> levels = config.h_levels;
  std::sort(levels.begin(), levels.end(), std::greater<>());

  StabilityResult result;
  result.h_levels = levels;
  result.outcomes.assign(levels.size(), std::vector<ReplicateOutcome>(config.replicates));
  if (config.kind == "pt") result.ladder = tempering_ladder(config.K, config.alpha);

  const long n_tasks = static_cast<long>(levels.size()) * config.replicates;
  parallel_for(n_tasks, config.workers, [&](long index) {
    const int level = static_cast<int>(index / config.replicates);
    const int rep = static_cast<int>(index % config.replicates);
    ReplicateOutcome& slot = result.outcomes[level][rep];
    try {
      const ForwardSpec spec = ForwardSpec::with_step(levels[level]);
      // Common random numbers across levels: both the initial state and the
      // chain stream depend on (seed, replicate) only.
      RngStream init_stream = RngStream::derive(config.seed, 9000 + static_cast<std::uint64_t>(rep));
      const Vector init = anchor + 0.05 * init_stream.normal_vector(8);
      const std::uint64_t chain_seed = replicate_seed(config.seed, rep);

      if (config.kind == "pt") {
        const std::vector<double> ladder = tempering_ladder(config.K, config.alpha);
        PTConfig pt;
        for (double beta : ladder)
          pt.levels.push_back(
              PTLevel{MHKernel::random_walk(tempered_target(spec, data, beta), config.step),
                      config.t_k});
        std::vector<Vector> inits(ladder.size(), init);
        PTRunResult run = pt_run(pt, inits, config.iterations, chain_seed, {config.K});
        slot = analyze_trace(run.level_traces[0].states, config.burn_in, config.thin);
        slot.acceptance = static_cast<double>(run.level_traces[0].acceptance_count) /
                          static_cast<double>(config.iterations * config.t_k);
        long attempts = 0, accepts = 0;
        for (std::size_t k = 0; k < run.swap_stats.attempts.size(); ++k) {
          attempts += run.swap_stats.attempts[k];
          accepts += run.swap_stats.accepts[k];
        }
        slot.swap_rate = attempts > 0 ? static_cast<double>(accepts) / attempts : 0.0;
      } else {
        const LogTarget target = posterior_target(spec, data);
        const MHKernel kernel = config.kind == "rwm"
                                    ? MHKernel::random_walk(target, config.step)
                                    : MHKernel::langevin(target, config.step);
        const Trace trace = run_chain(kernel, init, config.iterations, chain_seed);
        slot = analyze_trace(trace.states, config.burn_in, config.thin);
        slot.acceptance =
            static_cast<double>(trace.acceptance_count) / static_cast<double>(trace.n());
      }
    } catch (const std::exception& e) {
      slot.ok = false;
      slot.error = e.what();
    }
  });
  return result;
}

// ---------------------------------------------------------------------------
// Oracle sweep

OracleSweepResult run_oracle_sweep(const ExperimentConfig& config) {
  config.validate();
  OracleSweepResult result;

  const int n_random = config.sweep_chains;
  result.instance_names.reserve(n_random + 1);
  result.sweeps.resize(n_random + 1);

  std::vector<PerturbationFamily> families;
  RngStream setup(mix64(config.seed) ^ 0x5eedULL);
  for (int i = 0; i < n_random; ++i) {
    const int n = 10 + setup.uniform_int(std::max(1, config.sweep_states - 9));
    const std::uint64_t chain_seed = setup.next_u64();
    FiniteChain base = random_reversible_chain(n, chain_seed, 0.35);
    Eigen::VectorXd bump(n);
    for (int s = 0; s < n; ++s) bump[s] = 2.0 * setup.uniform() - 1.0;
    families.push_back(density_reweight_family(base, bump));
    result.instance_names.push_back("random-" + std::to_string(i));
  }
  {
    const LogTarget base =
        targets::truncated_gaussian_1d(-config.grid_halfwidth, config.grid_halfwidth);
    Bump bump;
    bump.value = [](const Vector& x) { return std::sin(3.0 * x[0]); };
    const UniformGrid grid =
        UniformGrid::interval(-config.grid_halfwidth, config.grid_halfwidth, config.grid_cells);
    families.push_back(grid_mh_family(base, bump, config.grid_step, grid));
    result.instance_names.push_back("grid-rwm");
  }

  parallel_for(static_cast<long>(families.size()), config.workers, [&](long i) {
    result.sweeps[static_cast<std::size_t>(i)] =
        perturbation_sweep(families[static_cast<std::size_t>(i)], config.eps_list);
  });
  return result;
}

// ---------------------------------------------------------------------------
// Forward convergence

ForwardConvergenceResult run_forward_convergence(const ExperimentConfig& config) {
  config.validate();
  ForwardConvergenceResult result;
  const PPParams truth{kThetaTrue};
  const Eigen::VectorXd reference =
      forward(truth, ForwardSpec::with_step(config.h0 * std::pow(2.0, -config.j_ref)));
  for (int j = 0; j <= config.j_max; ++j) {
    const double h = config.h0 * std::pow(2.0, -j);
    result.h.push_back(h);
    double err = std::numeric_limits<double>::quiet_NaN();
    try {
      err = (forward(truth, ForwardSpec::with_step(h)) - reference).norm();
    } catch (const BlowupError&) {
      // flagged downstream via the NaN entry
    }
    result.l2_error.push_back(err);
  }
  for (int j = 0; j + 1 <= config.j_max; ++j) {
    const double a = result.l2_error[static_cast<std::size_t>(j)];
    const double b = result.l2_error[static_cast<std::size_t>(j) + 1];
    result.log2_ratio.push_back(std::log2(a / b));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Monte Carlo error bound

McErrorResult run_mc_error(const ExperimentConfig& config) {
  config.validate();
  McErrorResult result;

  std::vector<long> Ms;
  for (double m : config.m_list) Ms.push_back(static_cast<long>(m));
  std::sort(Ms.begin(), Ms.end());
  const long longest = Ms.back();

  for (int c = 0; c < config.mc_chains; ++c) {
    const FiniteChain chain =
        random_reversible_chain(config.mc_states, mix64(config.seed) + 77 + c, 0.1);
    const Eigen::VectorXd pi = *chain.pi;
    const double kappa = spectral_gap(chain).kappa;

    RngStream f_stream(mix64(config.seed) ^ (0xf00dULL + c));
    Eigen::MatrixXd f(config.mc_states, config.mc_functions);
    for (int j = 0; j < config.mc_functions; ++j)
      for (int s = 0; s < config.mc_states; ++s) f(s, j) = 2.0 * f_stream.uniform() - 1.0;

    Eigen::VectorXd f_mean(config.mc_functions), f_var(config.mc_functions);
    for (int j = 0; j < config.mc_functions; ++j) {
      f_mean[j] = pi.dot(f.col(j));
      f_var[j] = pi.dot(f.col(j).array().square().matrix()) - f_mean[j] * f_mean[j];
    }

    // cumulative CDF rows for inverse-CDF stepping
    Eigen::MatrixXd cdf = chain.P;
    for (int i = 0; i < cdf.rows(); ++i)
      for (int j = 1; j < cdf.cols(); ++j) cdf(i, j) += cdf(i, j - 1);
    Eigen::VectorXd pi_cdf = pi;
    for (int j = 1; j < pi_cdf.size(); ++j) pi_cdf[j] += pi_cdf[j - 1];

    // squared-error accumulators: [M index][f index]
    Eigen::MatrixXd sq_error = Eigen::MatrixXd::Zero(static_cast<long>(Ms.size()),
                                                     config.mc_functions);
    std::mutex accumulate_mutex;
    parallel_for(config.mc_replicates, config.workers, [&](long rep) {
      RngStream rng = RngStream::derive(config.seed, 0xabcd0000ULL + 1000 * c + static_cast<std::uint64_t>(rep));
      auto draw = [&](const Eigen::VectorXd& cumulative) {
        const double u = rng.uniform();
        for (int s = 0; s < cumulative.size(); ++s)
          if (u < cumulative[s]) return s;
        return static_cast<int>(cumulative.size()) - 1;
      };
      int state = draw(pi_cdf);  // stationary start
      Eigen::VectorXd running = Eigen::VectorXd::Zero(config.mc_functions);
      Eigen::MatrixXd local = Eigen::MatrixXd::Zero(static_cast<long>(Ms.size()),
                                                    config.mc_functions);
      std::size_t m_index = 0;
      for (long step = 1; step <= longest; ++step) {
        state = draw(cdf.row(state).transpose());
        running += f.row(state).transpose();
        if (m_index < Ms.size() && step == Ms[m_index]) {
          for (int j = 0; j < config.mc_functions; ++j) {
            const double err = running[j] / static_cast<double>(step) - f_mean[j];
            local(static_cast<long>(m_index), j) = err * err;
          }
          ++m_index;
        }
      }
      std::lock_guard<std::mutex> lock(accumulate_mutex);
      sq_error += local;
    });
    sq_error /= static_cast<double>(config.mc_replicates);

    for (int j = 0; j < config.mc_functions; ++j) {
      std::vector<double> xs, ys;
      for (std::size_t mi = 0; mi < Ms.size(); ++mi) {
        McErrorCell cell;
        cell.chain_id = c;
        cell.f_id = j;
        cell.M = Ms[mi];
        cell.mse = sq_error(static_cast<long>(mi), j);
        cell.bound = mc_error_bound(kappa, f_var[j], Ms[mi]);
        result.cells.push_back(cell);
        xs.push_back(static_cast<double>(Ms[mi]));
        ys.push_back(std::max(cell.mse, 1e-300));
      }
      result.mse_slope_per_f.push_back(log_log_slope(xs, ys));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Dispatcher, outputs, manifest

namespace {

void write_stability_outputs(const ExperimentConfig& config, const StabilityResult& result,
                             const std::filesystem::path& dir, RunManifest& manifest) {
  {
    CsvWriter iat(dir / "iat.csv", "perturbmc/iat/v1",
                  {"experiment", "h", "coordinate", "replicate", "tau", "ess"});
    iat.comment("seed: " + std::to_string(config.seed));
    for (std::size_t level = 0; level < result.h_levels.size(); ++level) {
      for (int rep = 0; rep < config.replicates; ++rep) {
        const auto& outcome = result.outcomes[level][static_cast<std::size_t>(rep)];
        if (!outcome.ok) continue;
        for (int c = 0; c < outcome.tau.size(); ++c)
          iat.row({config.kind, CsvWriter::num(result.h_levels[level]), std::to_string(c),
                   std::to_string(rep), CsvWriter::num(outcome.tau[c]),
                   CsvWriter::num(outcome.ess[c])});
      }
    }
    manifest.outputs.push_back("iat.csv");
  }
  {
    std::vector<std::string> header = {"h", "replicate", "index"};
    for (int c = 0; c < 8; ++c) header.push_back("x" + std::to_string(c));
    CsvWriter samples(dir / "samples.csv", "perturbmc/samples/v1", header);
    samples.comment("seed: " + std::to_string(config.seed));
    for (std::size_t level = 0; level < result.h_levels.size(); ++level) {
      for (int rep = 0; rep < config.replicates; ++rep) {
        const auto& outcome = result.outcomes[level][static_cast<std::size_t>(rep)];
        if (!outcome.ok) continue;
        for (long i = 0; i < outcome.thinned.rows(); ++i) {
          std::vector<std::string> fields = {CsvWriter::num(result.h_levels[level]),
                                             std::to_string(rep), std::to_string(i)};
          for (int c = 0; c < outcome.thinned.cols(); ++c)
            fields.push_back(CsvWriter::num(outcome.thinned(i, c)));
          samples.row(fields);
        }
      }
    }
    manifest.outputs.push_back("samples.csv");
  }
  {
    CsvWriter reps(dir / "replicates.csv", "perturbmc/replicates/v1",
                   {"h", "replicate", "status", "acceptance", "swap_rate", "burn_in", "seed",
                    "error"});
    reps.comment("seed: " + std::to_string(config.seed));
    for (std::size_t level = 0; level < result.h_levels.size(); ++level) {
      for (int rep = 0; rep < config.replicates; ++rep) {
        const auto& outcome = result.outcomes[level][static_cast<std::size_t>(rep)];
        reps.row({CsvWriter::num(result.h_levels[level]), std::to_string(rep),
                  outcome.ok ? "ok" : "failed", CsvWriter::num(outcome.acceptance),
                  CsvWriter::num(outcome.swap_rate), std::to_string(outcome.burn_in),
                  std::to_string(replicate_seed(config.seed, rep)), outcome.error});
      }
    }
    manifest.outputs.push_back("replicates.csv");
  }
  if (config.kind == "pt") {
    CsvWriter ladder(dir / "ladder.csv", "perturbmc/ladder/v1", {"k", "beta"});
    ladder.comment("seed: " + std::to_string(config.seed));
    for (std::size_t k = 0; k < result.ladder.size(); ++k)
      ladder.row({std::to_string(k), CsvWriter::num(result.ladder[k])});
    manifest.outputs.push_back("ladder.csv");
  }
  {
    // The synthetic observations the posteriors were built on.
    const ObservedData data = synth_data(PPParams{kThetaTrue}, config.h_ref, config.seed);
    CsvWriter obs(dir / "data.csv", "perturbmc/observations/v1", {"time", "species", "value"});
    obs.comment("seed: " + std::to_string(config.seed));
    obs.comment("h_ref: " + CsvWriter::num(config.h_ref));
    for (int i = 0; i < kNumObsTimes; ++i) {
      const double t = 2.0 * (i + 1);
      obs.row({CsvWriter::num(t), "prey", CsvWriter::num(data.y[2 * i])});
      obs.row({CsvWriter::num(t), "predator", CsvWriter::num(data.y[2 * i + 1])});
    }
    manifest.outputs.push_back("data.csv");
  }
}

void write_sweep_outputs(const ExperimentConfig& config, const OracleSweepResult& result,
                         const std::filesystem::path& dir, RunManifest& manifest) {
  CsvWriter sweep(dir / "sweep.csv", "perturbmc/sweep/v1",
                  {"instance", "eps", "op_norm", "kappa_base", "kappa_pert", "chi2", "tv_kernel",
                   "v_norm_kernel"});
  sweep.comment("seed: " + std::to_string(config.seed));
  nlohmann::json exponents = nlohmann::json::array();
  for (std::size_t i = 0; i < result.sweeps.size(); ++i) {
    for (const auto& row : result.sweeps[i].reports)
      sweep.row({result.instance_names[i], CsvWriter::num(row.eps), CsvWriter::num(row.op_norm),
                 CsvWriter::num(row.kappa_base), CsvWriter::num(row.kappa_pert),
                 CsvWriter::num(row.chi2), CsvWriter::num(row.tv_kernel),
                 CsvWriter::num(row.v_norm_kernel)});
    const auto& fitted = result.sweeps[i].fitted;
    nlohmann::json entry;
    entry["instance"] = result.instance_names[i];
    if (fitted.chi2_vs_eps) entry["chi2_vs_eps"] = *fitted.chi2_vs_eps;
    if (fitted.gap_deficit_vs_eps) entry["gap_deficit_vs_eps"] = *fitted.gap_deficit_vs_eps;
    if (fitted.op_norm_vs_eps) entry["op_norm_vs_eps"] = *fitted.op_norm_vs_eps;
    entry["max_gap_deficit_over_eps"] = fitted.max_gap_deficit_over_eps;
    exponents.push_back(entry);
  }
  std::ofstream out(dir / "exponents.json");
  out << exponents.dump(2) << "\n";
  manifest.outputs.push_back("sweep.csv");
  manifest.outputs.push_back("exponents.json");
}

void write_forward_outputs(const ExperimentConfig& config, const ForwardConvergenceResult& result,
                           const std::filesystem::path& dir, RunManifest& manifest) {
  CsvWriter csv(dir / "convergence.csv", "perturbmc/forward-convergence/v1",
                {"j", "h", "l2_error", "log2_ratio", "status"});
  csv.comment("seed: " + std::to_string(config.seed));
  csv.comment("h_ref = h0 * 2^-" + std::to_string(config.j_ref));
  for (std::size_t j = 0; j < result.h.size(); ++j) {
    const double err = result.l2_error[j];
    const bool blowup = !std::isfinite(err);
    const std::string ratio =
        (j < result.log2_ratio.size() && std::isfinite(result.log2_ratio[j]))
            ? CsvWriter::num(result.log2_ratio[j])
            : "";
    csv.row({std::to_string(j), CsvWriter::num(result.h[j]),
             blowup ? "" : CsvWriter::num(err), ratio, blowup ? "blowup" : "ok"});
  }
  manifest.outputs.push_back("convergence.csv");
}

void write_mc_outputs(const ExperimentConfig& config, const McErrorResult& result,
                      const std::filesystem::path& dir, RunManifest& manifest) {
  {
    CsvWriter csv(dir / "mc_error.csv", "perturbmc/mc-error/v1",
                  {"chain", "f", "M", "mse", "bound"});
    csv.comment("seed: " + std::to_string(config.seed));
    csv.comment("replicates: " + std::to_string(config.mc_replicates));
    for (const auto& cell : result.cells)
      csv.row({std::to_string(cell.chain_id), std::to_string(cell.f_id), std::to_string(cell.M),
               CsvWriter::num(cell.mse), CsvWriter::num(cell.bound)});
    manifest.outputs.push_back("mc_error.csv");
  }
  {
    CsvWriter csv(dir / "mc_slopes.csv", "perturbmc/mc-slopes/v1", {"index", "slope"});
    csv.comment("seed: " + std::to_string(config.seed));
    for (std::size_t i = 0; i < result.mse_slope_per_f.size(); ++i)
      csv.row({std::to_string(i), CsvWriter::num(result.mse_slope_per_f[i])});
    manifest.outputs.push_back("mc_slopes.csv");
  }
}

}  // namespace

void RunManifest::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  j["kind"] = kind;
  j["out_dir"] = out_dir;
  j["wall_seconds"] = wall_seconds;
  j["master_seed"] = master_seed;
  j["replicate_seeds"] = replicate_seeds;
  j["outputs"] = outputs;
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("RunManifest: cannot write " + path.string());
  out << j.dump(2) << "\n";
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError("RunManifest: cannot open " + path.string());
  nlohmann::json j;
  in >> j;
  RunManifest manifest;
  manifest.config_hash = j.value("config_hash", "");
  manifest.tool_version = j.value("tool_version", "");
  manifest.kind = j.value("kind", "");
  manifest.out_dir = j.value("out_dir", "");
  manifest.wall_seconds = j.value("wall_seconds", 0.0);
  manifest.master_seed = j.value("master_seed", std::uint64_t{0});
  manifest.replicate_seeds = j.value("replicate_seeds", std::vector<std::uint64_t>{});
  manifest.outputs = j.value("outputs", std::vector<std::string>{});
  return manifest;
}

RunManifest run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_root) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  const std::filesystem::path dir = out_root / config.output;
  std::filesystem::create_directories(dir);

  RunManifest manifest;
  manifest.config_hash = config.canonical_hash();
  manifest.tool_version = kVersion;
  manifest.kind = config.kind;
  manifest.out_dir = config.output;
  manifest.master_seed = config.seed;
  for (int rep = 0; rep < config.replicates; ++rep)
    manifest.replicate_seeds.push_back(replicate_seed(config.seed, rep));

  if (config.kind == "rwm" || config.kind == "mala" || config.kind == "pt") {
    write_stability_outputs(config, run_stability(config), dir, manifest);
  } else if (config.kind == "oracle-sweep") {
    write_sweep_outputs(config, run_oracle_sweep(config), dir, manifest);
  } else if (config.kind == "forward-convergence") {
    write_forward_outputs(config, run_forward_convergence(config), dir, manifest);
  } else if (config.kind == "mc-error") {
    write_mc_outputs(config, run_mc_error(config), dir, manifest);
  } else {
    throw ConfigError("run_experiment: unknown kind '" + config.kind + "'");
  }

  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest.save(dir / "manifest.json");
  return manifest;
}

}  // namespace perturbmc
