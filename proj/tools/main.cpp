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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "perturbmc/csv.hpp"
#include "perturbmc/errors.hpp"
#include "perturbmc/experiments.hpp"
#include "perturbmc/inverse_problem.hpp"
#include "perturbmc/samplers.hpp"
#include "perturbmc/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace perturbmc;

fs::path output_root(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("PERTURBMC_OUT")) return env;
  return "out";
}

int cmd_run(const std::string& config_path, const std::string& out_flag, bool have_seed,
            std::uint64_t seed) {
  ExperimentConfig config = ExperimentConfig::load(config_path);
  if (have_seed) {
    config.seed = seed;
    config.entries["seed"] = std::to_string(seed);
  }
  config.validate();
  const fs::path root = output_root(out_flag);
  const RunManifest manifest = run_experiment(config, root);
  std::cout << "experiment: " << manifest.kind << "\n"
            << "config hash: " << manifest.config_hash << "\n"
            << "outputs under: " << (root / manifest.out_dir).string() << "\n"
            << "wall seconds: " << manifest.wall_seconds << "\n"
            << "manifest: " << (root / manifest.out_dir / "manifest.json").string() << "\n";
  return 0;
}

int cmd_summarize(const std::string& manifest_path, const std::string& out_flag) {
  const RunManifest manifest = RunManifest::load(manifest_path);
  fs::path root = output_root(out_flag);
  // A manifest path like <root>/<out_dir>/manifest.json pins the root.
  const fs::path parent = fs::path(manifest_path).parent_path();
  if (!manifest.out_dir.empty() && parent.filename() == fs::path(manifest.out_dir).filename())
    root = parent.parent_path().empty() ? fs::path(".") : parent.parent_path();
  const auto results = summarize_manifest(manifest, root);
  const int failures = print_summary(results, std::cout);
  return failures == 0 ? 0 : 1;
}

int cmd_ladder(int K, double alpha, const std::string& out_path) {
  const std::vector<double> beta = tempering_ladder(K, alpha);
  if (out_path.empty()) {
    std::cout << "k,beta\n";
    for (std::size_t k = 0; k < beta.size(); ++k)
      std::cout << k << "," << format_double(beta[k]) << "\n";
  } else {
    CsvWriter csv(out_path, "perturbmc/ladder/v1", {"k", "beta"});
    for (std::size_t k = 0; k < beta.size(); ++k)
      csv.row({std::to_string(k), CsvWriter::num(beta[k])});
  }
  return 0;
}

int cmd_oracle_gap(const std::string& chain_path) {
  const FiniteChain loaded = read_chain_csv(chain_path);
  FiniteChain chain = loaded;
  chain.pi = stationary(loaded);
  const SpectralReport report = spectral_gap(chain);
  std::cout << "states: " << chain.size() << "\n"
            << "spectral gap (kappa): " << format_double(report.kappa) << "\n"
            << "reversibility residual: " << format_double(report.reversibility_residual) << "\n"
            << "second eigenvalue: "
            << format_double(report.eigenvalues[chain.size() > 1 ? chain.size() - 2 : 0]) << "\n";
  return 0;
}

int cmd_forward(const std::vector<double>& theta, double h, const std::string& out_path) {
  if (theta.size() != 8) throw std::invalid_argument("forward: --theta needs 8 values");
  PPParams params;
  for (std::size_t i = 0; i < 8; ++i) params.theta[i] = theta[i];
  const Trajectory traj = rk2_solve(params, h, 40.0);
  if (out_path.empty()) {
    std::cout << "time,species,value\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
      std::cout << format_double(traj.t[i]) << ",prey," << format_double(traj.prey[i]) << "\n";
      std::cout << format_double(traj.t[i]) << ",predator," << format_double(traj.predator[i])
                << "\n";
    }
  } else {
    CsvWriter csv(out_path, "perturbmc/trajectory/v1", {"time", "species", "value"});
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
      csv.row({CsvWriter::num(traj.t[i]), "prey", CsvWriter::num(traj.prey[i])});
      csv.row({CsvWriter::num(traj.t[i]), "predator", CsvWriter::num(traj.predator[i])});
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perturbmc: perturbed MCMC samplers, finite-chain oracles, and the predator-prey "
               "inverse problem"};
  app.set_version_flag("--version", perturbmc::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_flag, manifest_path, chain_path, file_out;
  std::uint64_t seed = 0;
  bool have_seed = false;
  int K = 4;
  double alpha = 1.3, h = 0.0078125;
  std::vector<double> theta;

  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--out", out_flag, "Output root (or PERTURBMC_OUT env var; default ./out)");
  run->add_option("--seed", seed, "Override the config master seed")
      ->each([&have_seed](const std::string&) { have_seed = true; });

  auto* summarize = app.add_subcommand("summarize", "Evaluate acceptance criteria for a run");
  summarize->add_option("manifest", manifest_path, "manifest.json of a run")->required();
  summarize->add_option("--out", out_flag, "Output root the manifest lives under");

  auto* ladder = app.add_subcommand("ladder", "Print a tempering ladder");
  ladder->add_option("--K", K, "Level count minus one")->required();
  ladder->add_option("--alpha", alpha, "Ladder spacing parameter (> 1)")->required();
  ladder->add_option("--file", file_out, "Write CSV here instead of stdout");

  auto* oracle = app.add_subcommand("oracle", "Finite-chain oracle utilities");
  oracle->require_subcommand(1);
  auto* gap = oracle->add_subcommand("gap", "Spectral gap of a chain stored as CSV");
  gap->add_option("chain", chain_path, "Chain CSV (header n, then the matrix)")->required();

  auto* fwd =
      app.add_subcommand("forward", "Solve the predator-prey system and dump the trajectory");
  fwd->set_help_flag("--help", "Print this help message and exit");
  fwd->add_option("--theta", theta, "8 parameter values")->expected(8)->required();
  fwd->add_option("--h", h, "RK2 step size")->required();
  fwd->add_option("--file", file_out, "Write CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, out_flag, have_seed, seed);
    if (*summarize) return cmd_summarize(manifest_path, out_flag);
    if (*ladder) return cmd_ladder(K, alpha, file_out);
    if (*oracle) return cmd_oracle_gap(chain_path);
    if (*fwd) return cmd_forward(theta, h, file_out);
  } catch (const perturbmc::MissingFileError& e) {
    std::cerr << "missing file: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
