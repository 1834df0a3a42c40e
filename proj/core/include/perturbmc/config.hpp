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
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace perturbmc {

/// Experiment configuration, parsed from the sectioned key=value format
/// documented in docs/config.md. Keys are stored canonically as
/// "section.key"; the hash is taken over the sorted canonical entries, so it
/// is stable under reordering of lines and sections.
struct ExperimentConfig {
  // experiment kind: oracle-sweep | rwm | mala | pt | forward-convergence | mc-error
  std::string kind;
  std::uint64_t seed = 1;
  std::string output;  // subdirectory under the output root

  // [run]
  long iterations = 100000;
  int replicates = 20;
  int workers = 0;  // 0 = hardware concurrency
  int thin = 10;
  long burn_in = -1;  // -1 = pilot-IAT rule

  // [kernel]
  double step = 2e-6;
  int t_k = 1;
  int K = 4;
  double alpha = 1.3;

  // [target] (posterior experiments)
  std::vector<double> h_levels{0.25, 0.125, 0.0625};
  double h_ref = 0.0078125;

  // [sweep] (oracle-sweep)
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  int sweep_chains = 20;
  int sweep_states = 40;
  int grid_cells = 101;
  double grid_halfwidth = 4.0;
  double grid_step = 0.5;

  // [forward] (forward-convergence)
  double h0 = 0.5;
  int j_max = 4;
  int j_ref = 6;

  // [mc] (mc-error)
  std::vector<double> m_list{100, 1000, 10000};
  int mc_chains = 3;
  int mc_states = 15;
  int mc_replicates = 200;
  int mc_functions = 10;

  std::map<std::string, std::string> entries;

  static ExperimentConfig load(const std::filesystem::path& path);
  static ExperimentConfig parse(std::istream& in, const std::string& source_name);

  /// FNV-1a over the sorted canonical entries.
  std::string canonical_hash() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

}  // namespace perturbmc
