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

#include "perturbmc/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "perturbmc/errors.hpp"

namespace perturbmc {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.begin();
  auto end = s.end();
  while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end != begin && std::isspace(static_cast<unsigned char>(*(end - 1)))) --end;
  return std::string(begin, end);
}

class EntryReader {
 public:
  explicit EntryReader(const std::map<std::string, std::string>& entries) : entries_(entries) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
  }

  double num(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("config: " + key + ": expected a number, got '" + it->second + "'");
    }
  }

  long integer(const std::string& key, long fallback) const {
    const double v = num(key, static_cast<double>(fallback));
    const long rounded = static_cast<long>(v);
    if (static_cast<double>(rounded) != v)
      throw ConfigError("config: " + key + ": expected an integer");
    return rounded;
  }

  std::uint64_t u64(const std::string& key, std::uint64_t fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("config: " + key + ": expected an unsigned integer, got '" + it->second +
                        "'");
    }
  }

  std::vector<double> num_list(const std::string& key, std::vector<double> fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<double> values;
    std::string token;
    std::istringstream in(it->second);
    while (in >> token) {
      if (!token.empty() && token.back() == ',') token.pop_back();
      if (token.empty()) continue;
      try {
        values.push_back(std::stod(token));
      } catch (...) {
        throw ConfigError("config: " + key + ": bad list entry '" + token + "'");
      }
    }
    if (values.empty()) throw ConfigError("config: " + key + ": empty list");
    return values;
  }

 private:
  const std::map<std::string, std::string>& entries_;
};

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError("config: cannot open " + path.string());
  return parse(in, path.string());
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& source_name) {
  std::map<std::string, std::string> entries;
  std::string line, section;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: " + source_name + ":" + std::to_string(line_no) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + source_name + ":" + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: " + source_name + ":" + std::to_string(line_no) + ": empty key");
    const std::string canonical = section.empty() ? key : section + "." + key;
    if (!entries.emplace(canonical, value).second)
      throw ConfigError("config: duplicate key '" + canonical + "'");
  }

  EntryReader reader(entries);
  ExperimentConfig config;
  config.entries = entries;
  config.kind = reader.str("kind", "");
  config.seed = reader.u64("seed", config.seed);
  config.output = reader.str("output", config.kind);

  config.iterations = reader.integer("run.iterations", config.iterations);
  config.replicates = static_cast<int>(reader.integer("run.replicates", config.replicates));
  config.workers = static_cast<int>(reader.integer("run.workers", config.workers));
  config.thin = static_cast<int>(reader.integer("run.thin", config.thin));
  const std::string burn = reader.str("run.burn_in", "auto");
  if (burn == "auto")
    config.burn_in = -1;
  else
    config.burn_in = reader.integer("run.burn_in", -1);

  config.step = reader.num("kernel.step", config.step);
  config.t_k = static_cast<int>(reader.integer("kernel.t_k", config.t_k));
  config.K = static_cast<int>(reader.integer("kernel.K", config.K));
  config.alpha = reader.num("kernel.alpha", config.alpha);

  config.h_levels = reader.num_list("target.h_levels", config.h_levels);
  config.h_ref = reader.num("target.h_ref", config.h_ref);

  config.eps_list = reader.num_list("sweep.eps", config.eps_list);
  config.sweep_chains = static_cast<int>(reader.integer("sweep.chains", config.sweep_chains));
  config.sweep_states = static_cast<int>(reader.integer("sweep.states", config.sweep_states));
  config.grid_cells = static_cast<int>(reader.integer("sweep.grid_cells", config.grid_cells));
  config.grid_halfwidth = reader.num("sweep.grid_halfwidth", config.grid_halfwidth);
  config.grid_step = reader.num("sweep.grid_step", config.grid_step);

  config.h0 = reader.num("forward.h0", config.h0);
  config.j_max = static_cast<int>(reader.integer("forward.j_max", config.j_max));
  config.j_ref = static_cast<int>(reader.integer("forward.j_ref", config.j_ref));

  config.m_list = reader.num_list("mc.m_list", config.m_list);
  config.mc_chains = static_cast<int>(reader.integer("mc.chains", config.mc_chains));
  config.mc_states = static_cast<int>(reader.integer("mc.states", config.mc_states));
  config.mc_replicates = static_cast<int>(reader.integer("mc.replicates", config.mc_replicates));
  config.mc_functions = static_cast<int>(reader.integer("mc.functions", config.mc_functions));
  return config;
}

std::string ExperimentConfig::canonical_hash() const {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto feed = [&hash](const std::string& text) {
    for (unsigned char c : text) {
      hash ^= c;
      hash *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : entries) {  // std::map iterates sorted
    feed(key);
    feed("=");
    feed(value);
    feed("\n");
  }
  char buffer[20];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> kinds = {"oracle-sweep", "rwm",
                                                 "mala",         "pt",
                                                 "forward-convergence", "mc-error"};
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw ConfigError("config: kind: must be one of oracle-sweep|rwm|mala|pt|"
                      "forward-convergence|mc-error, got '" +
                      kind + "'");
  if (output.empty()) throw ConfigError("config: output: must not be empty");
  if (iterations < 1) throw ConfigError("config: run.iterations: must be >= 1");
  if (replicates < 1) throw ConfigError("config: run.replicates: must be >= 1");
  if (workers < 0) throw ConfigError("config: run.workers: must be >= 0");
  if (thin < 1) throw ConfigError("config: run.thin: must be >= 1");

  if (kind == "rwm" || kind == "mala" || kind == "pt") {
    if (h_levels.empty()) throw ConfigError("config: target.h_levels: must be nonempty");
    for (double h : h_levels)
      if (!(h > 0.0)) throw ConfigError("config: target.h_levels: entries must be positive");
    if (!(h_ref > 0.0)) throw ConfigError("config: target.h_ref: must be positive");
    if (!(step > 0.0)) throw ConfigError("config: kernel.step: must be positive");
  }
  if (kind == "pt") {
    if (K < 1) throw ConfigError("config: kernel.K: must be >= 1");
    if (!(alpha > 1.0)) throw ConfigError("config: kernel.alpha: must exceed 1");
    if (t_k < 1) throw ConfigError("config: kernel.t_k: must be >= 1");
  }
  if (kind == "oracle-sweep") {
    if (eps_list.empty()) throw ConfigError("config: sweep.eps: must be nonempty");
    if (sweep_chains < 1) throw ConfigError("config: sweep.chains: must be >= 1");
    if (sweep_states < 2) throw ConfigError("config: sweep.states: must be >= 2");
    if (grid_cells < 2) throw ConfigError("config: sweep.grid_cells: must be >= 2");
  }
  if (kind == "forward-convergence") {
    if (!(h0 > 0.0)) throw ConfigError("config: forward.h0: must be positive");
    if (j_max < 1) throw ConfigError("config: forward.j_max: must be >= 1");
    if (j_ref <= j_max) throw ConfigError("config: forward.j_ref: must exceed j_max");
  }
  if (kind == "mc-error") {
    if (m_list.empty()) throw ConfigError("config: mc.m_list: must be nonempty");
    for (double m : m_list)
      if (m < 1) throw ConfigError("config: mc.m_list: entries must be >= 1");
    if (mc_chains < 1) throw ConfigError("config: mc.chains: must be >= 1");
    if (mc_replicates < 2) throw ConfigError("config: mc.replicates: must be >= 2");
  }
}

}  // namespace perturbmc
