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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "perturbmc/csv.hpp"
#include "perturbmc/errors.hpp"
#include "perturbmc/experiments.hpp"

using namespace perturbmc;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return ExperimentConfig::parse(in, "inline");
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("perturbmc_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kSmallRwm = R"(
kind = rwm
seed = 4242
output = rwm-small
[run]
iterations = 1500
replicates = 2
thin = 5
workers = 1
[kernel]
step = 2e-6
[target]
h_levels = 0.5 0.25
h_ref = 0.125
)";

}  // namespace

TEST_CASE("config parsing, hashing, and validation") {
  SUBCASE("hash is stable under reordering") {
    const ExperimentConfig a = parse_config(
        "kind = rwm\nseed = 7\n[run]\niterations = 10\nthin = 2\n[kernel]\nstep = 1e-6\n");
    const ExperimentConfig b = parse_config(
        "seed = 7\nkind = rwm\n[kernel]\nstep = 1e-6\n[run]\nthin = 2\niterations = 10\n");
    CHECK(a.canonical_hash() == b.canonical_hash());
    const ExperimentConfig c = parse_config(
        "kind = rwm\nseed = 8\n[run]\niterations = 10\nthin = 2\n[kernel]\nstep = 1e-6\n");
    CHECK(a.canonical_hash() != c.canonical_hash());
  }
  SUBCASE("field-level error messages") {
    CHECK_THROWS_WITH_AS(parse_config("kind = rwm\n[run]\niterations = many\n"),
                         doctest::Contains("run.iterations"), ConfigError);
    const ExperimentConfig bad_kind = parse_config("kind = mcmc\n");
    CHECK_THROWS_WITH_AS(bad_kind.validate(), doctest::Contains("kind"), ConfigError);
    ExperimentConfig bad_reps = parse_config(kSmallRwm);
    bad_reps.replicates = 0;
    CHECK_THROWS_WITH_AS(bad_reps.validate(), doctest::Contains("run.replicates"), ConfigError);
  }
  SUBCASE("duplicate keys are rejected") {
    CHECK_THROWS_AS(parse_config("kind = rwm\nkind = mala\n"), ConfigError);
  }
  SUBCASE("lists parse with commas or spaces") {
    const ExperimentConfig cfg =
        parse_config("kind = oracle-sweep\n[sweep]\neps = 0.2, 0.1, 0.05 0.025\n");
    REQUIRE(cfg.eps_list.size() == 4);
    CHECK(cfg.eps_list[3] == 0.025);
  }
}

TEST_CASE("rwm experiment reruns byte-identically") {
  TempDir dir("determinism");
  const ExperimentConfig config = parse_config(kSmallRwm);
  run_experiment(config, dir.path / "a");
  run_experiment(config, dir.path / "b");
  for (const char* name : {"iat.csv", "samples.csv", "replicates.csv"}) {
    CAPTURE(name);
    CHECK(read_file(dir.path / "a" / "rwm-small" / name) ==
          read_file(dir.path / "b" / "rwm-small" / name));
  }
}

TEST_CASE("worker count does not change results") {
  TempDir dir("workers");
  ExperimentConfig config = parse_config(kSmallRwm);
  config.workers = 1;
  run_experiment(config, dir.path / "serial");
  config.workers = 2;
  run_experiment(config, dir.path / "parallel");
  CHECK(read_file(dir.path / "serial" / "rwm-small" / "iat.csv") ==
        read_file(dir.path / "parallel" / "rwm-small" / "iat.csv"));
  CHECK(read_file(dir.path / "serial" / "rwm-small" / "samples.csv") ==
        read_file(dir.path / "parallel" / "rwm-small" / "samples.csv"));
}

TEST_CASE("oracle sweep writes one row per eps and exponent entries") {
  TempDir dir("sweep");
  ExperimentConfig config = parse_config(R"(
kind = oracle-sweep
seed = 11
output = sweep
[sweep]
eps = 0.2 0.1 0.05 0.025
chains = 2
states = 14
grid_cells = 61
)");
  const RunManifest manifest = run_experiment(config, dir.path);
  const CsvTable table = read_csv(dir.path / "sweep" / "sweep.csv");
  CHECK(table.schema_id == "perturbmc/sweep/v1");
  // 3 instances (2 random + grid) x 4 eps values
  CHECK(table.rows.size() == 12);
  CHECK(fs::exists(dir.path / "sweep" / "exponents.json"));
  CHECK(manifest.kind == "oracle-sweep");
}

TEST_CASE("pt experiment writes the tempering ladder") {
  TempDir dir("ladder");
  ExperimentConfig config = parse_config(R"(
kind = pt
seed = 5
output = pt-small
[run]
iterations = 400
replicates = 1
workers = 1
[kernel]
step = 2e-6
K = 4
alpha = 1.3
[target]
h_levels = 0.5 0.25
h_ref = 0.25
)");
  run_experiment(config, dir.path);
  const CsvTable ladder = read_csv(dir.path / "pt-small" / "ladder.csv");
  REQUIRE(ladder.rows.size() == 5);
  CHECK(std::stod(ladder.rows[0][1]) == doctest::Approx(0.35012779664577565).epsilon(1e-12));
  CHECK(std::stod(ladder.rows[4][1]) == 1.0);
}

TEST_CASE("replicate failures are flagged rows, not aborts") {
  TempDir dir("isolation");
  // 0.3 does not divide the observation spacing: every replicate at that
  // level fails while the 0.5 level proceeds.
  ExperimentConfig config = parse_config(R"(
kind = rwm
seed = 6
output = flagged
[run]
iterations = 1200
replicates = 2
workers = 2
[kernel]
step = 2e-6
[target]
h_levels = 0.5 0.3
h_ref = 0.25
)");
  run_experiment(config, dir.path);
  const CsvTable reps = read_csv(dir.path / "flagged" / "replicates.csv");
  int ok = 0, failed = 0;
  const int status = reps.column("status");
  for (const auto& row : reps.rows) {
    if (row[static_cast<std::size_t>(status)] == "ok")
      ++ok;
    else
      ++failed;
  }
  CHECK(ok == 2);
  CHECK(failed == 2);
  // IAT rows exist only for the healthy level.
  const CsvTable iat = read_csv(dir.path / "flagged" / "iat.csv");
  CHECK(iat.rows.size() == 2 * 8);
}

TEST_CASE("manifest round-trips and lists every output") {
  TempDir dir("manifest");
  const ExperimentConfig config = parse_config(kSmallRwm);
  const RunManifest manifest = run_experiment(config, dir.path);
  for (const auto& rel : manifest.outputs)
    CHECK(fs::exists(dir.path / "rwm-small" / rel));
  const RunManifest loaded = RunManifest::load(dir.path / "rwm-small" / "manifest.json");
  CHECK(loaded.config_hash == manifest.config_hash);
  CHECK(loaded.kind == "rwm");
  CHECK(loaded.replicate_seeds == manifest.replicate_seeds);
}

TEST_CASE("summarize evaluates forward-convergence runs") {
  TempDir dir("forward");
  ExperimentConfig config = parse_config(R"(
kind = forward-convergence
seed = 1
output = fwd
[forward]
h0 = 0.5
j_max = 4
j_ref = 6
)");
  const RunManifest manifest = run_experiment(config, dir.path);
  const auto results = summarize_manifest(manifest, dir.path);
  REQUIRE(results.size() == 1);
  CHECK(results[0].pass);

  std::ostringstream out;
  CHECK(print_summary(results, out) == 0);
  CHECK(out.str().find("[PASS]") != std::string::npos);
}

TEST_CASE("summarize flags an out-of-band result and missing files") {
  TempDir dir("tampered");
  ExperimentConfig config = parse_config(R"(
kind = forward-convergence
seed = 1
output = fwd
[forward]
h0 = 0.5
j_max = 3
j_ref = 6
)");
  const RunManifest manifest = run_experiment(config, dir.path);

  SUBCASE("doctored ratio fails with the measured value in the detail") {
    // Rewrite one log2 ratio out of tolerance.
    const fs::path csv = dir.path / "fwd" / "convergence.csv";
    std::string text = read_file(csv);
    const auto pos = text.rfind("\n2,");
    REQUIRE(pos != std::string::npos);
    CsvTable table = read_csv(csv);
    const int ratio_col = table.column("log2_ratio");
    table.rows[2][static_cast<std::size_t>(ratio_col)] = "3.5";
    std::ofstream out(csv);
    out << "# schema: perturbmc/forward-convergence/v1\nj,h,l2_error,log2_ratio,status\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    }
    out.close();
    const auto results = summarize_manifest(manifest, dir.path);
    CHECK_FALSE(results[0].pass);
    std::ostringstream rendered;
    CHECK(print_summary(results, rendered) == 1);
  }

  SUBCASE("missing outputs raise MissingFileError") {
    fs::remove(dir.path / "fwd" / "convergence.csv");
    CHECK_THROWS_AS(summarize_manifest(manifest, dir.path), MissingFileError);
    RunManifest empty = manifest;
    empty.outputs.clear();
    CHECK_THROWS_AS(summarize_manifest(empty, dir.path), MissingFileError);
  }
}

TEST_CASE("mc-error experiment satisfies its own summary") {
  TempDir dir("mc");
  ExperimentConfig config = parse_config(R"(
kind = mc-error
seed = 3
output = mc
[mc]
m_list = 100 1000 10000
chains = 1
states = 12
replicates = 150
functions = 4
)");
  const RunManifest manifest = run_experiment(config, dir.path);
  const auto results = summarize_manifest(manifest, dir.path);
  REQUIRE(results.size() == 2);
  CHECK(results[0].pass);
  CHECK(results[1].pass);
}

TEST_CASE("ks_distance basics") {
  std::vector<double> a, b;
  for (int i = 0; i < 1000; ++i) {
    a.push_back(i / 1000.0);
    b.push_back(i / 1000.0 + 0.5);  // shifted by half
  }
  CHECK(ks_distance(a, a) == 0.0);
  CHECK(ks_distance(a, b) == doctest::Approx(0.5).epsilon(0.01));
  CHECK_THROWS_AS(ks_distance({}, a), std::invalid_argument);
}

TEST_CASE("chain CSV round-trip") {
  TempDir dir("chaincsv");
  const FiniteChain chain = random_reversible_chain(7, 123);
  const fs::path path = dir.path / "chain.csv";
  write_chain_csv(path, chain);
  const FiniteChain loaded = read_chain_csv(path);
  CHECK((loaded.P - chain.P).cwiseAbs().maxCoeff() == 0.0);  // 17 digits reparse exactly
}
