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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "perturbmc/finite_oracle.hpp"

namespace perturbmc {

/// 17-significant-digit decimal rendering; reparses to the same double.
std::string format_double(double value);

/// CSV with a schema-id comment line, a header row, and %.17g floats.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& schema_id,
            const std::vector<std::string>& header);

  void comment(const std::string& text);
  void row(const std::vector<std::string>& fields);

  static std::string num(double value) { return format_double(value); }

 private:
  std::ofstream out_;
};

struct CsvTable {
  std::string schema_id;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::filesystem::path& path);

/// Chain matrix format: schema comment, a line with the state count n, then
/// n comma-separated rows.
void write_chain_csv(const std::filesystem::path& path, const FiniteChain& chain);
FiniteChain read_chain_csv(const std::filesystem::path& path);

}  // namespace perturbmc
