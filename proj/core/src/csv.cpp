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

#include "perturbmc/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "perturbmc/errors.hpp"

namespace perturbmc {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  return line;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& schema_id,
                     const std::vector<std::string>& header) {
  std::filesystem::create_directories(path.parent_path());
  out_.open(path);
  if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path.string());
  out_ << "# schema: " << schema_id << "\n";
  out_ << join(header) << "\n";
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::row(const std::vector<std::string>& fields) { out_ << join(fields) << "\n"; }

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError("read_csv: cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("schema:");
      if (pos != std::string::npos && table.schema_id.empty()) {
        table.schema_id = line.substr(pos + 7);
        while (!table.schema_id.empty() && table.schema_id.front() == ' ')
          table.schema_id.erase(table.schema_id.begin());
      }
      continue;
    }
    if (!have_header) {
      table.header = split(line);
      have_header = true;
    } else {
      table.rows.push_back(split(line));
    }
  }
  return table;
}

void write_chain_csv(const std::filesystem::path& path, const FiniteChain& chain) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_chain_csv: cannot open " + path.string());
  out << "# schema: perturbmc/chain/v1\n";
  out << chain.size() << "\n";
  for (int i = 0; i < chain.size(); ++i) {
    for (int j = 0; j < chain.size(); ++j) {
      if (j) out << ',';
      out << format_double(chain.P(i, j));
    }
    out << "\n";
  }
}

FiniteChain read_chain_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError("read_chain_csv: cannot open " + path.string());
  std::string line;
  long n = -1;
  Eigen::MatrixXd P;
  long row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (n < 0) {
      n = std::stol(line);
      if (n < 1 || n > kMaxProductStates)
        throw std::invalid_argument("read_chain_csv: bad state count header");
      P.resize(n, n);
      continue;
    }
    const auto fields = split(line);
    if (static_cast<long>(fields.size()) != n || row >= n)
      throw std::invalid_argument("read_chain_csv: malformed row " + std::to_string(row));
    for (long j = 0; j < n; ++j) P(row, j) = std::stod(fields[static_cast<std::size_t>(j)]);
    ++row;
  }
  if (row != n) throw std::invalid_argument("read_chain_csv: truncated matrix");
  return FiniteChain::from_matrix(std::move(P));
}

}  // namespace perturbmc
