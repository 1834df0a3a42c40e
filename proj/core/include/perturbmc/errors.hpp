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

#include <stdexcept>
#include <string>

namespace perturbmc {

/// Stationary solve requested on a chain whose transition graph is not
/// strongly connected.
struct ReducibleChainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Spectral-gap machinery requested on a chain that fails the reversibility
/// residual check; callers should fall back to operator-norm quantities.
struct NonReversibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Kernel discretization produced a row overshooting probability mass by more
/// than the tolerated quadrature residual (grid too coarse).
struct RenormalizationOverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense-oracle state-count cap exceeded.
struct SizeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ODE state became non-finite or left the admissible range.
struct BlowupError : std::runtime_error {
  BlowupError(const std::string& what, double t_at) : std::runtime_error(what), t(t_at) {}
  double t;
};

/// Series statistics requested on a constant (zero-variance) series.
struct DegenerateSeriesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite value where a finite one is required (e.g. MALA gradient).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Experiment configuration failed validation; message names the field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A manifest or one of its listed outputs is absent.
struct MissingFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace perturbmc
