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

#include <array>
#include <cmath>
#include <cstddef>

namespace perturbmc {

inline constexpr double kOdeBlowupLimit = 1e12;

template <std::size_t N>
bool ode_state_ok(const std::array<double, N>& y) {
  for (double v : y) {
    if (!std::isfinite(v) || std::abs(v) > kOdeBlowupLimit) return false;
  }
  return true;
}

/// Explicit second-order Runge-Kutta (Heun: full-step predictor, trapezoidal
/// corrector). Calls observer(step_index, y) after every step; returns false
/// as soon as the state leaves the admissible range (non-finite or beyond
/// kOdeBlowupLimit), leaving y at the last good value.
template <std::size_t N, class Rhs, class Observer>
bool heun_integrate(Rhs&& rhs, std::array<double, N>& y, double h, long n_steps,
                    Observer&& observer) {
  std::array<double, N> k1{}, k2{}, predictor{};
  for (long step = 1; step <= n_steps; ++step) {
    rhs(y, k1);
    for (std::size_t i = 0; i < N; ++i) predictor[i] = y[i] + h * k1[i];
    if (!ode_state_ok(predictor)) return false;
    rhs(predictor, k2);
    for (std::size_t i = 0; i < N; ++i) y[i] += 0.5 * h * (k1[i] + k2[i]);
    if (!ode_state_ok(y)) return false;
    observer(step, y);
  }
  return true;
}

}  // namespace perturbmc
