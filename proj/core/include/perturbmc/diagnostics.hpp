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

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "perturbmc/finite_oracle.hpp"

namespace perturbmc {

struct IATResult {
  double tau = 1.0;    // integrated autocorrelation time; >= 1 for this estimator
  int window = 0;      // truncation lag W (< n/2)
  double ess = 0.0;    // n / tau
  std::vector<double> autocovariances;  // c_0 .. c_window
};

/// tau = 1 + 2 sum_{t=1}^{W} rho(t), with W chosen by Geyer's
/// initial-positive-sequence rule: sum consecutive lag pairs
/// (rho_{2m-1} + rho_{2m}) and truncate at the first non-positive pair.
/// The estimator needs no tuning parameter, which is why it is the default
/// here. Requires length >= 100; throws DegenerateSeriesError on a constant
/// series.
IATResult autocorr_time(std::span<const double> series);

/// n / tau from autocorr_time.
double ess(std::span<const double> series);

/// Non-asymptotic mean-square error bound for the chain average of f over M
/// steps started from stationarity: 2 var_f / (M (1 - (1 - kappa_hat)^{1/2})).
/// Throws std::invalid_argument unless kappa_hat in (0, 1], var_f >= 0, M >= 1.
double mc_error_bound(double kappa_hat, double var_f, long M);

struct TVDecay {
  std::vector<double> distances;      // ||delta_{x0} P^n - pi||_TV, n = 1..n_max
  std::optional<double> fitted_rate;  // tail-half log-linear fit; absent when n_max < 2
};

/// Exact total-variation decay by dense matrix powers (TV = full L1, the
/// sup_{|f|<=1} convention).
TVDecay tv_decay(const FiniteChain& chain, int x0, int n_max);

/// Burn-in suggestion: 10x the pilot IAT estimated from the first 10% of the
/// chain (max over coordinates), capped at half the chain length.
long suggest_burn_in(const Eigen::MatrixXd& states);

}  // namespace perturbmc
