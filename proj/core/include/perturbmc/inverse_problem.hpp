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
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "perturbmc/densities.hpp"

namespace perturbmc {

/// Predator-prey inference setup: two populations driven by logistic prey
/// growth and a saturating interaction, observed with Gaussian noise at
/// m = 20 regularly spaced times in [2, 40], inferred through a probit
/// reparameterization of a uniform box prior.
///
/// Parameter vector theta = (prey0, pred0, r, K, s, w, u, v), where s scales
/// the interaction term s * prey * pred / (w + prey), u converts consumed
/// prey into predator growth, and v is the predator death rate.
struct PPParams {
  std::array<double, 8> theta{};

  double prey0() const { return theta[0]; }
  double pred0() const { return theta[1]; }
  double growth() const { return theta[2]; }
  double capacity() const { return theta[3]; }
  double interaction() const { return theta[4]; }
  double half_saturation() const { return theta[5]; }
  double conversion() const { return theta[6]; }
  double death() const { return theta[7]; }
};

inline constexpr std::array<double, 8> kThetaTrue = {50.0, 5.0, 0.6, 100.0,
                                                     1.2,  25.0, 0.5, 0.3};
inline constexpr double kPriorBoxLo = 1e-3;
inline constexpr double kPriorBoxHi = 2e2;
inline constexpr int kNumObsTimes = 20;      // observations at t = 2, 4, ..., 40
inline constexpr double kObsNoiseVar = 4.0;
inline constexpr double kMisfitScale = 0.125;  // 1 / (2 * noise variance)

struct Trajectory {
  std::vector<double> t;
  std::vector<double> prey;
  std::vector<double> predator;
};

/// Heun (explicit second-order Runge-Kutta) solve from t = 0, recording every
/// grid time. Throws BlowupError when the state becomes non-finite or leaves
/// [-1e12, 1e12]; callers building posteriors map that to log-density -inf.
Trajectory rk2_solve(const PPParams& params, double h, double t_final);

struct ForwardSpec {
  double h = 0.0;  // RK2 step; must divide the 2.0 observation spacing

  static ForwardSpec with_step(double h);  // validates divisibility
};

/// The forward map F: interleaved (prey, predator) values at the m
/// observation times. Propagates BlowupError.
Eigen::VectorXd forward(const PPParams& params, const ForwardSpec& spec);

/// Componentwise theta_i = lo + (hi - lo) * Phi(x_i); strictly increasing,
/// always inside the prior box.
PPParams probit_transform(const Vector& x);

/// Inverse of the probit map at a given theta; handy for reference starts.
Vector probit_inverse(const PPParams& params);

struct ObservedData {
  Eigen::VectorXd y;  // length 2m
  std::uint64_t seed = 0;
  double h_ref = 0.0;
};

/// y = forward(theta_true at h_ref) + N(0, noise_var I), seeded.
ObservedData synth_data(const PPParams& theta_true, double h_ref, std::uint64_t seed);

/// -||x||^2/2 - (1/8) ||forward(probit(x)) - y||^2, additive constants
/// dropped; -inf on solver blowup (Metropolis-Hastings then rejects).
double log_posterior(const Vector& x, const ForwardSpec& spec, const ObservedData& data);

/// -||x||^2/2 - (beta/8) ||forward(probit(x)) - y||^2; affine in beta.
double tempered_log_posterior(const Vector& x, const ForwardSpec& spec, const ObservedData& data,
                              double beta);

/// LogTarget over R^8 wrapping log_posterior. Gradients come from the
/// central-difference fallback in LogTarget.
LogTarget posterior_target(const ForwardSpec& spec, const ObservedData& data);

/// Tempered variant for a ladder level.
LogTarget tempered_target(const ForwardSpec& spec, const ObservedData& data, double beta);

}  // namespace perturbmc
