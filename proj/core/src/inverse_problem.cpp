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

#include "perturbmc/inverse_problem.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "perturbmc/errors.hpp"
#include "perturbmc/ode.hpp"
#include "perturbmc/rng.hpp"

namespace perturbmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTFinal = 40.0;
constexpr double kObsSpacing = 2.0;

struct PPRhs {
  double r, K, s, w, u, v;

  explicit PPRhs(const PPParams& p)
      : r(p.growth()),
        K(p.capacity()),
        s(p.interaction()),
        w(p.half_saturation()),
        u(p.conversion()),
        v(p.death()) {}

  void operator()(const std::array<double, 2>& y, std::array<double, 2>& dy) const {
    const double prey = y[0];
    const double pred = y[1];
    const double interaction = prey * pred / (w + prey);
    dy[0] = r * prey * (1.0 - prey / K) - s * interaction;
    dy[1] = u * interaction - v * pred;
  }
};

void check_params(const PPParams& params) {
  // Populations may sit exactly at the extinction equilibrium; the model
  // parameters must be strictly positive.
  if (params.prey0() < 0.0 || params.pred0() < 0.0)
    throw std::invalid_argument("PPParams: initial populations must be nonnegative");
  for (std::size_t i = 2; i < params.theta.size(); ++i)
    if (!(params.theta[i] > 0.0))
      throw std::invalid_argument("PPParams: model parameters must be positive");
}

long steps_for(double h, double t_final) {
  if (!(h > 0.0)) throw std::invalid_argument("rk2_solve: h must be positive");
  const long n = static_cast<long>(std::llround(t_final / h));
  if (n < 1 || std::abs(n * h - t_final) > 1e-9 * t_final)
    throw std::invalid_argument("rk2_solve: h must divide the final time");
  return n;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

Trajectory rk2_solve(const PPParams& params, double h, double t_final) {
  check_params(params);
  const long n = steps_for(h, t_final);

  Trajectory traj;
  traj.t.reserve(n + 1);
  traj.prey.reserve(n + 1);
  traj.predator.reserve(n + 1);
  traj.t.push_back(0.0);
  traj.prey.push_back(params.prey0());
  traj.predator.push_back(params.pred0());

  std::array<double, 2> y{params.prey0(), params.pred0()};
  const PPRhs rhs(params);
  const bool ok = heun_integrate<2>(rhs, y, h, n, [&](long step, const std::array<double, 2>& s) {
    traj.t.push_back(step * h);
    traj.prey.push_back(s[0]);
    traj.predator.push_back(s[1]);
  });
  if (!ok)
    throw BlowupError("rk2_solve: state left the admissible range",
                      traj.t.empty() ? 0.0 : traj.t.back());
  return traj;
}

ForwardSpec ForwardSpec::with_step(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("ForwardSpec: h must be positive");
  const long per = static_cast<long>(std::llround(kObsSpacing / h));
  if (per < 1 || std::abs(per * h - kObsSpacing) > 1e-9)
    throw std::invalid_argument("ForwardSpec: h must divide the observation spacing 2.0");
  return ForwardSpec{h};
}

Eigen::VectorXd forward(const PPParams& params, const ForwardSpec& spec) {
  check_params(params);
  const double h = spec.h;
  const long n = steps_for(h, kTFinal);
  const long per = static_cast<long>(std::llround(kObsSpacing / h));

  Eigen::VectorXd out(2 * kNumObsTimes);
  long filled = 0;
  std::array<double, 2> y{params.prey0(), params.pred0()};
  const PPRhs rhs(params);
  const bool ok = heun_integrate<2>(rhs, y, h, n, [&](long step, const std::array<double, 2>& s) {
    if (step % per == 0) {
      out[2 * filled] = s[0];
      out[2 * filled + 1] = s[1];
      ++filled;
    }
  });
  if (!ok) throw BlowupError("forward: solver blowup", 0.0);
  return out;
}

PPParams probit_transform(const Vector& x) {
  if (x.size() != 8) throw std::invalid_argument("probit_transform: x must have 8 coordinates");
  PPParams params;
  for (int i = 0; i < 8; ++i) {
    if (!std::isfinite(x[i])) throw std::invalid_argument("probit_transform: non-finite input");
    params.theta[static_cast<std::size_t>(i)] =
        kPriorBoxLo + (kPriorBoxHi - kPriorBoxLo) * standard_normal_cdf(x[i]);
  }
  return params;
}

Vector probit_inverse(const PPParams& params) {
  Vector x(8);
  for (int i = 0; i < 8; ++i) {
    const double q = (params.theta[static_cast<std::size_t>(i)] - kPriorBoxLo) /
                     (kPriorBoxHi - kPriorBoxLo);
    if (!(q > 0.0 && q < 1.0))
      throw std::domain_error("probit_inverse: theta outside the open prior box");
    // Newton on Phi(x) = q from a Moro-style start; a handful of iterations
    // reaches double precision.
    double x_i = 0.0;
    for (int it = 0; it < 60; ++it) {
      const double f = standard_normal_cdf(x_i) - q;
      const double pdf =
          std::exp(-0.5 * x_i * x_i) / std::sqrt(2.0 * std::numbers::pi);
      const double next = x_i - f / pdf;
      if (std::abs(next - x_i) < 1e-14) {
        x_i = next;
        break;
      }
      x_i = next;
    }
    x[i] = x_i;
  }
  return x;
}

ObservedData synth_data(const PPParams& theta_true, double h_ref, std::uint64_t seed) {
  const ForwardSpec spec = ForwardSpec::with_step(h_ref);
  Eigen::VectorXd y = forward(theta_true, spec);
  RngStream rng = RngStream::derive(seed, 0x0b5e7fedULL);
  const double sd = std::sqrt(kObsNoiseVar);
  for (int i = 0; i < y.size(); ++i) y[i] += sd * rng.normal();
  return ObservedData{std::move(y), seed, h_ref};
}

double log_posterior(const Vector& x, const ForwardSpec& spec, const ObservedData& data) {
  if (data.y.size() != 2 * kNumObsTimes)
    throw std::invalid_argument("log_posterior: data must have 40 entries");
  const double prior = -0.5 * x.squaredNorm();
  try {
    const Eigen::VectorXd g = forward(probit_transform(x), spec);
    return prior - kMisfitScale * (g - data.y).squaredNorm();
  } catch (const BlowupError&) {
    return kNegInf;
  }
}

double tempered_log_posterior(const Vector& x, const ForwardSpec& spec, const ObservedData& data,
                              double beta) {
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument("tempered_log_posterior: beta must lie in [0, 1]");
  const double prior = -0.5 * x.squaredNorm();
  if (beta == 0.0) return prior;
  try {
    const Eigen::VectorXd g = forward(probit_transform(x), spec);
    return prior - beta * kMisfitScale * (g - data.y).squaredNorm();
  } catch (const BlowupError&) {
    return kNegInf;
  }
}

LogTarget posterior_target(const ForwardSpec& spec, const ObservedData& data) {
  return LogTarget([spec, data](const Vector& x) { return log_posterior(x, spec, data); },
                   Support::all(8));
}

LogTarget tempered_target(const ForwardSpec& spec, const ObservedData& data, double beta) {
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument("tempered_target: beta must lie in [0, 1]");
  return LogTarget(
      [spec, data, beta](const Vector& x) { return tempered_log_posterior(x, spec, data, beta); },
      Support::all(8));
}

}  // namespace perturbmc
