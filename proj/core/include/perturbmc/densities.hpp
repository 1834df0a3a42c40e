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

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace perturbmc {

using Vector = Eigen::VectorXd;

/// Support descriptor: all of R^dim, or an axis-aligned box.
class Support {
 public:
  static Support all(int dim);
  static Support box(Vector lo, Vector hi);

  int dim() const { return dim_; }
  bool bounded() const { return is_box_; }
  bool contains(const Vector& x) const;
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }

 private:
  Support(int dim, bool is_box, Vector lo, Vector hi);
  int dim_;
  bool is_box_;
  Vector lo_, hi_;
};

/// An unnormalized log-density with an optional analytic gradient. Values are
/// defined up to an additive constant; evaluation outside the support returns
/// -infinity, which makes Metropolis-Hastings acceptance vanish there without
/// a separate rejection path.
///
/// Immutable after construction; evaluation maps must be re-entrant so the
/// same target can be evaluated concurrently from many workers.
class LogTarget {
 public:
  using DensityFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  /// Step used by the central finite-difference gradient fallback.
  static constexpr double kFdStep = 1e-5;

  LogTarget(DensityFn log_density, Support support, GradientFn gradient = nullptr);

  int dim() const { return support_.dim(); }
  const Support& support() const { return support_; }

  double log_density(const Vector& x) const;

  /// Analytic gradient when supplied; otherwise central finite differences of
  /// log_density with step kFdStep per coordinate. May return non-finite
  /// entries near the support boundary; callers that need finiteness check it.
  Vector gradient(const Vector& x) const;

  bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }

 private:
  DensityFn log_density_;
  GradientFn gradient_;
  Support support_;
};

/// log pi(y) - log pi(x); independent of the normalization constant.
/// Throws std::domain_error if either point is outside the support.
double log_ratio(const LogTarget& target, const Vector& x, const Vector& y);

/// A bounded multiplicative tilt of a log-density: |value(x)| <= 1 on the
/// support. gradient / gradient_sup_bound are optional and only feed the
/// perturbed target's gradient and its declared eps_grad.
struct Bump {
  std::function<double(const Vector&)> value;
  LogTarget::GradientFn gradient;
  double gradient_sup_bound = 0.0;
};

/// A base density together with a controlled perturbation of it.
/// eps_log bounds sup |log pi - log pi_hat| up to normalization.
struct PerturbedPair {
  LogTarget base;
  LogTarget perturbed;
  double eps_log = 0.0;
  std::optional<double> eps_grad;
};

/// perturbed.log_density(x) = base.log_density(x) + eps * bump.value(x).
/// Throws std::invalid_argument if eps < 0.
PerturbedPair make_perturbed(const LogTarget& base, Bump bump, double eps);

struct RatioBoundReport {
  double max_deviation = 0.0;   // max |dlog - median offset| over the sample
  double median_offset = 0.0;   // surrogate for the unknown normalization gap
  double eps_log = 0.0;
  bool pass = false;
};

/// Checks the density-ratio hypothesis on a finite sample: after removing the
/// sampled median offset (the normalizing constants of the two densities are
/// unavailable, so the median stands in for the true offset), every log-ratio
/// must lie within eps_log. Throws std::domain_error on out-of-support points.
RatioBoundReport verify_ratio_bound(const PerturbedPair& pair, const std::vector<Vector>& points);

namespace targets {

/// Standard Gaussian on R^dim, analytic gradient.
LogTarget standard_gaussian(int dim);

/// Independent Gaussian with per-coordinate mean and standard deviation.
LogTarget gaussian(Vector mean, Vector sigma);

/// Uniform (log-density 0) on an axis-aligned box.
LogTarget uniform_box(Vector lo, Vector hi);

/// 1-d standard Gaussian restricted to [lo, hi].
LogTarget truncated_gaussian_1d(double lo, double hi);

}  // namespace targets

}  // namespace perturbmc
