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

#include "perturbmc/densities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace perturbmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Support::Support(int dim, bool is_box, Vector lo, Vector hi)
    : dim_(dim), is_box_(is_box), lo_(std::move(lo)), hi_(std::move(hi)) {}

Support Support::all(int dim) {
  if (dim < 1) throw std::invalid_argument("Support: dim must be positive");
  return Support(dim, false, Vector(), Vector());
}

Support Support::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size() || lo.size() == 0)
    throw std::invalid_argument("Support::box: lo/hi must be nonempty and equally sized");
  if ((lo.array() >= hi.array()).any())
    throw std::invalid_argument("Support::box: lo must be strictly below hi");
  const int dim = static_cast<int>(lo.size());
  return Support(dim, true, std::move(lo), std::move(hi));
}

bool Support::contains(const Vector& x) const {
  if (x.size() != dim_) return false;
  if (!is_box_) return true;
  return (x.array() >= lo_.array()).all() && (x.array() <= hi_.array()).all();
}

LogTarget::LogTarget(DensityFn log_density, Support support, GradientFn gradient)
    : log_density_(std::move(log_density)),
      gradient_(std::move(gradient)),
      support_(std::move(support)) {
  if (!log_density_) throw std::invalid_argument("LogTarget: log_density is required");
}

double LogTarget::log_density(const Vector& x) const {
  if (!support_.contains(x)) return kNegInf;
  return log_density_(x);
}

Vector LogTarget::gradient(const Vector& x) const {
  if (gradient_) return gradient_(x);
  Vector g(dim());
  Vector xp = x, xm = x;
  for (int i = 0; i < dim(); ++i) {
    xp[i] = x[i] + kFdStep;
    xm[i] = x[i] - kFdStep;
    g[i] = (log_density(xp) - log_density(xm)) / (2.0 * kFdStep);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

double log_ratio(const LogTarget& target, const Vector& x, const Vector& y) {
  if (!target.support().contains(x) || !target.support().contains(y))
    throw std::domain_error("log_ratio: point outside support");
  return target.log_density(y) - target.log_density(x);
}

PerturbedPair make_perturbed(const LogTarget& base, Bump bump, double eps) {
  if (eps < 0.0) throw std::invalid_argument("make_perturbed: eps must be nonnegative");
  if (!bump.value) throw std::invalid_argument("make_perturbed: bump.value is required");

  auto bump_value = bump.value;
  LogTarget::DensityFn perturbed_density = [base, bump_value, eps](const Vector& x) {
    return base.log_density(x) + eps * bump_value(x);
  };

  LogTarget::GradientFn perturbed_gradient;
  std::optional<double> eps_grad;
  if (base.has_analytic_gradient() && bump.gradient) {
    auto bump_gradient = bump.gradient;
    perturbed_gradient = [base, bump_gradient, eps](const Vector& x) -> Vector {
      return base.gradient(x) + eps * bump_gradient(x);
    };
    eps_grad = eps * bump.gradient_sup_bound;
  }

  LogTarget perturbed(std::move(perturbed_density), base.support(), std::move(perturbed_gradient));
  return PerturbedPair{base, std::move(perturbed), eps, eps_grad};
}

RatioBoundReport verify_ratio_bound(const PerturbedPair& pair, const std::vector<Vector>& points) {
  if (points.empty()) throw std::invalid_argument("verify_ratio_bound: points must be nonempty");

  std::vector<double> deltas;
  deltas.reserve(points.size());
  for (const auto& x : points) {
    if (!pair.base.support().contains(x))
      throw std::domain_error("verify_ratio_bound: point outside support");
    deltas.push_back(pair.perturbed.log_density(x) - pair.base.log_density(x));
  }

  std::vector<double> sorted = deltas;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  double median = *mid;
  if (sorted.size() % 2 == 0) {
    const double upper = *mid;
    std::nth_element(sorted.begin(), mid - 1, sorted.end());
    median = 0.5 * (*(mid - 1) + upper);
  }

  double max_dev = 0.0;
  for (double d : deltas) max_dev = std::max(max_dev, std::abs(d - median));

  RatioBoundReport report;
  report.max_deviation = max_dev;
  report.median_offset = median;
  report.eps_log = pair.eps_log;
  report.pass = max_dev <= pair.eps_log + 1e-12;
  return report;
}

namespace targets {

LogTarget standard_gaussian(int dim) {
  return LogTarget([](const Vector& x) { return -0.5 * x.squaredNorm(); }, Support::all(dim),
                   [](const Vector& x) -> Vector { return -x; });
}

LogTarget gaussian(Vector mean, Vector sigma) {
  if (mean.size() != sigma.size() || mean.size() == 0)
    throw std::invalid_argument("targets::gaussian: mean/sigma size mismatch");
  if ((sigma.array() <= 0.0).any())
    throw std::invalid_argument("targets::gaussian: sigma must be positive");
  const int dim = static_cast<int>(mean.size());
  Vector inv_var = sigma.array().square().inverse();
  return LogTarget(
      [mean, inv_var](const Vector& x) {
        return -0.5 * ((x - mean).array().square() * inv_var.array()).sum();
      },
      Support::all(dim),
      [mean, inv_var](const Vector& x) -> Vector {
        return -((x - mean).array() * inv_var.array()).matrix();
      });
}

LogTarget uniform_box(Vector lo, Vector hi) {
  Support support = Support::box(std::move(lo), std::move(hi));
  const int dim = support.dim();
  return LogTarget([](const Vector&) { return 0.0; }, support,
                   [dim](const Vector&) -> Vector { return Vector::Zero(dim); });
}

LogTarget truncated_gaussian_1d(double lo, double hi) {
  Vector l(1), h(1);
  l[0] = lo;
  h[0] = hi;
  return LogTarget([](const Vector& x) { return -0.5 * x[0] * x[0]; },
                   Support::box(std::move(l), std::move(h)),
                   [](const Vector& x) -> Vector { return -x; });
}

}  // namespace targets

}  // namespace perturbmc
