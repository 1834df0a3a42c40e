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

#include <cmath>

#include "perturbmc/densities.hpp"
#include "perturbmc/rng.hpp"
#include "support/oracles.hpp"

using namespace perturbmc;

namespace {

Vector vec1(double x) {
  Vector v(1);
  v[0] = x;
  return v;
}

}  // namespace

TEST_CASE("log_ratio basics") {
  const LogTarget normal = targets::standard_gaussian(1);
  CHECK(log_ratio(normal, vec1(0.0), vec1(0.0)) == 0.0);
  CHECK(log_ratio(normal, vec1(0.0), vec1(1.0)) == doctest::Approx(-0.5).epsilon(1e-15));

  Vector lo = vec1(-1.0), hi = vec1(1.0);
  const LogTarget box = targets::uniform_box(lo, hi);
  CHECK(log_ratio(box, vec1(-0.5), vec1(0.7)) == 0.0);

  CHECK_THROWS_AS(log_ratio(box, vec1(0.0), vec1(2.0)), std::domain_error);
  CHECK_THROWS_AS(log_ratio(box, vec1(-3.0), vec1(0.0)), std::domain_error);
}

TEST_CASE("log_ratio antisymmetry is exact") {
  const LogTarget target = targets::gaussian(Vector::Constant(3, 0.5), Vector::Constant(3, 2.0));
  RngStream rng(11);
  for (int i = 0; i < 200; ++i) {
    const Vector x = rng.normal_vector(3);
    const Vector y = rng.normal_vector(3);
    CHECK(log_ratio(target, x, y) == -log_ratio(target, y, x));
  }
}

TEST_CASE("make_perturbed: zero bump and zero eps are identities") {
  const LogTarget base = targets::standard_gaussian(2);
  Bump zero;
  zero.value = [](const Vector&) { return 0.0; };
  const PerturbedPair pair = make_perturbed(base, zero, 0.1);
  RngStream rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vector x = rng.normal_vector(2);
    CHECK(pair.perturbed.log_density(x) == base.log_density(x));
  }
  CHECK(pair.eps_log == 0.1);
}

TEST_CASE("make_perturbed: sampled deviation stays within eps") {
  const LogTarget base = targets::standard_gaussian(1);
  Bump bump;
  bump.value = [](const Vector& x) { return std::sin(x[0]); };
  const double eps = 0.05;
  const PerturbedPair pair = make_perturbed(base, bump, eps);
  RngStream rng(5);
  double max_dev = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vector x = vec1(3.0 * rng.normal());
    max_dev = std::max(max_dev,
                       std::abs(pair.perturbed.log_density(x) - base.log_density(x)));
  }
  CHECK(max_dev <= eps + 1e-15);
  CHECK(max_dev > 0.04);  // sin attains values near 1 on this sample
}

TEST_CASE("make_perturbed: constant bump cancels in ratios") {
  const LogTarget base = targets::standard_gaussian(1);
  Bump one;
  one.value = [](const Vector&) { return 1.0; };
  const PerturbedPair pair = make_perturbed(base, one, 0.2);
  RngStream rng(7);
  for (int i = 0; i < 200; ++i) {
    const Vector x = vec1(rng.normal());
    const Vector y = vec1(rng.normal());
    CHECK(log_ratio(pair.perturbed, x, y) ==
          doctest::Approx(log_ratio(base, x, y)).epsilon(1e-12));
  }
}

TEST_CASE("make_perturbed: involution up to bump sign") {
  const LogTarget base = targets::standard_gaussian(1);
  Bump bump, negated;
  bump.value = [](const Vector& x) { return std::tanh(x[0]); };
  negated.value = [](const Vector& x) { return -std::tanh(x[0]); };
  const PerturbedPair fwd = make_perturbed(base, bump, 0.3);
  const PerturbedPair back = make_perturbed(fwd.perturbed, negated, 0.3);
  RngStream rng(9);
  for (int i = 0; i < 500; ++i) {
    const Vector x = vec1(2.0 * rng.normal());
    CHECK(back.perturbed.log_density(x) ==
          doctest::Approx(base.log_density(x)).epsilon(0).scale(1.0).epsilon(1e-14));
  }
}

TEST_CASE("make_perturbed rejects negative eps") {
  const LogTarget base = targets::standard_gaussian(1);
  Bump bump;
  bump.value = [](const Vector&) { return 0.5; };
  CHECK_THROWS_AS(make_perturbed(base, bump, -0.01), std::invalid_argument);
}

TEST_CASE("make_perturbed composes gradients when both sides have them") {
  const LogTarget base = targets::standard_gaussian(2);
  Bump bump;
  bump.value = [](const Vector& x) { return std::sin(x[0]) * std::cos(x[1]); };
  bump.gradient = [](const Vector& x) -> Vector {
    Vector g(2);
    g[0] = std::cos(x[0]) * std::cos(x[1]);
    g[1] = -std::sin(x[0]) * std::sin(x[1]);
    return g;
  };
  bump.gradient_sup_bound = std::numbers::sqrt2;
  const double eps = 0.07;
  const PerturbedPair pair = make_perturbed(base, bump, eps);
  REQUIRE(pair.eps_grad.has_value());
  CHECK(*pair.eps_grad == doctest::Approx(eps * std::numbers::sqrt2));
  CHECK(pair.perturbed.has_analytic_gradient());

  RngStream rng(13);
  for (int i = 0; i < 50; ++i) {
    const Vector x = rng.normal_vector(2);
    const Vector expected = base.gradient(x) + eps * bump.gradient(x);
    CHECK((pair.perturbed.gradient(x) - expected).norm() < 1e-14);
  }
}

TEST_CASE("verify_ratio_bound") {
  const LogTarget base = targets::standard_gaussian(1);
  Bump bump;
  bump.value = [](const Vector& x) { return std::sin(2.0 * x[0]); };

  SUBCASE("eps = 0 passes with zero deviation") {
    const PerturbedPair pair = make_perturbed(base, bump, 0.0);
    std::vector<Vector> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(vec1(-3.0 + 0.06 * i));
    const RatioBoundReport report = verify_ratio_bound(pair, pts);
    CHECK(report.max_deviation == 0.0);
    CHECK(report.pass);
  }

  SUBCASE("constructed pair with eps = 0.1 passes on a grid") {
    const PerturbedPair pair = make_perturbed(base, bump, 0.1);
    // Symmetric grid: the sampled median then sits at the bump's center,
    // which is what the offset-removal surrogate assumes.
    std::vector<Vector> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back(vec1(-4.0 + (i + 0.5) * 0.008));
    CHECK(verify_ratio_bound(pair, pts).pass);
  }

  SUBCASE("understated eps_log fails") {
    PerturbedPair pair = make_perturbed(base, bump, 0.5);
    pair.eps_log = 0.1;  // declared bound is a lie
    std::vector<Vector> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back(vec1(-4.0 + (i + 0.5) * 0.008));
    const RatioBoundReport report = verify_ratio_bound(pair, pts);
    CHECK_FALSE(report.pass);
    CHECK(report.max_deviation > 0.4);
  }

  SUBCASE("out-of-support point throws") {
    Vector lo = vec1(-1.0), hi = vec1(1.0);
    const LogTarget box = targets::uniform_box(lo, hi);
    const PerturbedPair pair = make_perturbed(box, bump, 0.1);
    CHECK_THROWS_AS(verify_ratio_bound(pair, {vec1(2.0)}), std::domain_error);
  }

  SUBCASE("empty sample throws") {
    const PerturbedPair pair = make_perturbed(base, bump, 0.1);
    CHECK_THROWS_AS(verify_ratio_bound(pair, {}), std::invalid_argument);
  }
}

TEST_CASE("analytic gradients match finite differences at random interior points") {
  struct Case {
    const char* name;
    LogTarget target;
    double scale;
  };
  const std::vector<Case> cases = {
      {"standard_gaussian", targets::standard_gaussian(3), 1.0},
      {"gaussian", targets::gaussian(Vector::Constant(4, -1.0), Vector::Constant(4, 0.7)), 0.7},
      {"truncated_gaussian", targets::truncated_gaussian_1d(-4.0, 4.0), 1.0},
  };
  RngStream rng(21);
  for (const auto& c : cases) {
    CAPTURE(c.name);
    for (int i = 0; i < 100; ++i) {
      Vector x = rng.normal_vector(c.target.dim()) * 0.8;  // stays interior for the box case
      const Vector analytic = c.target.gradient(x);
      const Vector fd = perturbmc::testing::fd_gradient(
          [&](const Vector& p) { return c.target.log_density(p); }, x, 1e-6 * c.scale);
      const double rel = (analytic - fd).norm() / std::max(1.0, fd.norm());
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("finite-difference fallback gradient agrees with analytic truth") {
  // Same density, one copy without the analytic gradient.
  const LogTarget with_grad = targets::standard_gaussian(2);
  const LogTarget without_grad(
      [](const Vector& x) { return -0.5 * x.squaredNorm(); }, Support::all(2));
  CHECK_FALSE(without_grad.has_analytic_gradient());
  RngStream rng(33);
  for (int i = 0; i < 50; ++i) {
    const Vector x = rng.normal_vector(2);
    CHECK((without_grad.gradient(x) - with_grad.gradient(x)).norm() < 1e-8);
  }
}

TEST_CASE("support handling") {
  Vector lo(2), hi(2);
  lo << -1.0, 0.0;
  hi << 1.0, 2.0;
  const Support box = Support::box(lo, hi);
  CHECK(box.bounded());
  Vector inside(2), outside(2);
  inside << 0.0, 1.0;
  outside << 0.0, 2.5;
  CHECK(box.contains(inside));
  CHECK_FALSE(box.contains(outside));

  const LogTarget target = targets::uniform_box(lo, hi);
  CHECK(target.log_density(inside) == 0.0);
  CHECK(target.log_density(outside) == -std::numeric_limits<double>::infinity());

  CHECK_THROWS_AS(Support::box(hi, lo), std::invalid_argument);
  CHECK_THROWS_AS(Support::all(0), std::invalid_argument);
}
