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

#include "perturbmc/errors.hpp"
#include "perturbmc/finite_oracle.hpp"
#include "perturbmc/inverse_problem.hpp"
#include "perturbmc/ode.hpp"
#include "perturbmc/rng.hpp"
#include "support/oracles.hpp"

using namespace perturbmc;
namespace oracle = perturbmc::testing;

namespace {

const PPParams kTruth{kThetaTrue};

PPParams extinct_start() {
  PPParams p = kTruth;
  p.theta[0] = 0.0;
  p.theta[1] = 0.0;
  return p;
}

}  // namespace

TEST_CASE("integrator harness reproduces the scalar exponential at order 2") {
  // dy/dt = -y, y(0) = 1, over [0, 1]; halving h shrinks the endpoint error
  // by about 4x.
  auto endpoint_error = [](double h) {
    std::array<double, 1> y{1.0};
    const long steps = static_cast<long>(std::llround(1.0 / h));
    const bool ok = heun_integrate<1>(
        [](const std::array<double, 1>& s, std::array<double, 1>& d) { d[0] = -s[0]; }, y, h,
        steps, [](long, const std::array<double, 1>&) {});
    REQUIRE(ok);
    return std::abs(y[0] - std::exp(-1.0));
  };
  std::vector<double> errors;
  for (int j = 0; j <= 4; ++j) errors.push_back(endpoint_error(0.1 * std::pow(2.0, -j)));
  for (std::size_t j = 0; j + 1 < errors.size(); ++j) {
    const double ratio = errors[j] / errors[j + 1];
    CHECK(ratio >= 3.8);
    CHECK(ratio <= 4.2);
  }
}

TEST_CASE("zero initial populations stay at the equilibrium") {
  // The origin is a fixed point of the dynamics: both derivatives vanish, so
  // the integrator must keep the state identically zero.
  const Trajectory traj = rk2_solve(extinct_start(), 0.125, 40.0);
  for (double v : traj.prey) CHECK(v == 0.0);
  for (double v : traj.predator) CHECK(v == 0.0);
}

TEST_CASE("trajectory self-convergence at theta_true") {
  const ForwardSpec fine = ForwardSpec::with_step(0.0625);
  const Eigen::VectorXd f_fine = forward(kTruth, fine);
  double prev = -1.0;
  for (double h : {0.5, 0.25, 0.125}) {
    const double err = (forward(kTruth, ForwardSpec::with_step(h)) - f_fine).norm();
    if (prev > 0.0) {
      const double ratio = prev / err;
      CHECK(ratio > 3.0);  // order-2 with a finite reference
      CHECK(ratio < 6.0);
    }
    prev = err;
  }
}

TEST_CASE("forward returns a finite interleaved 40-vector") {
  const Eigen::VectorXd f = forward(kTruth, ForwardSpec::with_step(0.0078125));
  REQUIRE(f.size() == 40);
  CHECK(f.allFinite());
  // Oscillation: prey rises above its start and falls below it again.
  double max_prey = 0.0, min_prey = 1e9;
  for (int i = 0; i < 40; i += 2) {
    max_prey = std::max(max_prey, f[i]);
    min_prey = std::min(min_prey, f[i]);
  }
  CHECK(max_prey > 60.0);
  CHECK(min_prey < 30.0);
}

TEST_CASE("near-extinction start keeps early observations near zero") {
  // Starting both populations at the prior floor: predation is negligible
  // and the prey recovers logistically, so only the early observations stay
  // small (1e-3 * e^{0.6 t} is still ~0.04 at t = 6).
  PPParams p = kTruth;
  p.theta[0] = kPriorBoxLo;
  p.theta[1] = kPriorBoxLo;
  const Eigen::VectorXd f = forward(p, ForwardSpec::with_step(0.125));
  for (int i = 0; i < 6; ++i) CHECK(std::abs(f[i]) < 0.1);  // t = 2, 4, 6
}

TEST_CASE("blowup maps to an exception from the solver") {
  PPParams explosive = kTruth;
  explosive.theta[6] = 199.0;   // conversion
  explosive.theta[7] = 1e-3;    // death
  CHECK_THROWS_AS(rk2_solve(explosive, 0.125, 40.0), BlowupError);
}

TEST_CASE("step validation") {
  CHECK_THROWS_AS(ForwardSpec::with_step(0.3), std::invalid_argument);
  CHECK_THROWS_AS(ForwardSpec::with_step(-0.1), std::invalid_argument);
  CHECK_NOTHROW(ForwardSpec::with_step(0.5));
  CHECK_NOTHROW(ForwardSpec::with_step(2.0));
}

TEST_CASE("probit transform") {
  SUBCASE("midpoint at zero") {
    const PPParams p = probit_transform(Vector::Zero(8));
    for (double v : p.theta) CHECK(v == doctest::Approx(100.0005).epsilon(1e-12));
  }
  SUBCASE("deep tail pins the lower bound") {
    const PPParams p = probit_transform(Vector::Constant(8, -8.0));
    for (double v : p.theta) {
      CHECK(v > kPriorBoxLo);
      CHECK(v - kPriorBoxLo < 1e-10 * (kPriorBoxHi - kPriorBoxLo));
    }
  }
  SUBCASE("matches a quadrature CDF oracle") {
    const double z = 1.959964;
    const PPParams p = probit_transform(Vector::Constant(8, z));
    const double phi = oracle::normal_cdf_quadrature(z, 20001);
    CHECK(phi == doctest::Approx(0.975).epsilon(1e-6));
    CHECK(p.theta[0] ==
          doctest::Approx(kPriorBoxLo + (kPriorBoxHi - kPriorBoxLo) * phi).epsilon(1e-10));
  }
  SUBCASE("strictly increasing and inside the box") {
    RngStream rng(3);
    for (int i = 0; i < 200; ++i) {
      const double a = 3.0 * rng.normal();
      const double b = a + 0.5 + rng.uniform();
      const double ta = probit_transform(Vector::Constant(8, a)).theta[0];
      const double tb = probit_transform(Vector::Constant(8, b)).theta[0];
      CHECK(tb > ta);
      CHECK(ta > kPriorBoxLo);
      CHECK(tb < kPriorBoxHi);
    }
  }
  SUBCASE("probit_inverse inverts the transform") {
    const Vector x = probit_inverse(kTruth);
    const PPParams back = probit_transform(x);
    for (int i = 0; i < 8; ++i)
      CHECK(back.theta[static_cast<std::size_t>(i)] ==
            doctest::Approx(kThetaTrue[static_cast<std::size_t>(i)]).epsilon(1e-9));
  }
}

TEST_CASE("log posterior") {
  const ObservedData data = synth_data(kTruth, 0.0078125, 2026);
  const ForwardSpec spec = ForwardSpec::with_step(0.125);

  SUBCASE("exactly fit data leaves only the prior") {
    RngStream rng(5);
    const Vector x = 0.3 * rng.normal_vector(8) + probit_inverse(kTruth);
    ObservedData exact = data;
    exact.y = forward(probit_transform(x), spec);
    CHECK(log_posterior(x, spec, exact) == doctest::Approx(-0.5 * x.squaredNorm()).epsilon(1e-12));
  }
  SUBCASE("blowup parameters give -inf") {
    // Push conversion to the top of the box and death to the bottom.
    Vector x = probit_inverse(kTruth);
    x[6] = 8.0;
    x[7] = -8.0;
    CHECK(log_posterior(x, spec, data) == -std::numeric_limits<double>::infinity());
  }
  SUBCASE("finite-difference gradient consistency") {
    const LogTarget target = posterior_target(spec, data);
    RngStream rng(7);
    const Vector x = probit_inverse(kTruth) + 0.05 * rng.normal_vector(8);
    const Vector supplied = target.gradient(x);  // central FD, step 1e-5
    const Vector check = oracle::fd_gradient(
        [&](const Vector& p) { return log_posterior(p, spec, data); }, x, 1e-4);
    CHECK((supplied - check).norm() / check.norm() < 1e-3);
  }
}

TEST_CASE("tempered posterior interpolates the misfit") {
  const ObservedData data = synth_data(kTruth, 0.0078125, 4);
  const ForwardSpec spec = ForwardSpec::with_step(0.25);
  RngStream rng(11);
  for (int i = 0; i < 20; ++i) {
    const Vector x = probit_inverse(kTruth) + 0.1 * rng.normal_vector(8);
    const double prior_only = tempered_log_posterior(x, spec, data, 0.0);
    const double full = tempered_log_posterior(x, spec, data, 1.0);
    const double half = tempered_log_posterior(x, spec, data, 0.5);
    CHECK(prior_only == doctest::Approx(-0.5 * x.squaredNorm()).epsilon(1e-13));
    CHECK(full == doctest::Approx(log_posterior(x, spec, data)).epsilon(1e-13));
    CHECK(half == doctest::Approx(0.5 * (prior_only + full)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(tempered_log_posterior(Vector::Zero(8), spec, data, 1.2),
                  std::invalid_argument);
}

TEST_CASE("synthetic data") {
  SUBCASE("deterministic in the seed") {
    const ObservedData a = synth_data(kTruth, 0.0078125, 99);
    const ObservedData b = synth_data(kTruth, 0.0078125, 99);
    CHECK((a.y - b.y).lpNorm<Eigen::Infinity>() == 0.0);
    const ObservedData c = synth_data(kTruth, 0.0078125, 100);
    CHECK((a.y - c.y).lpNorm<Eigen::Infinity>() > 0.0);
  }
  SUBCASE("40 entries") {
    CHECK(synth_data(kTruth, 0.0078125, 1).y.size() == 40);
  }
  SUBCASE("noise variance near 4 across seeds") {
    const Eigen::VectorXd clean = forward(kTruth, ForwardSpec::with_step(0.0078125));
    Eigen::VectorXd second_moment = Eigen::VectorXd::Zero(40);
    const int n_seeds = 1000;
    for (int seed = 0; seed < n_seeds; ++seed) {
      const ObservedData data = synth_data(kTruth, 0.0078125, 5000 + seed);
      second_moment += (data.y - clean).array().square().matrix();
    }
    second_moment /= n_seeds;
    for (int i = 0; i < 40; ++i) {
      CHECK(second_moment[i] > 3.5);
      CHECK(second_moment[i] < 4.5);
    }
  }
}

TEST_CASE("posterior perturbation shrinks with the forward error") {
  // sup over prior-plausible x of the offset-adjusted log-posterior gap
  // between level h_j and the reference, against the self-convergence proxy
  // eps(h) = ||F_h - F_ref|| at theta_true. The log-log slope should be
  // close to 1.
  const double h_ref = 0.0078125;
  const ObservedData data = synth_data(kTruth, h_ref, 2026);
  const ForwardSpec ref_spec = ForwardSpec::with_step(h_ref);
  const Eigen::VectorXd f_ref = forward(kTruth, ref_spec);

  // Levels inside the asymptotic O(h^2) window: at h = 0.25 a few sample
  // points still carry a visible quadratic misfit remainder, which tilts the
  // fitted exponent.
  const std::vector<double> levels = {0.125, 0.0625, 0.03125, 0.015625};

  // Posterior-plausible points: the per-coordinate posterior scale is about
  // 0.05, so a 0.1 ball covers +-2 posterior standard deviations. Wider
  // prior draws cross the explicit-solver stability boundary at the coarse
  // levels, where log-density gaps say nothing about the perturbation law.
  RngStream rng(13);
  std::vector<Vector> points;
  const Vector anchor = probit_inverse(kTruth);
  while (points.size() < 1000) points.push_back(anchor + 0.1 * rng.normal_vector(8));

  std::vector<double> eps_proxy, sup_gap;
  double previous_gap = std::numeric_limits<double>::infinity();
  for (double h : levels) {
    const ForwardSpec spec = ForwardSpec::with_step(h);
    eps_proxy.push_back((forward(kTruth, spec) - f_ref).norm());
    std::vector<double> deltas;
    for (const Vector& x : points) {
      const double a = log_posterior(x, spec, data);
      const double b = log_posterior(x, ref_spec, data);
      deltas.push_back(a - b);
    }
    std::nth_element(deltas.begin(), deltas.begin() + static_cast<std::ptrdiff_t>(deltas.size() / 2), deltas.end());
    const double median = deltas[deltas.size() / 2];
    double sup = 0.0;
    for (double d : deltas) sup = std::max(sup, std::abs(d - median));
    CHECK(std::isfinite(sup));
    CHECK(sup < previous_gap + 1e-12);  // monotone decreasing in refinement
    previous_gap = sup;
    sup_gap.push_back(sup);
  }
  const double slope = log_log_slope(eps_proxy, sup_gap);
  CHECK(slope > 0.7);
  CHECK(slope < 1.3);
}
