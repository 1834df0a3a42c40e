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
#include <cstring>
#include <set>

#include "perturbmc/diagnostics.hpp"
#include "perturbmc/errors.hpp"
#include "perturbmc/finite_oracle.hpp"
#include "perturbmc/samplers.hpp"
#include "support/oracles.hpp"

using namespace perturbmc;
namespace oracle = perturbmc::testing;

namespace {

Vector vec1(double x) {
  Vector v(1);
  v[0] = x;
  return v;
}

double simulated_acceptance(const MHKernel& kernel, const Vector& x0, long n,
                            std::uint64_t seed, std::vector<double>* indicators = nullptr) {
  const Trace trace = run_chain(kernel, x0, n, seed);
  if (indicators) {
    indicators->clear();
    indicators->reserve(static_cast<std::size_t>(n));
    Vector prev = x0;
    for (long i = 0; i < n; ++i) {
      const Vector cur = trace.states.row(i).transpose();
      indicators->push_back(cur == prev ? 0.0 : 1.0);
      prev = cur;
    }
  }
  return static_cast<double>(trace.acceptance_count) / static_cast<double>(n);
}

}  // namespace

TEST_CASE("rwm on a uniform box accepts interior proposals and rejects exits") {
  Vector lo = vec1(-1.0), hi = vec1(1.0);
  const MHKernel kernel = MHKernel::random_walk(targets::uniform_box(lo, hi), 0.15);
  RngStream rng(1);
  Vector x = vec1(0.0);
  long rejected = 0;
  for (int i = 0; i < 2000; ++i) {
    const StepResult step = rwm_step(kernel, x, rng);
    CHECK(kernel.target.support().contains(step.state));
    if (!step.accepted) {
      CHECK(step.state == x);  // rejected moves stay put
      ++rejected;
    }
    x = step.state;
  }
  // sqrt(2h) ~ 0.55 against a width-2 box: plenty of proposals must exit.
  CHECK(rejected > 100);
}

TEST_CASE("rwm acceptance rate matches the quadrature oracle") {
  const MHKernel kernel = MHKernel::random_walk(targets::standard_gaussian(1), 0.5);
  const double expected = oracle::acceptance_rate_quadrature(kernel, -8.0, 8.0, 1601);
  std::vector<double> indicators;
  const double rate = simulated_acceptance(kernel, vec1(0.0), 100000, 17, &indicators);
  const double se = oracle::batch_means_se(indicators, 100);
  CHECK(std::abs(rate - expected) < 3.0 * se);
}

TEST_CASE("mala proposal equal to the current point is always accepted") {
  const MHKernel kernel = MHKernel::langevin(targets::standard_gaussian(2), 0.1);
  Vector x(2);
  x << 0.7, -0.3;
  CHECK(mala_log_accept_ratio(kernel, x, x) == 0.0);
}

TEST_CASE("mala acceptance rate matches the quadrature oracle") {
  const MHKernel kernel = MHKernel::langevin(targets::standard_gaussian(1), 0.1);
  const double expected = oracle::acceptance_rate_quadrature(kernel, -8.0, 8.0, 1601);
  std::vector<double> indicators;
  const double rate = simulated_acceptance(kernel, vec1(0.0), 100000, 19, &indicators);
  const double se = oracle::batch_means_se(indicators, 100);
  CHECK(std::abs(rate - expected) < 3.0 * se);
}

TEST_CASE("mala with zero drift reduces to rwm") {
  Vector lo = vec1(-2.0), hi = vec1(2.0);
  const LogTarget box = targets::uniform_box(lo, hi);
  const MHKernel rwm = MHKernel::random_walk(box, 0.3);
  const MHKernel mala = MHKernel::langevin(box, 0.3);
  std::vector<double> ind_rwm, ind_mala;
  const double rate_rwm = simulated_acceptance(rwm, vec1(0.0), 100000, 23, &ind_rwm);
  const double rate_mala = simulated_acceptance(mala, vec1(0.0), 100000, 29, &ind_mala);
  const double se = std::hypot(oracle::batch_means_se(ind_rwm, 100),
                               oracle::batch_means_se(ind_mala, 100));
  CHECK(std::abs(rate_rwm - rate_mala) < 3.0 * se);
}

TEST_CASE("mala requires a finite gradient") {
  // log pi = -1/x on (0, inf)-ish box: gradient explodes at the boundary.
  Vector lo = vec1(0.0), hi = vec1(10.0);
  const LogTarget target(
      [](const Vector& x) { return x[0] > 0 ? -1.0 / x[0] : -1e300; },
      Support::box(lo, hi),
      [](const Vector& x) -> Vector {
        Vector g(1);
        g[0] = x[0] > 0 ? 1.0 / (x[0] * x[0]) : std::numeric_limits<double>::infinity();
        return g;
      });
  const MHKernel kernel = MHKernel::langevin(target, 0.1);
  RngStream rng(5);
  CHECK_THROWS_AS(mala_step(kernel, vec1(0.0), rng), NumericError);
}

TEST_CASE("run_chain basics") {
  const MHKernel kernel = MHKernel::random_walk(targets::standard_gaussian(1), 0.5);

  SUBCASE("single-step trace") {
    const Trace trace = run_chain(kernel, vec1(0.2), 1, 3);
    CHECK(trace.n() == 1);
    CHECK(trace.acceptance_count <= 1);
  }
  SUBCASE("identical seeds replay bit-identical traces") {
    const Trace a = run_chain(kernel, vec1(0.2), 5000, 99);
    const Trace b = run_chain(kernel, vec1(0.2), 5000, 99);
    REQUIRE(a.states.size() == b.states.size());
    CHECK(std::memcmp(a.states.data(), b.states.data(),
                      sizeof(double) * static_cast<std::size_t>(a.states.size())) == 0);
    CHECK(a.acceptance_count == b.acceptance_count);
    const Trace c = run_chain(kernel, vec1(0.2), 5000, 100);
    CHECK(std::memcmp(a.states.data(), c.states.data(),
                      sizeof(double) * static_cast<std::size_t>(a.states.size())) != 0);
  }
  SUBCASE("long-run mean concentrates near zero") {
    const Trace trace = run_chain(kernel, vec1(0.0), 100000, 7);
    std::vector<double> series(static_cast<std::size_t>(trace.n()));
    for (long i = 0; i < trace.n(); ++i) series[static_cast<std::size_t>(i)] = trace.states(i, 0);
    const double mean = [&] {
      double s = 0.0;
      for (double v : series) s += v;
      return s / static_cast<double>(series.size());
    }();
    double sd = 0.0;
    for (double v : series) sd += (v - mean) * (v - mean);
    sd = std::sqrt(sd / static_cast<double>(series.size()));
    const double n_eff = ess(series);
    CHECK(std::abs(mean) < 4.0 * sd / std::sqrt(n_eff));
  }
  SUBCASE("bad starts are rejected") {
    Vector lo = vec1(-1.0), hi = vec1(1.0);
    const MHKernel boxed = MHKernel::random_walk(targets::uniform_box(lo, hi), 0.1);
    CHECK_THROWS_AS(run_chain(boxed, vec1(5.0), 10, 1), std::domain_error);
  }
}

TEST_CASE("tempering ladder") {
  const std::vector<double> beta = tempering_ladder(4, 1.3);
  REQUIRE(beta.size() == 5);
  CHECK(beta[4] == 1.0);
  CHECK(beta[0] == doctest::Approx(0.3501277966457756).epsilon(1e-12));
  for (std::size_t k = 1; k < beta.size(); ++k) CHECK(beta[k] > beta[k - 1]);

  const std::vector<double> two = tempering_ladder(1, 2.0);
  CHECK(two[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(two[1] == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(tempering_ladder(0, 1.3), std::invalid_argument);
  CHECK_THROWS_AS(tempering_ladder(3, 1.0), std::invalid_argument);
}

TEST_CASE("pt swap probability") {
  const LogTarget narrow = targets::gaussian(Vector::Zero(1), Vector::Constant(1, 1.0));
  const LogTarget wide = targets::gaussian(Vector::Zero(1), Vector::Constant(1, std::numbers::sqrt2));

  CHECK(pt_swap_prob(narrow, narrow, vec1(0.3), vec1(-1.2)) == 1.0);
  CHECK(pt_swap_prob(narrow, wide, vec1(0.4), vec1(0.4)) == 1.0);

  // Direct arithmetic oracle from the four log-densities.
  const Vector x = vec1(0.0), x1 = vec1(1.0);
  const double expected = std::exp(std::min(
      0.0, narrow.log_density(x1) + wide.log_density(x) - narrow.log_density(x) -
               wide.log_density(x1)));
  CHECK(pt_swap_prob(narrow, wide, x, x1) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(expected == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
}

TEST_CASE("pt swap statistics approach 1 for identical levels") {
  const LogTarget target = targets::standard_gaussian(1);
  PTConfig config;
  config.levels.push_back(PTLevel{MHKernel::random_walk(target, 0.5), 1});
  config.levels.push_back(PTLevel{MHKernel::random_walk(target, 0.5), 1});
  PTSampler sampler(config, {vec1(0.0), vec1(0.5)}, 31);
  for (int i = 0; i < 4000; ++i) sampler.step();
  const SwapStats& stats = sampler.swap_stats();
  REQUIRE(stats.attempts[0] == 4000);
  CHECK(stats.accepts[0] == stats.attempts[0]);  // ratios cancel exactly
}

TEST_CASE("pt replays bit-identically under a fixed seed") {
  const LogTarget target = targets::standard_gaussian(2);
  PTConfig config;
  for (double beta : tempering_ladder(2, 1.5))
    config.levels.push_back(PTLevel{
        MHKernel::random_walk(
            targets::gaussian(Vector::Zero(2), Vector::Constant(2, 1.0 / std::sqrt(beta))), 0.4),
        1});
  (void)target;
  std::vector<Vector> init(3, Vector::Zero(2));
  const PTRunResult a = pt_run(config, init, 500, 77);
  const PTRunResult b = pt_run(config, init, 500, 77);
  for (std::size_t l = 0; l < a.level_traces.size(); ++l)
    CHECK(std::memcmp(a.level_traces[l].states.data(), b.level_traces[l].states.data(),
                      sizeof(double) * static_cast<std::size_t>(a.level_traces[l].states.size())) ==
          0);
}

TEST_CASE("frozen finite level kernels leave only swaps") {
  // Identity level kernels: replica values can only permute.
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::VectorXd pi = oracle::random_distribution(4, 3);
  FinitePTSampler sampler({identity, identity, identity}, {pi, pi, pi}, {0, 1, 2}, 13);
  const std::multiset<int> original = {0, 1, 2};
  for (int i = 0; i < 1000; ++i) {
    sampler.step();
    std::multiset<int> current(sampler.state().begin(), sampler.state().end());
    CHECK(current == original);
  }
}

TEST_CASE("finite pt empirical transitions match the exact product kernel") {
  // K = 1 over 4-state levels; compare visit-conditional transition
  // frequencies against pt_product_kernel rows within 4 SE.
  const FiniteChain M0 = random_reversible_chain(4, 51, 0.2);
  const FiniteChain M1 = random_reversible_chain(4, 52, 0.2);
  const FiniteChain product = pt_product_kernel({M0, M1}, {*M0.pi, *M1.pi});

  FinitePTSampler sampler({M0.P, M1.P}, {*M0.pi, *M1.pi}, {0, 0}, 53);
  const long n = 400000;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(16, 16);
  int state = sampler.product_index();
  for (long i = 0; i < n; ++i) {
    sampler.step();
    const int next = sampler.product_index();
    counts(state, next) += 1.0;
    state = next;
  }
  for (int s = 0; s < 16; ++s) {
    const double visits = counts.row(s).sum();
    REQUIRE(visits > 500);
    for (int t = 0; t < 16; ++t) {
      const double p = product.P(s, t);
      const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) * visits);
      CHECK(std::abs(counts(s, t) - visits * p) <= 4.0 * se + 1.0);
    }
  }
}

TEST_CASE("discretized MH kernels satisfy detailed balance to 1e-10") {
  for (const bool langevin : {false, true}) {
    const LogTarget target = targets::truncated_gaussian_1d(-4.0, 4.0);
    const MHKernel kernel = langevin ? MHKernel::langevin(target, 0.1)
                                     : MHKernel::random_walk(target, 0.5);
    const FiniteChain chain = discretize_kernel(kernel, UniformGrid::interval(-4.0, 4.0, 101));
    const Eigen::VectorXd pi = *chain.pi;
    double residual = 0.0;
    for (int i = 0; i < chain.size(); ++i)
      for (int j = 0; j < chain.size(); ++j)
        residual =
            std::max(residual, std::abs(pi[i] * chain.P(i, j) - pi[j] * chain.P(j, i)));
    CHECK(residual < 1e-10);
  }
}

TEST_CASE("swap sub-kernel satisfies the reversibility identity") {
  // nu(x) Q(x, S(x)) == nu(S(x)) Q(S(x), x) on a discrete product space.
  const Eigen::VectorXd pi0 = oracle::random_distribution(4, 61);
  const Eigen::VectorXd pi1 = oracle::random_distribution(4, 62);
  double residual = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double nu_x = pi0[a] * pi1[b];
      const double nu_sx = pi0[b] * pi1[a];
      const double q_fwd = swap_accept_prob(std::log(pi0[a]), std::log(pi0[b]),
                                            std::log(pi1[a]), std::log(pi1[b]));
      const double q_bwd = swap_accept_prob(std::log(pi0[b]), std::log(pi0[a]),
                                            std::log(pi1[b]), std::log(pi1[a]));
      residual = std::max(residual, std::abs(nu_x * q_fwd - nu_sx * q_bwd));
    }
  }
  CHECK(residual < 1e-10);
}
