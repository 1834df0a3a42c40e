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

#include "perturbmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include "perturbmc/errors.hpp"

namespace perturbmc {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex fftw_plan_mutex;

// Biased autocovariances c_0..c_{max_lag} of a mean-centered copy of x,
// computed in O(n log n) with a zero-padded real FFT.
std::vector<double> autocovariances(std::span<const double> x, int max_lag) {
  const long n = static_cast<long>(x.size());
  long size = 1;
  while (size < 2 * n) size <<= 1;

  const double mean = [&] {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(n);
  }();

  std::vector<double> padded(static_cast<std::size_t>(size), 0.0);
  for (long i = 0; i < n; ++i) padded[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - mean;

  const long n_freq = size / 2 + 1;
  std::vector<fftw_complex> freq(static_cast<std::size_t>(n_freq));
  std::vector<double> back(static_cast<std::size_t>(size));

  fftw_plan forward, inverse;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(size), padded.data(), freq.data(),
                                   FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(static_cast<int>(size), freq.data(), back.data(),
                                   FFTW_ESTIMATE);
  }
  fftw_execute(forward);
  for (long k = 0; k < n_freq; ++k) {
    const double re = freq[static_cast<std::size_t>(k)][0];
    const double im = freq[static_cast<std::size_t>(k)][1];
    freq[static_cast<std::size_t>(k)][0] = re * re + im * im;
    freq[static_cast<std::size_t>(k)][1] = 0.0;
  }
  fftw_execute(inverse);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }

  std::vector<double> cov(static_cast<std::size_t>(max_lag) + 1);
  const double norm = static_cast<double>(size) * static_cast<double>(n);
  for (int t = 0; t <= max_lag; ++t) cov[static_cast<std::size_t>(t)] = back[static_cast<std::size_t>(t)] / norm;
  return cov;
}

}  // namespace

IATResult autocorr_time(std::span<const double> series) {
  const long n = static_cast<long>(series.size());
  if (n < 100) throw std::invalid_argument("autocorr_time: need at least 100 samples");
  for (double v : series)
    if (!std::isfinite(v)) throw std::invalid_argument("autocorr_time: non-finite sample");

  const int max_lag = static_cast<int>(n / 2 - 1);
  std::vector<double> cov = autocovariances(series, max_lag);
  if (cov[0] <= 0.0) throw DegenerateSeriesError("autocorr_time: zero-variance series");

  // Initial positive sequence: include pairs (2m-1, 2m) while their summed
  // autocorrelation stays positive.
  int window = 0;
  double pair_sum = 0.0;
  for (int m = 1; 2 * m <= max_lag; ++m) {
    const double gamma = (cov[static_cast<std::size_t>(2 * m - 1)] +
                          cov[static_cast<std::size_t>(2 * m)]) /
                         cov[0];
    if (gamma <= 0.0) break;
    pair_sum += gamma;
    window = 2 * m;
  }

  IATResult result;
  result.tau = 1.0 + 2.0 * pair_sum;
  result.window = window;
  result.ess = static_cast<double>(n) / result.tau;
  result.autocovariances.assign(cov.begin(), cov.begin() + window + 1);
  return result;
}

double ess(std::span<const double> series) { return autocorr_time(series).ess; }

double mc_error_bound(double kappa_hat, double var_f, long M) {
  if (!(kappa_hat > 0.0) || kappa_hat > 1.0)
    throw std::invalid_argument("mc_error_bound: kappa_hat must lie in (0, 1]");
  if (var_f < 0.0) throw std::invalid_argument("mc_error_bound: var_f must be nonnegative");
  if (M < 1) throw std::invalid_argument("mc_error_bound: M must be >= 1");
  return 2.0 * var_f / (static_cast<double>(M) * (1.0 - std::sqrt(1.0 - kappa_hat)));
}

TVDecay tv_decay(const FiniteChain& chain, int x0, int n_max) {
  const int n = chain.size();
  if (x0 < 0 || x0 >= n) throw std::invalid_argument("tv_decay: x0 out of range");
  if (n_max < 1) throw std::invalid_argument("tv_decay: n_max must be >= 1");
  const Eigen::VectorXd pi = chain.pi ? *chain.pi : stationary(chain);

  TVDecay result;
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(n);
  mu[x0] = 1.0;
  for (int step = 1; step <= n_max; ++step) {
    mu = (mu * chain.P).eval();
    result.distances.push_back((mu.transpose() - pi).lpNorm<1>());
  }

  if (n_max >= 2) {
    const int tail_start = n_max / 2;
    std::vector<double> xs, ys;
    bool any_zero = false;
    for (int i = tail_start; i < n_max; ++i) {
      if (result.distances[static_cast<std::size_t>(i)] <= 0.0) {
        any_zero = true;
        break;
      }
      xs.push_back(static_cast<double>(i + 1));
      ys.push_back(std::log(result.distances[static_cast<std::size_t>(i)]));
    }
    if (any_zero) {
      result.fitted_rate = 0.0;
    } else if (xs.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
      }
      const double m = static_cast<double>(xs.size());
      result.fitted_rate = std::exp((m * sxy - sx * sy) / (m * sxx - sx * sx));
    }
  }
  return result;
}

long suggest_burn_in(const Eigen::MatrixXd& states) {
  const long n = states.rows();
  if (n < 200) return n / 10;
  const long pilot = std::max<long>(100, n / 10);
  double worst_tau = 1.0;
  std::vector<double> column(static_cast<std::size_t>(pilot));
  for (int c = 0; c < states.cols(); ++c) {
    for (long i = 0; i < pilot; ++i) column[static_cast<std::size_t>(i)] = states(i, c);
    try {
      worst_tau = std::max(worst_tau, autocorr_time(column).tau);
    } catch (const DegenerateSeriesError&) {
      // A frozen coordinate in the pilot window contributes no burn-in signal.
    }
  }
  return std::min(static_cast<long>(10.0 * worst_tau), n / 2);
}

}  // namespace perturbmc
