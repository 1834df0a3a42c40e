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

#include "perturbmc/finite_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "perturbmc/errors.hpp"
#include "perturbmc/rng.hpp"

namespace perturbmc {

namespace {

void check_distribution(const Eigen::VectorXd& p, const char* what) {
  if ((p.array() < -1e-15).any()) throw std::invalid_argument(std::string(what) + ": negative entry");
  if (std::abs(p.sum() - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(what) + ": does not sum to 1");
}

// Strong connectivity of the positive-entry digraph.
bool strongly_connected(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  auto reach_all = [n](auto edge) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        if (!seen[v] && edge(u, v)) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reach_all([&](int u, int v) { return P(u, v) > 0.0; }) &&
         reach_all([&](int u, int v) { return P(v, u) > 0.0; });
}

double stationarity_residual(const Eigen::VectorXd& pi, const Eigen::MatrixXd& P) {
  return ((P.transpose() * pi) - pi).lpNorm<1>();
}

Eigen::VectorXd ones_like(const Eigen::VectorXd& maybe, int n) {
  return maybe.size() == n ? maybe : Eigen::VectorXd::Ones(n);
}

}  // namespace

FiniteChain FiniteChain::from_matrix(Eigen::MatrixXd P, std::optional<Eigen::VectorXd> pi,
                                     std::optional<Eigen::MatrixXd> labels) {
  if (P.rows() != P.cols() || P.rows() == 0)
    throw std::invalid_argument("FiniteChain: P must be square and nonempty");
  if (P.rows() > kMaxProductStates)
    throw SizeLimitError("FiniteChain: state count exceeds the dense-oracle cap");
  if ((P.array() < -1e-15).any())
    throw std::invalid_argument("FiniteChain: negative transition probability");
  for (int i = 0; i < P.rows(); ++i) {
    if (std::abs(P.row(i).sum() - 1.0) > 1e-12)
      throw std::invalid_argument("FiniteChain: row " + std::to_string(i) +
                                  " does not sum to 1 within 1e-12");
  }
  P = P.cwiseMax(0.0);
  if (pi) {
    check_distribution(*pi, "FiniteChain pi");
    if (stationarity_residual(*pi, P) > 1e-10)
      throw std::invalid_argument("FiniteChain: declared pi is not stationary within 1e-10");
  }
  if (labels && labels->rows() != P.rows())
    throw std::invalid_argument("FiniteChain: labels row count mismatch");
  return FiniteChain{std::move(P), std::move(pi), std::move(labels)};
}

Eigen::VectorXd stationary(const FiniteChain& chain) {
  const int n = chain.size();
  if (n == 1) return Eigen::VectorXd::Ones(1);
  if (!strongly_connected(chain.P)) throw ReducibleChainError("stationary: chain is reducible");

  // pi^T (P - I) = 0 with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd A = chain.P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[n - 1] = 1.0;
  Eigen::VectorXd pi = A.partialPivLu().solve(b);

  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  if (stationarity_residual(pi, chain.P) > 1e-10)
    throw std::runtime_error("stationary: linear solve residual exceeds 1e-10");
  return pi;
}

SpectralReport spectral_gap(const FiniteChain& chain) {
  const int n = chain.size();
  const Eigen::VectorXd pi = chain.pi ? *chain.pi : stationary(chain);
  if ((pi.array() <= 0.0).any())
    throw NonReversibleError("spectral_gap: stationary distribution has zero mass states");

  double residual = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      residual = std::max(residual, std::abs(pi[i] * chain.P(i, j) - pi[j] * chain.P(j, i)));
  if (residual > 1e-8)
    throw NonReversibleError(
        "spectral_gap: reversibility residual " + std::to_string(residual) +
        " exceeds 1e-8; use op_norm machinery for non-reversible kernels");

  const Eigen::VectorXd root = pi.array().sqrt();
  Eigen::MatrixXd S =
      root.asDiagonal() * chain.P * root.array().inverse().matrix().asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_gap: eigensolver failed");
  Eigen::VectorXd eigs = solver.eigenvalues();  // ascending

  SpectralReport report;
  report.eigenvalues = eigs;
  report.reversibility_residual = residual;
  if (n == 1) {
    report.kappa = 1.0;
    return report;
  }
  // Drop one copy of the unit eigenvalue (the constant direction); the gap is
  // over the non-constant part of the spectrum, in the squared sense.
  double max_sq = 0.0;
  for (int i = 0; i < n - 1; ++i) max_sq = std::max(max_sq, eigs[i] * eigs[i]);
  report.kappa = 1.0 - max_sq;
  return report;
}

double op_norm_diff(const FiniteChain& P, const FiniteChain& Phat, const Eigen::VectorXd& pi) {
  if (P.size() != Phat.size() || pi.size() != P.size())
    throw std::invalid_argument("op_norm_diff: dimension mismatch");
  if ((pi.array() <= 0.0).any())
    throw std::invalid_argument("op_norm_diff: pi must be strictly positive");
  const Eigen::VectorXd root = pi.array().sqrt();
  const Eigen::MatrixXd B =
      root.asDiagonal() * (P.P - Phat.P) * root.array().inverse().matrix().asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(B);
  return svd.singularValues()(0);
}

double v_norm_dist(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                   const Eigen::VectorXd& V) {
  if (mu.size() != nu.size() || mu.size() != V.size())
    throw std::invalid_argument("v_norm_dist: dimension mismatch");
  if ((V.array() < 1.0 - 1e-12).any())
    throw std::invalid_argument("v_norm_dist: V must be >= 1");
  return ((mu - nu).cwiseAbs().array() * V.array()).sum();
}

double chi2_div(const Eigen::VectorXd& nu, const Eigen::VectorXd& mu) {
  if (nu.size() != mu.size()) throw std::invalid_argument("chi2_div: dimension mismatch");
  if ((mu.array() <= 0.0).any())
    throw std::domain_error("chi2_div: mu has a zero (or negative) entry");
  const double value = (nu.array().square() / mu.array()).sum() - 1.0;
  return std::max(value, 0.0);
}

UniformGrid UniformGrid::interval(double lo, double hi, int n_cells) {
  if (!(hi > lo) || n_cells < 2)
    throw std::invalid_argument("UniformGrid::interval: need hi > lo and >= 2 cells");
  const double delta = (hi - lo) / n_cells;
  Eigen::MatrixXd points(n_cells, 1);
  for (int i = 0; i < n_cells; ++i) points(i, 0) = lo + (i + 0.5) * delta;
  return UniformGrid{std::move(points), delta};
}

UniformGrid UniformGrid::box(const Vector& lo, const Vector& hi, const std::vector<int>& n_cells) {
  const int d = static_cast<int>(lo.size());
  if (hi.size() != d || static_cast<int>(n_cells.size()) != d || d == 0)
    throw std::invalid_argument("UniformGrid::box: dimension mismatch");
  long total = 1;
  Eigen::VectorXd delta(d);
  for (int a = 0; a < d; ++a) {
    if (!(hi[a] > lo[a]) || n_cells[a] < 1)
      throw std::invalid_argument("UniformGrid::box: bad axis " + std::to_string(a));
    delta[a] = (hi[a] - lo[a]) / n_cells[a];
    total *= n_cells[a];
    if (total > kMaxOracleStates)
      throw SizeLimitError("UniformGrid::box: grid exceeds the dense-oracle cap");
  }
  Eigen::MatrixXd points(total, d);
  std::vector<int> idx(d, 0);
  for (long row = 0; row < total; ++row) {
    for (int a = 0; a < d; ++a) points(row, a) = lo[a] + (idx[a] + 0.5) * delta[a];
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < n_cells[a]) break;
      idx[a] = 0;
    }
  }
  double volume = 1.0;
  for (int a = 0; a < d; ++a) volume *= delta[a];
  return UniformGrid{std::move(points), volume};
}

FiniteChain discretize_kernel(const MHKernel& kernel, const UniformGrid& grid) {
  const int n = grid.size();
  const int d = grid.dim();
  if (n > kMaxOracleStates)
    throw SizeLimitError("discretize_kernel: grid exceeds the dense-oracle cap");
  if (d != kernel.target.dim())
    throw std::invalid_argument("discretize_kernel: grid/target dimension mismatch");
  const double h = kernel.step;
  const double log_norm = -0.5 * d * std::log(4.0 * std::numbers::pi * h);

  Eigen::VectorXd logp(n);
  std::vector<Vector> pts(n);
  for (int i = 0; i < n; ++i) {
    pts[i] = grid.points.row(i).transpose();
    logp[i] = kernel.target.log_density(pts[i]);
    if (!std::isfinite(logp[i]))
      throw std::invalid_argument("discretize_kernel: grid point outside target support");
  }
  std::vector<Vector> grad(n);
  if (kernel.proposal == Proposal::kLangevin) {
    for (int i = 0; i < n; ++i) {
      grad[i] = kernel.target.gradient(pts[i]);
      if (!grad[i].allFinite())
        throw NumericError("discretize_kernel: non-finite gradient at a grid point");
    }
  }

  auto log_q = [&](int from, int to) {
    if (kernel.proposal == Proposal::kRandomWalk)
      return log_norm - (pts[to] - pts[from]).squaredNorm() / (4.0 * h);
    return log_norm - (pts[to] - pts[from] - h * grad[from]).squaredNorm() / (4.0 * h);
  };

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  double worst_excess = 0.0;
  for (int i = 0; i < n; ++i) {
    double off_mass = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      // beta = min{pi_j q_ji, pi_i q_ij} / pi_i; the min is symmetric in
      // (i, j), which is what makes the discretized chain exactly reversible.
      const double log_beta = std::min(logp[j] + log_q(j, i), logp[i] + log_q(i, j)) - logp[i];
      const double p = std::exp(log_beta) * grid.cell_volume;
      P(i, j) = p;
      off_mass += p;
    }
    if (off_mass <= 1.0) {
      P(i, i) = 1.0 - off_mass;
    } else {
      const double excess = off_mass - 1.0;
      if (excess > 1e-3)
        throw RenormalizationOverflowError(
            "discretize_kernel: quadrature residual " + std::to_string(excess) +
            " exceeds 1e-3 (grid too coarse)");
      P.row(i) /= off_mass;
      worst_excess = std::max(worst_excess, excess);
    }
  }

  Eigen::VectorXd pi = (logp.array() - logp.maxCoeff()).exp();
  pi /= pi.sum();

  FiniteChain chain{std::move(P), std::nullopt, grid.points};
  if (stationarity_residual(pi, chain.P) <= 1e-10)
    chain.pi = std::move(pi);
  else
    chain.pi = stationary(chain);  // a renormalized row broke exact balance
  return chain;
}

DriftFit lyapunov_fit(const FiniteChain& chain, const Eigen::VectorXd& V) {
  if (V.size() != chain.size()) throw std::invalid_argument("lyapunov_fit: V size mismatch");
  if ((V.array() < 1.0 - 1e-12).any())
    throw std::invalid_argument("lyapunov_fit: V must be >= 1");
  const Eigen::VectorXd PV = chain.P * V;

  int i0 = 0;
  V.minCoeff(&i0);
  double lambda = 0.0;
  for (int i = 0; i < V.size(); ++i) {
    const double dv = V[i] - V[i0];
    if (dv > 1e-12) lambda = std::max(lambda, (PV[i] - PV[i0]) / dv);
  }
  const double L = std::max(0.0, (PV - lambda * V).maxCoeff());
  return DriftFit{lambda, L};
}

double lyapunov_refit(const FiniteChain& chain, const Eigen::VectorXd& V, double L) {
  if (V.size() != chain.size()) throw std::invalid_argument("lyapunov_refit: V size mismatch");
  const Eigen::VectorXd PV = chain.P * V;
  return std::max(0.0, ((PV.array() - L) / V.array()).maxCoeff());
}

ErgodicityRate ergodicity_rate(const FiniteChain& chain, const Eigen::VectorXd& V, int n_max) {
  const int n = chain.size();
  if (V.size() != n) throw std::invalid_argument("ergodicity_rate: V size mismatch");
  if (n_max < 1) throw std::invalid_argument("ergodicity_rate: n_max must be >= 1");

  ErgodicityRate result;
  Eigen::MatrixXd Pn = chain.P;
  for (int step = 1; step <= n_max; ++step) {
    double worst = 0.0;
    for (int x = 0; x < n; ++x) {
      for (int y = x + 1; y < n; ++y) {
        const double dist = ((Pn.row(x) - Pn.row(y)).cwiseAbs().array() *
                             V.transpose().array())
                                .sum();
        worst = std::max(worst, dist / (V[x] + V[y]));
      }
    }
    result.r.push_back(worst);
    if (step < n_max) Pn = (Pn * chain.P).eval();
  }

  if (n_max >= 2) {
    const int tail_start = n_max / 2;
    bool any_zero = false;
    std::vector<double> xs, ys;
    for (int i = tail_start; i < n_max; ++i) {
      if (result.r[i] <= 0.0) {
        any_zero = true;
        break;
      }
      xs.push_back(static_cast<double>(i + 1));
      ys.push_back(std::log(result.r[i]));
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
  } else if (result.r[0] <= 0.0) {
    result.fitted_rate = 0.0;
  }
  return result;
}

FiniteChain pt_product_kernel(const std::vector<FiniteChain>& level_chains,
                              const std::vector<Eigen::VectorXd>& targets) {
  const int levels = static_cast<int>(level_chains.size());
  if (levels < 2 || targets.size() != level_chains.size())
    throw std::invalid_argument("pt_product_kernel: need >= 2 levels with matching targets");
  const int K = levels - 1;

  std::vector<int> sizes(levels);
  long total = 1;
  for (int k = 0; k < levels; ++k) {
    sizes[k] = level_chains[k].size();
    if (targets[k].size() != sizes[k])
      throw std::invalid_argument("pt_product_kernel: target size mismatch at level " +
                                  std::to_string(k));
    if ((targets[k].array() <= 0.0).any())
      throw std::invalid_argument("pt_product_kernel: targets must be strictly positive");
    total *= sizes[k];
    if (total > kMaxProductStates)
      throw SizeLimitError("pt_product_kernel: product space exceeds the cap");
  }
  const int N = static_cast<int>(total);

  auto decode = [&](int index, std::vector<int>& state) {
    for (int k = levels - 1; k >= 0; --k) {
      state[k] = index % sizes[k];
      index /= sizes[k];
    }
  };
  auto encode = [&](const std::vector<int>& state) {
    int index = 0;
    for (int k = 0; k < levels; ++k) index = index * sizes[k] + state[k];
    return index;
  };

  // M = M_0 x ... x M_K
  Eigen::MatrixXd M(N, N);
  {
    std::vector<int> si(levels), sj(levels);
    for (int i = 0; i < N; ++i) {
      decode(i, si);
      for (int j = 0; j < N; ++j) {
        decode(j, sj);
        double p = 1.0;
        for (int k = 0; k < levels; ++k) p *= level_chains[k].P(si[k], sj[k]);
        M(i, j) = p;
      }
    }
  }

  // Q = (1/K) sum_k Q_k with the min-ratio swap acceptance.
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
  {
    std::vector<int> s(levels);
    for (int i = 0; i < N; ++i) {
      decode(i, s);
      for (int k = 0; k < K; ++k) {
        const double ratio = (targets[k][s[k + 1]] * targets[k + 1][s[k]]) /
                             (targets[k][s[k]] * targets[k + 1][s[k + 1]]);
        const double a = std::min(1.0, ratio);
        std::swap(s[k], s[k + 1]);
        const int swapped = encode(s);
        std::swap(s[k], s[k + 1]);
        Q(i, swapped) += a / K;
        Q(i, i) += (1.0 - a) / K;
      }
    }
  }

  Eigen::MatrixXd P = M * Q;
  for (int i = 0; i < N; ++i) {
    const double row_sum = P.row(i).sum();
    if (std::abs(row_sum - 1.0) > 1e-9)
      throw std::runtime_error("pt_product_kernel: row mass drifted beyond 1e-9");
    P.row(i) /= row_sum;
  }

  Eigen::VectorXd Pi(N);
  {
    std::vector<int> s(levels);
    for (int i = 0; i < N; ++i) {
      decode(i, s);
      double mass = 1.0;
      for (int k = 0; k < levels; ++k) mass *= targets[k][s[k]];
      Pi[i] = mass;
    }
    Pi /= Pi.sum();
  }
  return FiniteChain::from_matrix(std::move(P), std::move(Pi));
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("log_log_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw std::invalid_argument("log_log_slope: inputs must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(x.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

SweepResult perturbation_sweep(const PerturbationFamily& family,
                               const std::vector<double>& eps_list) {
  if (eps_list.size() < 4)
    throw std::invalid_argument("perturbation_sweep: need >= 4 eps values");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double e : eps_list) {
    if (e < 0.0) throw std::invalid_argument("perturbation_sweep: eps must be nonnegative");
    if (e > 0.0) {
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
  }
  if (!(hi / lo >= 8.0 * (1.0 - 1e-12)))
    throw std::invalid_argument("perturbation_sweep: eps values must span at least 8x");

  const FiniteChain base = family.chain_at(0.0);
  const Eigen::VectorXd pi = base.pi ? *base.pi : stationary(base);
  const Eigen::VectorXd V = ones_like(family.V, base.size());
  const double kappa_base = spectral_gap(base).kappa;

  SweepResult result;
  for (double eps : eps_list) {
    const FiniteChain pert = family.chain_at(eps);
    if (pert.size() != base.size())
      throw std::invalid_argument("perturbation_sweep: family changed state space size");
    const Eigen::VectorXd pi_hat = pert.pi ? *pert.pi : stationary(pert);

    PerturbationReport row;
    row.eps = eps;
    row.kappa_base = kappa_base;
    row.kappa_pert = spectral_gap(pert).kappa;
    row.op_norm = op_norm_diff(base, pert, pi);
    row.chi2 = chi2_div(pi_hat, pi);
    double tv = 0.0, vnorm = 0.0;
    for (int x = 0; x < base.size(); ++x) {
      const Eigen::ArrayXd diff = (base.P.row(x) - pert.P.row(x)).cwiseAbs().transpose().array();
      tv = std::max(tv, diff.sum());
      vnorm = std::max(vnorm, (diff * V.array()).sum() / V[x]);
    }
    row.tv_kernel = tv;
    row.v_norm_kernel = vnorm;
    result.reports.push_back(row);
  }

  auto fit = [&](auto value_of) -> std::optional<double> {
    std::vector<double> xs, ys;
    for (const auto& row : result.reports) {
      const double v = value_of(row);
      if (row.eps > 0.0 && v > 0.0) {
        xs.push_back(row.eps);
        ys.push_back(v);
      }
    }
    if (xs.size() < 2) return std::nullopt;
    return log_log_slope(xs, ys);
  };
  result.fitted.chi2_vs_eps = fit([](const PerturbationReport& r) { return r.chi2; });
  result.fitted.op_norm_vs_eps = fit([](const PerturbationReport& r) { return r.op_norm; });
  result.fitted.gap_deficit_vs_eps =
      fit([](const PerturbationReport& r) { return std::max(0.0, r.kappa_base - r.kappa_pert); });
  double worst = 0.0;
  for (const auto& row : result.reports)
    if (row.eps > 0.0)
      worst = std::max(worst, std::max(0.0, row.kappa_base - row.kappa_pert) / row.eps);
  result.fitted.max_gap_deficit_over_eps = worst;
  return result;
}

PerturbationFamily density_reweight_family(const FiniteChain& base, const Eigen::VectorXd& bump,
                                           Eigen::VectorXd V) {
  if (bump.size() != base.size())
    throw std::invalid_argument("density_reweight_family: bump size mismatch");
  const Eigen::VectorXd pi = base.pi ? *base.pi : stationary(base);
  const Eigen::MatrixXd P = base.P;
  auto chain_at = [P, pi, bump](double eps) {
    const int n = static_cast<int>(P.rows());
    Eigen::MatrixXd Phat = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      double off = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double accept = std::min(1.0, std::exp(eps * (bump[j] - bump[i])));
        Phat(i, j) = P(i, j) * accept;
        off += Phat(i, j);
      }
      Phat(i, i) = 1.0 - off;
    }
    Eigen::VectorXd pi_hat = (pi.array().log() + eps * bump.array()).exp();
    pi_hat /= pi_hat.sum();
    return FiniteChain::from_matrix(std::move(Phat), std::move(pi_hat));
  };
  return PerturbationFamily{chain_at, std::move(V)};
}

PerturbationFamily lazy_mix_family(const FiniteChain& base, double c, Eigen::VectorXd V) {
  const Eigen::MatrixXd P = base.P;
  const std::optional<Eigen::VectorXd> pi = base.pi;
  auto chain_at = [P, pi, c](double eps) {
    const double t = c * eps;
    if (t < 0.0 || t >= 1.0)
      throw std::invalid_argument("lazy_mix_family: c*eps must lie in [0, 1)");
    const int n = static_cast<int>(P.rows());
    Eigen::MatrixXd Phat = (1.0 - t) * P + t * Eigen::MatrixXd::Identity(n, n);
    return FiniteChain::from_matrix(std::move(Phat), pi);
  };
  return PerturbationFamily{chain_at, std::move(V)};
}

FiniteChain random_reversible_chain(int n, std::uint64_t seed, double laziness) {
  if (n < 2) throw std::invalid_argument("random_reversible_chain: need n >= 2");
  if (laziness < 0.0 || laziness >= 1.0)
    throw std::invalid_argument("random_reversible_chain: laziness must lie in [0, 1)");
  RngStream rng(seed);

  Eigen::VectorXd pi(n);
  for (int i = 0; i < n; ++i) pi[i] = std::exp(0.8 * rng.normal());
  pi /= pi.sum();

  Eigen::MatrixXd W(n, n);
  for (int i = 0; i < n; ++i) {
    W(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) W(i, j) = W(j, i) = 0.05 + rng.uniform();
  }
  const double scale = W.rowwise().sum().maxCoeff() * 1.05;

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      P(i, j) = (W(i, j) / scale) * std::min(1.0, pi[j] / pi[i]);
      off += P(i, j);
    }
    P(i, i) = 1.0 - off;
  }
  if (laziness > 0.0)
    P = ((1.0 - laziness) * P + laziness * Eigen::MatrixXd::Identity(n, n)).eval();
  return FiniteChain::from_matrix(std::move(P), std::move(pi));
}

PerturbationFamily grid_mh_family(const LogTarget& base, Bump bump, double step,
                                  const UniformGrid& grid) {
  auto chain_at = [base, bump, step, grid](double eps) {
    if (eps == 0.0) return discretize_kernel(MHKernel::random_walk(base, step), grid);
    const PerturbedPair pair = make_perturbed(base, bump, eps);
    return discretize_kernel(MHKernel::random_walk(pair.perturbed, step), grid);
  };
  return PerturbationFamily{chain_at, Eigen::VectorXd()};
}

}  // namespace perturbmc
