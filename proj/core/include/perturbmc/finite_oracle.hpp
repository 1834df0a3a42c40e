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
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "perturbmc/densities.hpp"
#include "perturbmc/samplers.hpp"

namespace perturbmc {

/// Dense-oracle cap: states per chain, and states in a PT product space.
inline constexpr int kMaxOracleStates = 2000;
inline constexpr int kMaxProductStates = 10000;

/// A finite-state Markov chain: a row-stochastic matrix, an optional known
/// stationary distribution, and optional state coordinates (set by
/// discretize_kernel so spectra can be traced back to grid points).
///
/// All oracle functions below are pure; chains are safe to share across
/// workers.
struct FiniteChain {
  Eigen::MatrixXd P;
  std::optional<Eigen::VectorXd> pi;
  std::optional<Eigen::MatrixXd> labels;

  int size() const { return static_cast<int>(P.rows()); }

  /// Validates row sums (1 within 1e-12), nonnegativity, and, when pi is
  /// given, that it is a probability vector with ||pi^T P - pi^T||_1 <= 1e-10.
  static FiniteChain from_matrix(Eigen::MatrixXd P,
                                 std::optional<Eigen::VectorXd> pi = std::nullopt,
                                 std::optional<Eigen::MatrixXd> labels = std::nullopt);
};

/// The unique stationary distribution, from the dense linear system
/// pi^T (P - I) = 0, sum pi = 1. Residual <= 1e-10 or it throws.
/// Throws ReducibleChainError when the transition graph is not strongly
/// connected.
Eigen::VectorXd stationary(const FiniteChain& chain);

struct SpectralReport {
  /// Gap in the squared sense: 1 - max_{i>=2} lambda_i^2. This matches the
  /// defining sup of ||Pf - pi f||^2 / ||f - pi f||^2, i.e. the gap of P^2
  /// under the one-sided convention; every downstream inequality check uses
  /// this convention consistently.
  double kappa = 0.0;
  Eigen::VectorXd eigenvalues;  // ascending, includes the unit eigenvalue
  double reversibility_residual = 0.0;
};

/// Spectral gap of a reversible chain via the symmetrized form
/// D^{1/2} P D^{-1/2}. Throws NonReversibleError when the reversibility
/// residual max |pi_i P_ij - pi_j P_ji| exceeds 1e-8 (use op_norm_diff
/// machinery instead in that case).
SpectralReport spectral_gap(const FiniteChain& chain);

/// ||P - Phat||_pi: largest singular value of D^{1/2}(P - Phat)D^{-1/2},
/// which equals sup_f ||(P - Phat) f||_pi / ||f||_pi. Requires strictly
/// positive pi and matching dimensions.
double op_norm_diff(const FiniteChain& P, const FiniteChain& Phat, const Eigen::VectorXd& pi);

/// ||mu - nu||_V = sum_i |mu_i - nu_i| V_i, the discrete sup over |f| <= V.
/// With V == 1 this is the sup_{|f|<=1} total variation convention, equal to
/// the full L1 distance (range [0, 2]).
double v_norm_dist(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu, const Eigen::VectorXd& V);

/// Chi-square divergence sum nu_i^2 / mu_i - 1. Throws on any mu_i <= 0.
double chi2_div(const Eigen::VectorXd& nu, const Eigen::VectorXd& mu);

/// A uniform grid of cell midpoints over an interval or box; the quadrature
/// weight of every cell is cell_volume.
struct UniformGrid {
  Eigen::MatrixXd points;  // n x dim
  double cell_volume = 0.0;

  static UniformGrid interval(double lo, double hi, int n_cells);
  static UniformGrid box(const Vector& lo, const Vector& hi, const std::vector<int>& n_cells);

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

/// Midpoint-quadrature discretization of an MH kernel on a grid covering the
/// target support: off-diagonal P_ij = beta(x_i, x_j) * cell_volume with
/// beta = min{pi(x_j) R(x_j, x_i) / pi(x_i), R(x_i, x_j)}, and the diagonal
/// absorbs rejection mass plus self-density. The returned chain carries the
/// grid-normalized target as pi and the grid points as labels.
///
/// Rows overshooting 1 by more than 1e-3 throw RenormalizationOverflowError
/// (grid too coarse for the proposal scale); smaller overshoots renormalize.
FiniteChain discretize_kernel(const MHKernel& kernel, const UniformGrid& grid);

struct DriftFit {
  double lambda = 0.0;
  double L = 0.0;
};

/// Fits the drift inequality PV <= lambda V + L for a given V >= 1: lambda is
/// the smallest value for which the residual (PV) - lambda V attains its
/// maximum at the argmin-V state, and L is that binding residual's positive
/// part. PV constant gives (0, PV). lambda near (or above) 1 signals a poor V.
DriftFit lyapunov_fit(const FiniteChain& chain, const Eigen::VectorXd& V);

/// Smallest lambda >= 0 with PV <= lambda V + L for a *fixed* L; this is the
/// quantity the drift-transfer inequality moves by at most the kernel V-norm
/// perturbation.
double lyapunov_refit(const FiniteChain& chain, const Eigen::VectorXd& V, double L);

struct ErgodicityRate {
  std::vector<double> r;            // r[n-1] = max_{x,y} ||dx P^n - dy P^n||_V / d_V(x,y)
  std::optional<double> fitted_rate;  // geometric rate from the tail half; absent if n_max < 2
};

/// Exact V-norm contraction coefficients by dense matrix powers, with a
/// log-linear fit of the tail half. r_1 == 0 (one-step coupling) reports
/// rate 0.
ErgodicityRate ergodicity_rate(const FiniteChain& chain, const Eigen::VectorXd& V, int n_max);

/// Exact parallel-tempering kernel on a product space:
/// (M_0 x ... x M_K) * (1/K) sum_k Q_k, where Q_k swaps coordinates k, k+1
/// with the min-ratio acceptance. Product size capped at kMaxProductStates.
/// The returned chain carries Pi = targets_0 x ... x targets_K as pi.
FiniteChain pt_product_kernel(const std::vector<FiniteChain>& level_chains,
                              const std::vector<Eigen::VectorXd>& targets);

/// One row of an epsilon sweep.
struct PerturbationReport {
  double eps = 0.0;
  double op_norm = 0.0;        // ||P - Phat||_pi
  double kappa_base = 0.0;
  double kappa_pert = 0.0;
  double chi2 = 0.0;           // D_chi2(pi_hat || pi)
  double tv_kernel = 0.0;      // max_x ||dx P - dx Phat||_TV  (range [0,2])
  double v_norm_kernel = 0.0;  // max_x ||dx P - dx Phat||_V / V(x)
};

struct FittedExponents {
  std::optional<double> chi2_vs_eps;
  std::optional<double> gap_deficit_vs_eps;  // slope of (kappa - kappa_hat)+ vs eps
  std::optional<double> op_norm_vs_eps;
  double max_gap_deficit_over_eps = 0.0;     // max_eps (kappa - kappa_hat)+ / eps
};

struct SweepResult {
  std::vector<PerturbationReport> reports;
  FittedExponents fitted;
};

/// A family of perturbed chains indexed by eps; chain_at(0) must be the base.
struct PerturbationFamily {
  std::function<FiniteChain(double)> chain_at;
  Eigen::VectorXd V;  // for the V-norm kernel distance; empty means V == 1
};

/// Runs the family over the eps list (>= 4 positive values spanning >= 8x),
/// computes every PerturbationReport field against the base chain, and fits
/// log-log slopes. Slopes are absent when fewer than two strictly positive
/// values are available to regress on.
SweepResult perturbation_sweep(const PerturbationFamily& family, const std::vector<double>& eps_list);

/// pi_hat = normalize(pi * exp(eps * b)); Phat re-Metropolizes the base
/// off-diagonals by min{1, exp(eps (b_j - b_i))}. Keeps reversibility, so the
/// perturbed gap is well defined.
PerturbationFamily density_reweight_family(const FiniteChain& base, const Eigen::VectorXd& bump,
                                           Eigen::VectorXd V = Eigen::VectorXd());

/// Phat = (1 - c*eps) P + c*eps * I (lazier chain, same stationary measure).
PerturbationFamily lazy_mix_family(const FiniteChain& base, double c = 1.0,
                                   Eigen::VectorXd V = Eigen::VectorXd());

/// Discretized MH chains targeting make_perturbed(base, bump, eps).
PerturbationFamily grid_mh_family(const LogTarget& base, Bump bump, double step,
                                  const UniformGrid& grid);

/// Least-squares slope of log(y) against log(x); inputs must be positive.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Metropolis chain on dense random symmetric proposal weights targeting a
/// random strictly positive pi; seeded, irreducible and exactly reversible.
/// laziness in [0, 1) mixes toward the identity, pushing the spectrum toward
/// positive eigenvalues.
FiniteChain random_reversible_chain(int n, std::uint64_t seed, double laziness = 0.0);

}  // namespace perturbmc
