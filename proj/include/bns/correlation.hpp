#pragma once

#include <span>
#include <string>
#include <vector>

#include "bns/simulate.hpp"

namespace bns {

// Inputs for the log-return correlation formulas. Integrated variances come
// from a deterministic/expected sigma^2 path; jump functionals default to
// the expected-quadratic-jump convention J(s) = s * lambda * Var(Z_1), which
// makes Corr(X_s, X_s) = 1. jump_s/jump_b_s may instead carry realized sums
// from a path ledger (exploration mode).
struct CorrInputs {
  double s = 0.0;
  double t = 0.0;
  double int_var_s = 0.0;  // integral of sigma^2 over [0, s]
  double int_var_t = 0.0;
  double rho = 0.0;
  double lambda = 1.0;
  double theta = 0.0;
  double var_z1 = 0.0;
  double var_zb1 = 0.0;
  double jump_s = 0.0;    // J(s)
  double jump_b_s = 0.0;  // J^b(s)

  // expected-jump convention, constant sigma^2
  static CorrInputs expected_const_var(double s, double t, double sigma_sq,
                                       double rho, double lambda,
                                       double var_z1, double theta = 0.0,
                                       double var_zb1 = 0.0);
  // expected-jump convention with caller-supplied integrated variances
  static CorrInputs expected(double s, double t, double int_var_s,
                             double int_var_t, double rho, double lambda,
                             double var_z1, double theta = 0.0,
                             double var_zb1 = 0.0);
};

// classical-model correlation of (X_t, X_s), t > s
double corr_classical(const CorrInputs& in);
// refined-model correlation; theta = 0 (or 1) reduces bit-exactly to the
// classical value on Z (or Z^b)
double corr_refined(const CorrInputs& in);

// trapezoid rule over a node grid, up to and including time `upto` (must be
// a grid node)
double integrated_variance(std::span<const double> times,
                           std::span<const double> sigma_sq, double upto);

struct CorrEstimate {
  double estimate = 0.0;
  double se = 0.0;  // Fisher-transform scale, 1/sqrt(n-3)
  std::size_t n_paths = 0;
};

// Pearson correlation of (X_s, X_t) across paths; s, t must be recorded.
CorrEstimate mc_correlation(const SimEnsemble& ensemble, double s, double t);

struct DecayRow {
  double t = 0.0;
  double formula_corr = 0.0;
  double mc_corr = 0.0;
  double mc_se = 0.0;
};

struct DecayProfile {
  std::vector<DecayRow> rows;
  std::string to_csv() const;
};

// Formula vs Monte Carlo decay table for Corr(X_t, X_s) over t_grid. The
// formula column uses integrated variances that are exact for the
// simulator's discrete stepping, so differences are purely sampling noise.
DecayProfile decay_profile(const BnsParams& params, const ThetaSchedule& schedule,
                           ModelVariant model, VolMode vol_mode, double s,
                           std::span<const double> t_grid, std::size_t n_steps,
                           std::size_t n_paths, std::uint64_t seed,
                           unsigned parallelism = 1);

}  // namespace bns
