#include "bns/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bns/util.hpp"

namespace bns {

CorrInputs CorrInputs::expected(double s, double t, double int_var_s,
                                double int_var_t, double rho, double lambda,
                                double var_z1, double theta, double var_zb1) {
  CorrInputs in;
  in.s = s;
  in.t = t;
  in.int_var_s = int_var_s;
  in.int_var_t = int_var_t;
  in.rho = rho;
  in.lambda = lambda;
  in.theta = theta;
  in.var_z1 = var_z1;
  in.var_zb1 = var_zb1;
  in.jump_s = s * lambda * var_z1;
  in.jump_b_s = s * lambda * var_zb1;
  return in;
}

CorrInputs CorrInputs::expected_const_var(double s, double t, double sigma_sq,
                                          double rho, double lambda,
                                          double var_z1, double theta,
                                          double var_zb1) {
  return expected(s, t, sigma_sq * s, sigma_sq * t, rho, lambda, var_z1, theta,
                  var_zb1);
}

namespace {
// shared expression shape so the theta = 0 / theta = 1 reductions are
// bit-exact against the classical formula
double corr_core(const CorrInputs& in, double j_eff_s, double vz_eff) {
  if (!(in.t >= in.s) || !(in.s > 0.0))
    throw std::invalid_argument("corr: need t >= s > 0");
  double rho2 = in.rho * in.rho;
  double num = in.int_var_s + rho2 * j_eff_s;
  double den_s = in.int_var_s + in.s * rho2 * in.lambda * vz_eff;
  double den_t = in.int_var_t + in.t * rho2 * in.lambda * vz_eff;
  if (!(den_s > 0.0) || !(den_t > 0.0))
    throw std::invalid_argument("corr: non-positive denominator");
  return num / std::sqrt(den_t * den_s);
}
}  // namespace

double corr_classical(const CorrInputs& in) {
  return corr_core(in, in.jump_s, in.var_z1);
}

double corr_refined(const CorrInputs& in) {
  if (in.theta < 0.0 || in.theta > 1.0)
    throw std::invalid_argument("corr_refined: theta must be in [0,1]");
  double omt = 1.0 - in.theta;
  double j_eff = omt * omt * in.jump_s + in.theta * in.theta * in.jump_b_s;
  double vz_eff = omt * omt * in.var_z1 + in.theta * in.theta * in.var_zb1;
  return corr_core(in, j_eff, vz_eff);
}

double integrated_variance(std::span<const double> times,
                           std::span<const double> sigma_sq, double upto) {
  if (times.size() != sigma_sq.size() || times.size() < 2)
    throw std::invalid_argument("integrated_variance: bad grid");
  KahanSum acc;
  bool hit = false;
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (times[k] > upto + 1e-12) break;
    acc.add(0.5 * (sigma_sq[k - 1] + sigma_sq[k]) * (times[k] - times[k - 1]));
    if (std::abs(times[k] - upto) <= 1e-9 * std::max(1.0, upto)) {
      hit = true;
      break;
    }
  }
  if (!hit && std::abs(times[0] - upto) > 1e-12)
    throw std::invalid_argument("integrated_variance: upto is not a grid node");
  return acc.value();
}

CorrEstimate mc_correlation(const SimEnsemble& ensemble, double s, double t) {
  auto xs = ensemble.x_at_time(s);
  auto xt = ensemble.x_at_time(t);
  std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("mc_correlation: need n_paths >= 2");

  double ms = mean_of(xs), mt = mean_of(xt);
  KahanSum sxx, stt, sxt;
  for (std::size_t i = 0; i < n; ++i) {
    double a = xs[i] - ms, b = xt[i] - mt;
    sxx.add(a * a);
    stt.add(b * b);
    sxt.add(a * b);
  }
  if (!(sxx.value() > 0.0) || !(stt.value() > 0.0))
    throw std::runtime_error("mc_correlation: degenerate (zero-variance) marginal");
  CorrEstimate est;
  est.n_paths = n;
  est.estimate = sxt.value() / std::sqrt(sxx.value() * stt.value());
  est.se = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(n, 4) - 3));
  return est;
}

std::string DecayProfile::to_csv() const {
  std::ostringstream out;
  out << "t,formula_corr,mc_corr,mc_se\n";
  for (const auto& r : rows)
    out << fmt_double(r.t) << ',' << fmt_double(r.formula_corr) << ','
        << fmt_double(r.mc_corr) << ',' << fmt_double(r.mc_se) << '\n';
  return out.str();
}

DecayProfile decay_profile(const BnsParams& params, const ThetaSchedule& schedule,
                           ModelVariant model, VolMode vol_mode, double s,
                           std::span<const double> t_grid, std::size_t n_steps,
                           std::size_t n_paths, std::uint64_t seed,
                           unsigned parallelism) {
  if (t_grid.empty()) throw std::invalid_argument("decay_profile: empty t grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] <= s)
      throw std::invalid_argument("decay_profile: t grid must exceed s");
    if (i > 0 && t_grid[i] <= t_grid[i - 1])
      throw std::invalid_argument("decay_profile: t grid must increase");
  }
  double horizon = t_grid.back();

  std::vector<double> record{s};
  record.insert(record.end(), t_grid.begin(), t_grid.end());
  SimEnsemble ens =
      simulate_ensemble(params, schedule, model, horizon, n_steps, n_paths,
                        seed, parallelism, vol_mode, record);

  // integrated variances exact for the discrete stepping (left-node rule,
  // matching the simulator's X update)
  auto esig = expected_sigma_sq_grid(params, schedule, model, horizon, n_steps,
                                     vol_mode);
  double dt = horizon / static_cast<double>(n_steps);
  auto int_var_to = [&](double upto) {
    auto node = static_cast<std::size_t>(std::llround(upto / dt));
    KahanSum acc;
    for (std::size_t k = 0; k < node; ++k) acc.add(esig[k] * dt);
    return acc.value();
  };

  double int_var_s = int_var_to(s);
  DecayProfile out;
  for (double t : t_grid) {
    CorrInputs in = CorrInputs::expected(
        s, t, int_var_s, int_var_to(t), params.rho, params.lambda,
        params.z.var_rate(), params.theta,
        params.zb ? params.zb->var_rate() : 0.0);
    DecayRow row;
    row.t = t;
    row.formula_corr = model == ModelVariant::kRefined ? corr_refined(in)
                                                       : corr_classical(in);
    auto mc = mc_correlation(ens, s, t);
    row.mc_corr = mc.estimate;
    row.mc_se = mc.se;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace bns
