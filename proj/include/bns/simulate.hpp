#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bns/bns_params.hpp"

namespace bns {

// How the variance path evolves. kDynamic is the model's OU dynamics;
// kFrozen / kDecay hold sigma^2 on a deterministic path (constant, or pure
// exponential decay) while the jumps still flow into the price. The
// deterministic modes are what the correlation theorems are verified
// against, since their formulas treat the instantaneous variance as given.
enum class VolMode { kDynamic, kFrozen, kDecay };

VolMode vol_mode_from_string(const std::string& name);
std::string to_string(VolMode m);

struct SimPath {
  std::vector<double> times;     // n_steps + 1 nodes
  std::vector<double> x;         // log-return, x[0] = 0
  std::vector<double> sigma_sq;  // variance at each node
  std::vector<double> s;         // s0 * exp(x)
  // per-step subordinator increments (empty when the variant skips one)
  std::vector<double> dz, dzb, dzstar;
  // node-indexed cumulative sums of squared price-jump-driver increments
  std::vector<double> cum_sq_z, cum_sq_zb;
};

SimPath simulate_path(const BnsParams& params, const ThetaSchedule& schedule,
                      ModelVariant model, double horizon_years,
                      std::size_t n_steps, std::uint64_t seed,
                      std::uint64_t path_id, VolMode vol_mode = VolMode::kDynamic);

// Ensemble storage: either full paths (small runs) or per-checkpoint
// matrices (correlation-sized runs).
struct SimEnsemble {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  double horizon_years = 0.0;
  std::vector<double> checkpoint_times;
  // [checkpoint][path]
  std::vector<std::vector<double>> x_at;
  std::vector<std::vector<double>> sigma_sq_at;
  std::vector<SimPath> paths;  // full mode only

  bool full() const { return !paths.empty(); }
  // across-path view of X at a recorded time (throws if off-grid)
  std::span<const double> x_at_time(double t) const;
  std::span<const double> sigma_sq_at_time(double t) const;
  std::size_t checkpoint_index(double t) const;
};

inline constexpr std::size_t kMaxFullNodes = 20'000'000;

// record_times empty -> full paths (capacity-guarded); otherwise only the
// given grid times are kept. Deterministic for fixed seed regardless of
// the parallelism degree.
SimEnsemble simulate_ensemble(const BnsParams& params,
                              const ThetaSchedule& schedule, ModelVariant model,
                              double horizon_years, std::size_t n_steps,
                              std::size_t n_paths, std::uint64_t seed,
                              unsigned parallelism = 1,
                              VolMode vol_mode = VolMode::kDynamic,
                              std::span<const double> record_times = {});

// Expectation of the discrete sigma^2 recursion at every grid node (exact
// for the simulator's stepping, any vol mode / schedule).
std::vector<double> expected_sigma_sq_grid(const BnsParams& params,
                                           const ThetaSchedule& schedule,
                                           ModelVariant model,
                                           double horizon_years,
                                           std::size_t n_steps,
                                           VolMode vol_mode);

}  // namespace bns
