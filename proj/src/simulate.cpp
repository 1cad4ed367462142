#include "bns/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "bns/rng.hpp"

namespace bns {

VolMode vol_mode_from_string(const std::string& name) {
  if (name == "dynamic") return VolMode::kDynamic;
  if (name == "frozen") return VolMode::kFrozen;
  if (name == "decay") return VolMode::kDecay;
  throw std::invalid_argument("unknown vol mode: " + name);
}

std::string to_string(VolMode m) {
  switch (m) {
    case VolMode::kDynamic: return "dynamic";
    case VolMode::kFrozen: return "frozen";
    case VolMode::kDecay: return "decay";
  }
  return "?";
}

namespace {

struct StepState {
  double t = 0.0;
  double x = 0.0;
  double sigma_sq = 0.0;
  double dz = 0.0, dzb = 0.0, dzstar = 0.0;
  double cum_sq_z = 0.0, cum_sq_zb = 0.0;
};

// One stepping routine drives both the full-path and the checkpoint
// recorders so the two modes cannot drift apart.
template <class Recorder>
void run_path(const BnsParams& p, const ThetaSchedule& schedule,
              ModelVariant model, double horizon, std::size_t n_steps,
              std::uint64_t seed, std::uint64_t path_id, VolMode vol_mode,
              Recorder&& rec) {
  const double dt = horizon / static_cast<double>(n_steps);
  const double sub_dt = p.lambda * dt;  // subordinator clock runs at rate lambda
  const double decay = std::exp(-p.lambda * dt);
  const double sqrt_dt = std::sqrt(dt);
  const bool refined = model == ModelVariant::kRefined;
  const bool generalized = model == ModelVariant::kGeneralized;
  const double rp = p.rho_prime;
  const double rp_ortho = std::sqrt(1.0 - rp * rp);

  RngStream gauss(seed, path_id, Draw::kGaussian);
  RngStream zs(seed, path_id, Draw::kZ);
  RngStream zbs(seed, path_id, Draw::kZb);
  RngStream zstars(seed, path_id, Draw::kZstar);

  StepState st;
  st.sigma_sq = p.sigma0_sq;
  rec(0, st);
  for (std::size_t k = 0; k < n_steps; ++k) {
    st.t = static_cast<double>(k) * dt;
    const double theta_k = refined ? schedule.at(st.t) : p.theta;
    st.dz = sample_increment(p.z, sub_dt, zs);
    st.dzb = refined ? sample_increment(*p.zb, sub_dt, zbs) : 0.0;
    st.dzstar = generalized ? sample_increment(*p.zstar, sub_dt, zstars) : 0.0;

    double j_vol, j_price;
    if (refined) {
      j_vol = (1.0 - theta_k) * st.dz + theta_k * st.dzb;
      j_price = j_vol;
    } else if (generalized) {
      j_vol = rp * st.dz + rp_ortho * st.dzstar;
      j_price = st.dz;
    } else {
      j_vol = st.dz;
      j_price = st.dz;
    }

    const double sigma = std::sqrt(st.sigma_sq);
    st.x += (p.mu + p.beta * st.sigma_sq) * dt + sigma * sqrt_dt * gauss.normal() +
            p.rho * j_price;

    switch (vol_mode) {
      case VolMode::kDynamic:
        st.sigma_sq = st.sigma_sq * decay + j_vol;
        break;
      case VolMode::kFrozen:
        break;
      case VolMode::kDecay:
        st.sigma_sq *= decay;
        break;
    }
    st.cum_sq_z += st.dz * st.dz;
    st.cum_sq_zb += st.dzb * st.dzb;
    st.t = static_cast<double>(k + 1) * dt;
    rec(k + 1, st);
  }
}

}  // namespace

SimPath simulate_path(const BnsParams& params, const ThetaSchedule& schedule,
                      ModelVariant model, double horizon_years,
                      std::size_t n_steps, std::uint64_t seed,
                      std::uint64_t path_id, VolMode vol_mode) {
  if (n_steps < 1) throw std::invalid_argument("simulate_path: n_steps < 1");
  if (!(horizon_years > 0.0))
    throw std::invalid_argument("simulate_path: horizon must be > 0");
  params.validate(model);

  SimPath path;
  path.times.reserve(n_steps + 1);
  path.x.reserve(n_steps + 1);
  path.sigma_sq.reserve(n_steps + 1);
  path.s.reserve(n_steps + 1);
  path.cum_sq_z.reserve(n_steps + 1);
  path.cum_sq_zb.reserve(n_steps + 1);
  path.dz.reserve(n_steps);
  if (model == ModelVariant::kRefined) path.dzb.reserve(n_steps);
  if (model == ModelVariant::kGeneralized) path.dzstar.reserve(n_steps);

  run_path(params, schedule, model, horizon_years, n_steps, seed, path_id,
           vol_mode, [&](std::size_t node, const StepState& st) {
             path.times.push_back(st.t);
             path.x.push_back(st.x);
             path.sigma_sq.push_back(st.sigma_sq);
             path.s.push_back(params.s0 * std::exp(st.x));
             path.cum_sq_z.push_back(st.cum_sq_z);
             path.cum_sq_zb.push_back(st.cum_sq_zb);
             if (node > 0) {
               path.dz.push_back(st.dz);
               if (model == ModelVariant::kRefined) path.dzb.push_back(st.dzb);
               if (model == ModelVariant::kGeneralized)
                 path.dzstar.push_back(st.dzstar);
             }
           });
  return path;
}

std::size_t SimEnsemble::checkpoint_index(double t) const {
  for (std::size_t i = 0; i < checkpoint_times.size(); ++i)
    if (std::abs(checkpoint_times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t)))
      return i;
  throw std::invalid_argument("ensemble: time " + std::to_string(t) +
                              " not recorded (no interpolation)");
}

std::span<const double> SimEnsemble::x_at_time(double t) const {
  return x_at[checkpoint_index(t)];
}

std::span<const double> SimEnsemble::sigma_sq_at_time(double t) const {
  return sigma_sq_at[checkpoint_index(t)];
}

SimEnsemble simulate_ensemble(const BnsParams& params,
                              const ThetaSchedule& schedule, ModelVariant model,
                              double horizon_years, std::size_t n_steps,
                              std::size_t n_paths, std::uint64_t seed,
                              unsigned parallelism, VolMode vol_mode,
                              std::span<const double> record_times) {
  if (n_paths < 1) throw std::invalid_argument("simulate_ensemble: n_paths < 1");
  if (n_steps < 1) throw std::invalid_argument("simulate_ensemble: n_steps < 1");
  params.validate(model);

  SimEnsemble ens;
  ens.n_paths = n_paths;
  ens.n_steps = n_steps;
  ens.horizon_years = horizon_years;

  const double dt = horizon_years / static_cast<double>(n_steps);
  std::vector<std::size_t> record_nodes;
  if (record_times.empty()) {
    if (n_paths * (n_steps + 1) > kMaxFullNodes)
      throw std::runtime_error(
          "simulate_ensemble: full-path recording would need " +
          std::to_string(n_paths * (n_steps + 1)) +
          " nodes (capacity " + std::to_string(kMaxFullNodes) +
          "); pass record times or shrink the run");
    ens.paths.resize(n_paths);
  } else {
    for (double t : record_times) {
      double steps = t / dt;
      auto node = static_cast<std::size_t>(std::llround(steps));
      if (node > n_steps ||
          std::abs(static_cast<double>(node) * dt - t) >
              1e-9 * std::max(1.0, std::abs(t)))
        throw std::invalid_argument("simulate_ensemble: record time " +
                                    std::to_string(t) + " is off-grid");
      record_nodes.push_back(node);
      ens.checkpoint_times.push_back(static_cast<double>(node) * dt);
    }
    ens.x_at.assign(record_nodes.size(), std::vector<double>(n_paths));
    ens.sigma_sq_at.assign(record_nodes.size(), std::vector<double>(n_paths));
  }

  auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t pid = lo; pid < hi; ++pid) {
      if (record_times.empty()) {
        ens.paths[pid] = simulate_path(params, schedule, model, horizon_years,
                                       n_steps, seed, pid, vol_mode);
      } else {
        run_path(params, schedule, model, horizon_years, n_steps, seed, pid,
                 vol_mode, [&](std::size_t node, const StepState& st) {
                   for (std::size_t c = 0; c < record_nodes.size(); ++c) {
                     if (record_nodes[c] == node) {
                       ens.x_at[c][pid] = st.x;
                       ens.sigma_sq_at[c][pid] = st.sigma_sq;
                     }
                   }
                 });
      }
    }
  };

  unsigned workers = std::max(1u, parallelism);
  if (workers == 1 || n_paths < 2) {
    worker(0, n_paths);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (n_paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      std::size_t lo = static_cast<std::size_t>(w) * chunk;
      std::size_t hi = std::min(n_paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return ens;
}

std::vector<double> expected_sigma_sq_grid(const BnsParams& params,
                                           const ThetaSchedule& schedule,
                                           ModelVariant model,
                                           double horizon_years,
                                           std::size_t n_steps,
                                           VolMode vol_mode) {
  params.validate(model);
  const double dt = horizon_years / static_cast<double>(n_steps);
  const double decay = std::exp(-params.lambda * dt);
  const double sub_dt = params.lambda * dt;
  std::vector<double> out(n_steps + 1);
  out[0] = params.sigma0_sq;
  for (std::size_t k = 0; k < n_steps; ++k) {
    double mean_jump = 0.0;
    if (vol_mode == VolMode::kDynamic) {
      switch (model) {
        case ModelVariant::kClassical:
          mean_jump = params.z.mean_rate() * sub_dt;
          break;
        case ModelVariant::kGeneralized:
          mean_jump = (params.rho_prime * params.z.mean_rate() +
                       std::sqrt(1.0 - params.rho_prime * params.rho_prime) *
                           params.zstar->mean_rate()) *
                      sub_dt;
          break;
        case ModelVariant::kRefined: {
          double th = schedule.at(static_cast<double>(k) * dt);
          mean_jump = ((1.0 - th) * params.z.mean_rate() +
                       th * params.zb->mean_rate()) *
                      sub_dt;
          break;
        }
      }
    }
    switch (vol_mode) {
      case VolMode::kDynamic:
        out[k + 1] = out[k] * decay + mean_jump;
        break;
      case VolMode::kFrozen:
        out[k + 1] = out[k];
        break;
      case VolMode::kDecay:
        out[k + 1] = out[k] * decay;
        break;
    }
  }
  return out;
}

}  // namespace bns
