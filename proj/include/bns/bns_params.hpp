#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bns/subordinator.hpp"

namespace bns {

enum class ModelVariant { kClassical, kGeneralized, kRefined };

ModelVariant model_variant_from_string(const std::string& name);
std::string to_string(ModelVariant v);

// Model parameters. The risk-free rate is carried for config completeness
// but the dynamics never read it.
struct BnsParams {
  double mu = 0.0;
  double beta = 0.0;
  double rho = -0.5;         // leverage, <= 0
  double lambda = 1.0;       // mean reversion, > 0
  double sigma0_sq = 0.04;   // initial variance, > 0
  double theta = 0.0;        // [0,1], switching weight
  double rho_prime = 1.0;    // [0,1], generalized-variant correlation
  double s0 = 60.0;          // initial price, > 0
  double risk_free_rate = 0.0;

  SubordinatorSpec z = SubordinatorSpec::cpe(1.0, 2.0);
  std::optional<SubordinatorSpec> zb = SubordinatorSpec::cpe(4.0, 2.0);
  std::optional<SubordinatorSpec> zstar;

  void validate(ModelVariant variant) const;
  std::string to_json() const;
  static BnsParams from_json(const std::string& text);
};

// Right-continuous piecewise-constant theta(t) on [0, inf).
class ThetaSchedule {
 public:
  static ThetaSchedule constant(double theta);

  double at(double t) const;
  // overwrite [t0, t1) with value; later applications win on overlap
  void set_interval(double t0, double t1, double value);
  const std::vector<std::pair<double, double>>& breakpoints() const {
    return points_;
  }
  bool is_constant() const { return points_.size() == 1; }

  std::string to_json() const;
  static ThetaSchedule from_json(const std::string& text);

 private:
  // (time, value), sorted by time, first entry at t = 0
  std::vector<std::pair<double, double>> points_{{0.0, 0.0}};
};

inline constexpr double kDayYears = 1.0 / 252.0;

enum class ScheduleMode { kHard, kSoft };

struct ThetaPrediction {
  long day_index = 0;       // trading-day offset of the prediction
  double prob_theta1 = 0.0;
};

// hard: theta=1 on [day, day+horizon) when prob crosses the threshold;
// soft: the probability itself is held for the horizon. Later predictions
// override earlier ones where they overlap.
ThetaSchedule schedule_from_predictions(
    const std::vector<ThetaPrediction>& predictions, ScheduleMode mode,
    long horizon_days, double threshold = 0.5);

}  // namespace bns
