#include "bns/bns_params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace bns {

ModelVariant model_variant_from_string(const std::string& name) {
  if (name == "classical") return ModelVariant::kClassical;
  if (name == "generalized") return ModelVariant::kGeneralized;
  if (name == "refined") return ModelVariant::kRefined;
  throw std::invalid_argument("unknown model variant: " + name);
}

std::string to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::kClassical: return "classical";
    case ModelVariant::kGeneralized: return "generalized";
    case ModelVariant::kRefined: return "refined";
  }
  return "?";
}

void BnsParams::validate(ModelVariant variant) const {
  if (rho > 0.0) throw std::invalid_argument("BnsParams: rho must be <= 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("BnsParams: lambda must be > 0");
  if (!(sigma0_sq > 0.0))
    throw std::invalid_argument("BnsParams: sigma0_sq must be > 0");
  if (theta < 0.0 || theta > 1.0)
    throw std::invalid_argument("BnsParams: theta must be in [0,1]");
  if (rho_prime < 0.0 || rho_prime > 1.0)
    throw std::invalid_argument("BnsParams: rho_prime must be in [0,1]");
  if (!(s0 > 0.0)) throw std::invalid_argument("BnsParams: s0 must be > 0");
  z.validate();
  if (variant == ModelVariant::kRefined) {
    if (!zb)
      throw std::invalid_argument("BnsParams: refined model needs zb spec");
    zb->validate();
    if (!(zb->mean_rate() > z.mean_rate()))
      throw std::invalid_argument(
          "BnsParams: zb must have greater intensity than z");
  }
  if (variant == ModelVariant::kGeneralized) {
    if (!zstar)
      throw std::invalid_argument(
          "BnsParams: generalized model needs zstar spec");
    zstar->validate();
  }
}

namespace {
nlohmann::json spec_to_json(const SubordinatorSpec& s) {
  nlohmann::json j;
  j["family"] = s.family_name();
  if (s.family == SubordinatorSpec::Family::kCompoundPoissonExp) {
    j["a"] = s.a;
    j["b"] = s.b;
  } else {
    j["shape"] = s.shape;
    j["rate"] = s.rate;
  }
  return j;
}

SubordinatorSpec spec_from_json(const nlohmann::json& j) {
  std::string fam = j.at("family").get<std::string>();
  if (fam == "compound-poisson-exponential")
    return SubordinatorSpec::cpe(j.at("a").get<double>(),
                                 j.at("b").get<double>());
  if (fam == "gamma")
    return SubordinatorSpec::gamma_process(j.at("shape").get<double>(),
                                           j.at("rate").get<double>());
  throw std::invalid_argument("unknown subordinator family: " + fam);
}
}  // namespace

std::string BnsParams::to_json() const {
  nlohmann::json j;
  j["mu"] = mu;
  j["beta"] = beta;
  j["rho"] = rho;
  j["lambda"] = lambda;
  j["sigma0_sq"] = sigma0_sq;
  j["theta"] = theta;
  j["rho_prime"] = rho_prime;
  j["s0"] = s0;
  j["risk_free_rate"] = risk_free_rate;
  j["z"] = spec_to_json(z);
  if (zb) j["zb"] = spec_to_json(*zb);
  if (zstar) j["zstar"] = spec_to_json(*zstar);
  return j.dump(2);
}

BnsParams BnsParams::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  BnsParams p;
  auto get = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  get("mu", p.mu);
  get("beta", p.beta);
  get("rho", p.rho);
  get("lambda", p.lambda);
  get("sigma0_sq", p.sigma0_sq);
  get("theta", p.theta);
  get("rho_prime", p.rho_prime);
  get("s0", p.s0);
  get("risk_free_rate", p.risk_free_rate);
  if (j.contains("z")) p.z = spec_from_json(j.at("z"));
  if (j.contains("zb")) p.zb = spec_from_json(j.at("zb"));
  if (j.contains("zstar")) p.zstar = spec_from_json(j.at("zstar"));
  return p;
}

ThetaSchedule ThetaSchedule::constant(double theta) {
  if (theta < 0.0 || theta > 1.0)
    throw std::invalid_argument("ThetaSchedule: theta must be in [0,1]");
  ThetaSchedule s;
  s.points_ = {{0.0, theta}};
  return s;
}

double ThetaSchedule::at(double t) const {
  if (t < 0.0) t = 0.0;
  double value = points_.front().second;
  for (const auto& [time, v] : points_) {
    if (time <= t)
      value = v;
    else
      break;
  }
  return value;
}

void ThetaSchedule::set_interval(double t0, double t1, double value) {
  if (!(t1 > t0)) throw std::invalid_argument("ThetaSchedule: empty interval");
  if (value < 0.0 || value > 1.0)
    throw std::invalid_argument("ThetaSchedule: value must be in [0,1]");
  double after = at(t1);
  std::vector<std::pair<double, double>> next;
  for (const auto& pt : points_)
    if (pt.first < t0) next.push_back(pt);
  if (next.empty() && t0 > 0.0) next.push_back({0.0, points_.front().second});
  next.push_back({t0, value});
  next.push_back({t1, after});
  for (const auto& pt : points_)
    if (pt.first > t1) next.push_back(pt);
  // drop redundant repeats
  points_.clear();
  for (const auto& pt : next)
    if (points_.empty() || points_.back().second != pt.second ||
        pt.first == 0.0)
      points_.push_back(pt);
}

std::string ThetaSchedule::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [t, v] : points_) j.push_back({t, v});
  return j.dump();
}

ThetaSchedule ThetaSchedule::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  ThetaSchedule s;
  s.points_.clear();
  for (const auto& pt : j)
    s.points_.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
  if (s.points_.empty() || s.points_.front().first != 0.0)
    throw std::invalid_argument("ThetaSchedule: first breakpoint must be t=0");
  if (!std::is_sorted(s.points_.begin(), s.points_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; }))
    throw std::invalid_argument("ThetaSchedule: breakpoints must be sorted");
  for (const auto& [t, v] : s.points_)
    if (v < 0.0 || v > 1.0)
      throw std::invalid_argument("ThetaSchedule: values must be in [0,1]");
  return s;
}

ThetaSchedule schedule_from_predictions(
    const std::vector<ThetaPrediction>& predictions, ScheduleMode mode,
    long horizon_days, double threshold) {
  if (predictions.empty())
    throw std::invalid_argument("schedule_from_predictions: no predictions");
  if (horizon_days < 1)
    throw std::invalid_argument("schedule_from_predictions: horizon_days < 1");
  for (std::size_t i = 1; i < predictions.size(); ++i)
    if (predictions[i].day_index <= predictions[i - 1].day_index)
      throw std::invalid_argument(
          "schedule_from_predictions: prediction indices must increase");

  ThetaSchedule s = ThetaSchedule::constant(0.0);
  for (const auto& p : predictions) {
    double t0 = static_cast<double>(p.day_index) * kDayYears;
    double t1 = static_cast<double>(p.day_index + horizon_days) * kDayYears;
    double value = mode == ScheduleMode::kHard
                       ? (p.prob_theta1 > threshold ? 1.0 : 0.0)
                       : p.prob_theta1;
    s.set_interval(t0, t1, value);
  }
  return s;
}

}  // namespace bns
