#include "bns/logistic.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "bns/util.hpp"

namespace bns {

namespace {
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}
}  // namespace

LogisticModel::LogisticModel() { scaler_ = FeatureScaler::identity_scaler(); }

LogisticModel::LogisticModel(double beta0, std::array<double, kWindowLen> beta1)
    : beta0_(beta0), beta1_(beta1) {
  scaler_ = FeatureScaler::identity_scaler();
}

double LogisticModel::prob_theta1(
    const std::array<double, kWindowLen>& raw) const {
  auto x = scaler_.transform(raw);
  double z = beta0_;
  for (std::size_t j = 0; j < kWindowLen; ++j) z += beta1_[j] * x[j];
  return sigmoid(z);
}

LogisticModel train_logistic(const WindowDataset& train, const TrainConfig& cfg) {
  cfg.validate();
  if (train.rows.empty())
    throw std::invalid_argument("train_logistic: empty training set");

  LogisticModel model;
  model.threshold_ = cfg.linear_threshold;
  model.scaler_ = cfg.standardize ? fit_scaler(train)
                                  : FeatureScaler::identity_scaler();
  auto xs = apply_scaler(model.scaler_, train);
  std::size_t n = train.rows.size();

  std::size_t n1 = train.count_theta(1);
  double w1 = 1.0, w0 = 1.0;
  if (cfg.class_weights) {
    if (n1 == 0 || n1 == n)
      throw std::invalid_argument("train_logistic: class weights need both classes");
    w1 = static_cast<double>(n) / (2.0 * static_cast<double>(n1));
    w0 = static_cast<double>(n) / (2.0 * static_cast<double>(n - n1));
  }

  auto epoch_loss = [&]() {
    KahanSum loss;
    for (std::size_t i = 0; i < n; ++i) {
      double z = model.beta0_;
      for (std::size_t j = 0; j < kWindowLen; ++j)
        z += model.beta1_[j] * xs[i][j];
      double y = train.rows[i].theta;
      double w = y > 0.5 ? w1 : w0;
      // -log-likelihood, numerically stable form
      double nll = std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
      loss.add(w * nll);
    }
    return loss.value() / static_cast<double>(n);
  };

  model.loss_history_.push_back(epoch_loss());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double g0 = 0.0;
    std::array<double, kWindowLen> g{};
    for (std::size_t i = 0; i < n; ++i) {
      double z = model.beta0_;
      for (std::size_t j = 0; j < kWindowLen; ++j)
        z += model.beta1_[j] * xs[i][j];
      double y = train.rows[i].theta;
      double w = y > 0.5 ? w1 : w0;
      double resid = w * (y - sigmoid(z));  // ascent direction
      g0 += resid;
      for (std::size_t j = 0; j < kWindowLen; ++j) g[j] += resid * xs[i][j];
    }
    double scale = cfg.learning_rate / static_cast<double>(n);
    model.beta0_ += scale * g0;
    for (std::size_t j = 0; j < kWindowLen; ++j) model.beta1_[j] += scale * g[j];
    double loss = epoch_loss();
    if (!std::isfinite(loss))
      throw std::runtime_error(
          "train_logistic: loss became non-finite at epoch " +
          std::to_string(epoch) + "; lower the learning rate");
    model.loss_history_.push_back(loss);
  }
  return model;
}

std::string LogisticModel::to_json() const {
  nlohmann::json j;
  j["kind"] = "lr";
  j["beta0"] = beta0_;
  j["beta1"] = beta1_;
  j["threshold"] = threshold_;
  j["scaler"] = {{"identity", scaler_.identity},
                 {"mean", scaler_.mean},
                 {"std", scaler_.std}};
  return j.dump(2);
}

std::unique_ptr<LogisticModel> LogisticModel::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (j.at("kind") != "lr")
    throw std::invalid_argument("LogisticModel: wrong kind tag");
  auto m = std::make_unique<LogisticModel>();
  m->beta0_ = j.at("beta0").get<double>();
  auto b1 = j.at("beta1").get<std::vector<double>>();
  if (b1.size() != kWindowLen)
    throw std::invalid_argument("LogisticModel: bad beta1 length");
  std::copy(b1.begin(), b1.end(), m->beta1_.begin());
  m->threshold_ = j.at("threshold").get<double>();
  m->scaler_.identity = j.at("scaler").at("identity").get<bool>();
  auto mean = j.at("scaler").at("mean").get<std::vector<double>>();
  auto stdv = j.at("scaler").at("std").get<std::vector<double>>();
  std::copy(mean.begin(), mean.end(), m->scaler_.mean.begin());
  std::copy(stdv.begin(), stdv.end(), m->scaler_.std.begin());
  return m;
}

}  // namespace bns
