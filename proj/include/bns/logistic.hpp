#pragma once

#include <array>
#include <vector>

#include "bns/classifier.hpp"

namespace bns {

// Logistic regression trained by full-batch gradient ascent on the
// Bernoulli log-likelihood.
class LogisticModel : public Classifier {
 public:
  LogisticModel();
  LogisticModel(double beta0, std::array<double, kWindowLen> beta1);

  double prob_theta1(const std::array<double, kWindowLen>& raw) const override;
  std::string kind() const override { return "lr"; }
  std::string to_json() const override;
  static std::unique_ptr<LogisticModel> from_json(const std::string& text);

  double beta0() const { return beta0_; }
  const std::array<double, kWindowLen>& beta1() const { return beta1_; }
  const FeatureScaler& scaler() const { return scaler_; }
  const std::vector<double>& loss_history() const { return loss_history_; }

  friend LogisticModel train_logistic(const WindowDataset& train,
                                      const TrainConfig& cfg);

 private:
  double beta0_ = 0.0;
  std::array<double, kWindowLen> beta1_{};
  FeatureScaler scaler_;
  std::vector<double> loss_history_;  // mean negative log-likelihood per epoch
};

LogisticModel train_logistic(const WindowDataset& train, const TrainConfig& cfg);

}  // namespace bns
