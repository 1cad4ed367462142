#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bns/scaler.hpp"
#include "bns/train_config.hpp"
#include "bns/windowing.hpp"

namespace bns {

struct Prediction {
  double prob_theta1 = 0.0;
  int label = 0;
};

// Shared contract for the five models. prob_theta1 takes a raw close-price
// window; each model applies its own fitted scaler (identity for the
// forest and for raw-mode fits).
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual double prob_theta1(const std::array<double, kWindowLen>& raw) const = 0;
  virtual std::string kind() const = 0;
  virtual std::string to_json() const = 0;

  double threshold() const { return threshold_; }
  void set_threshold(double t) { threshold_ = t; }

 protected:
  double threshold_ = 0.5;
};

// Probabilities are exposed alongside labels so the simulator can consume
// them directly as theta.
std::vector<Prediction> predict_theta(const Classifier& model,
                                      const WindowDataset& rows);

std::unique_ptr<Classifier> classifier_from_json(const std::string& text);

// model: lr | rf | nn | lstm | lstm-bn
std::unique_ptr<Classifier> train_model(const std::string& model,
                                        const WindowDataset& train,
                                        const TrainConfig& cfg);

}  // namespace bns
