#pragma once

#include <cstdint>
#include <string>

namespace bns {

// The reference experiments leave every hyperparameter unstated, so these
// defaults are ours; all of them can come from a JSON config.
struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::size_t hidden1 = 16;
  std::size_t hidden2 = 16;
  std::size_t lstm_hidden = 16;
  std::size_t trees_count = 200;
  std::size_t max_depth = 8;            // 0 = unlimited
  std::size_t features_per_split = 3;   // ceil(sqrt(7))
  bool bootstrap = true;
  std::uint64_t rng_seed = 1;
  double bn_epsilon = 1e-5;
  double bn_momentum = 0.1;
  double class1_threshold = 0.3;   // network decision threshold
  double linear_threshold = 0.5;   // logistic / forest decision threshold
  bool standardize = true;         // z-score features (raw mode for fidelity)
  bool class_weights = false;      // inverse-frequency weights, gradient models

  void validate() const;
  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
};

}  // namespace bns
