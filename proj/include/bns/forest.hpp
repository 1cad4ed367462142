#pragma once

#include <cstdint>
#include <vector>

#include "bns/classifier.hpp"

namespace bns {

// Axis-aligned CART node. leaf when feature < 0.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::size_t count0 = 0;
  std::size_t count1 = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  int predict_class(const std::array<double, kWindowLen>& x) const;
};

// Random forest: bootstrap resamples, Gini splits over a fresh uniform
// feature subset at every node, majority vote with ties to class 0.
class ForestModel : public Classifier {
 public:
  ForestModel() { threshold_ = 0.5; }

  double prob_theta1(const std::array<double, kWindowLen>& raw) const override;
  std::string kind() const override { return "rf"; }
  std::string to_json() const override;
  static std::unique_ptr<ForestModel> from_json(const std::string& text);

  const std::vector<DecisionTree>& trees() const { return trees_; }

  friend ForestModel train_forest(const WindowDataset& train,
                                  const TrainConfig& cfg);

 private:
  std::vector<DecisionTree> trees_;
  std::size_t max_depth_ = 0;
  std::size_t features_per_split_ = 3;
};

ForestModel train_forest(const WindowDataset& train, const TrainConfig& cfg);

}  // namespace bns
