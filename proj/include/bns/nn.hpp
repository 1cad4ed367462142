#pragma once

#include <array>
#include <span>
#include <vector>

#include "bns/classifier.hpp"
#include "bns/rng.hpp"

namespace bns {

// Two hidden layers (tanh, then ReLU) and a 2-way softmax output. Parameters
// live in one flat vector so training steps and finite-difference checks stay
// simple: [W1 (h1*in), b1, W2 (h2*h1), b2, W3 (2*h2), b3].
class DenseCore {
 public:
  DenseCore() = default;
  DenseCore(std::size_t in, std::size_t h1, std::size_t h2);

  void init_glorot(RngStream& rng);

  struct Cache {
    std::vector<double> x, z1, a1, z2, a2, p;
  };

  std::array<double, 2> forward(std::span<const double> x, Cache* cache) const;
  // label in {0,1}; adds weight * dCE into grad; dx (optional) receives the
  // input gradient for upstream layers
  void backward(const Cache& cache, int label, double weight,
                std::span<double> grad, std::span<double> dx) const;

  std::size_t in() const { return in_; }
  std::size_t h1() const { return h1_; }
  std::size_t h2() const { return h2_; }
  std::size_t param_count() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

 private:
  std::size_t in_ = 0, h1_ = 0, h2_ = 0;
  std::size_t w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0, w3_ = 0, b3_ = 0;  // offsets
  std::vector<double> params_;
};

std::array<double, 2> softmax2(double z0, double z1);

class DenseNetModel : public Classifier {
 public:
  DenseNetModel() { threshold_ = 0.3; }

  double prob_theta1(const std::array<double, kWindowLen>& raw) const override;
  std::string kind() const override { return "nn"; }
  std::string to_json() const override;
  static std::unique_ptr<DenseNetModel> from_json(const std::string& text);

  DenseCore& core() { return core_; }
  const DenseCore& core() const { return core_; }
  const FeatureScaler& scaler() const { return scaler_; }
  const std::vector<double>& loss_history() const { return loss_history_; }

  friend DenseNetModel train_dense(const WindowDataset& train,
                                   const TrainConfig& cfg);

 private:
  DenseCore core_;
  FeatureScaler scaler_;
  std::vector<double> loss_history_;
};

DenseNetModel train_dense(const WindowDataset& train, const TrainConfig& cfg);

// mean weighted cross-entropy over a batch (used by training and the
// finite-difference tests)
double dense_batch_loss(const DenseCore& core,
                        std::span<const std::vector<double>> xs,
                        std::span<const int> ys,
                        std::span<const double> weights);
void dense_batch_grad(const DenseCore& core,
                      std::span<const std::vector<double>> xs,
                      std::span<const int> ys, std::span<const double> weights,
                      std::span<double> grad);

}  // namespace bns
