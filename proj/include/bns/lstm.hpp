#pragma once

#include <array>
#include <span>
#include <vector>

#include "bns/nn.hpp"

namespace bns {

// Single LSTM layer over the 7-step close-price sequence (scalar input).
// Parameter layout, flat: [Wi, Ui, bi, Wf, Uf, bf, Wo, Uo, bo, Wg, Ug, bg]
// with W (H), U (H*H), b (H) per gate.
class LstmCore {
 public:
  LstmCore() = default;
  explicit LstmCore(std::size_t hidden);

  void init_glorot(RngStream& rng);  // forget-gate biases start at 1

  struct StepCache {
    double x = 0.0;
    std::vector<double> i, f, o, g, c, tanh_c, h;
  };
  struct SeqCache {
    std::array<StepCache, kWindowLen> steps;
  };

  // h after the last step; zero initial hidden and cell state
  std::vector<double> forward(std::span<const double> seq,
                              SeqCache* cache) const;
  // full backpropagation through time; adds into grad
  void backward(const SeqCache& cache, std::span<const double> dh_last,
                std::span<double> grad) const;

  std::size_t hidden() const { return hidden_; }
  std::size_t param_count() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

 private:
  std::size_t hidden_ = 0;
  std::vector<double> params_;
};

// Batch normalization over the final hidden state: batch statistics during
// training, running statistics at inference, learned affine rescale.
struct BatchNorm {
  std::vector<double> gamma, beta;
  std::vector<double> running_mean, running_var;
  double eps = 1e-5;
  double momentum = 0.1;

  void init(std::size_t dim, double eps_, double momentum_);

  struct Cache {
    std::vector<double> mean, var, inv_std;
    std::vector<std::vector<double>> xhat;
  };

  // train-mode: normalizes by batch statistics and updates running stats
  std::vector<std::vector<double>> forward_train(
      const std::vector<std::vector<double>>& x, Cache* cache,
      bool update_running);
  std::vector<double> forward_eval(const std::vector<double>& x) const;
  // dy -> dx plus dgamma/dbeta appended into grad at the given offsets
  std::vector<std::vector<double>> backward(
      const Cache& cache, const std::vector<std::vector<double>>& dy,
      std::span<double> dgamma, std::span<double> dbeta) const;
};

class LstmNetModel : public Classifier {
 public:
  LstmNetModel() { threshold_ = 0.3; }

  double prob_theta1(const std::array<double, kWindowLen>& raw) const override;
  std::string kind() const override { return use_bn_ ? "lstm-bn" : "lstm"; }
  std::string to_json() const override;
  static std::unique_ptr<LstmNetModel> from_json(const std::string& text);

  // flat view over [lstm | bn gamma | bn beta | head] for the FD checks
  std::size_t total_params() const;
  double& param_at(std::size_t idx);
  double batch_loss_train(const std::vector<std::array<double, kWindowLen>>& xs,
                          std::span<const int> ys,
                          std::span<const double> weights);
  void batch_grad_train(const std::vector<std::array<double, kWindowLen>>& xs,
                        std::span<const int> ys,
                        std::span<const double> weights,
                        std::span<double> grad);

  LstmCore& lstm() { return lstm_; }
  BatchNorm& bn() { return bn_; }
  DenseCore& head() { return head_; }
  bool use_bn() const { return use_bn_; }
  const FeatureScaler& scaler() const { return scaler_; }
  const std::vector<double>& loss_history() const { return loss_history_; }

  friend LstmNetModel train_lstm(const WindowDataset& train,
                                 const TrainConfig& cfg, bool use_batchnorm);

 private:
  LstmCore lstm_;
  BatchNorm bn_;
  DenseCore head_;
  bool use_bn_ = false;
  FeatureScaler scaler_;
  std::vector<double> loss_history_;
};

LstmNetModel train_lstm(const WindowDataset& train, const TrainConfig& cfg,
                        bool use_batchnorm);

}  // namespace bns
