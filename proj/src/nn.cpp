#include "bns/nn.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "bns/util.hpp"

namespace bns {

std::array<double, 2> softmax2(double z0, double z1) {
  double m = std::max(z0, z1);
  double e0 = std::exp(z0 - m), e1 = std::exp(z1 - m);
  double s = e0 + e1;
  return {e0 / s, e1 / s};
}

DenseCore::DenseCore(std::size_t in, std::size_t h1, std::size_t h2)
    : in_(in), h1_(h1), h2_(h2) {
  w1_ = 0;
  b1_ = w1_ + h1_ * in_;
  w2_ = b1_ + h1_;
  b2_ = w2_ + h2_ * h1_;
  w3_ = b2_ + h2_;
  b3_ = w3_ + 2 * h2_;
  params_.assign(b3_ + 2, 0.0);
}

void DenseCore::init_glorot(RngStream& rng) {
  auto fill = [&](std::size_t off, std::size_t rows, std::size_t cols) {
    double r = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (std::size_t i = 0; i < rows * cols; ++i)
      params_[off + i] = (2.0 * rng.uniform() - 1.0) * r;
  };
  fill(w1_, h1_, in_);
  fill(w2_, h2_, h1_);
  fill(w3_, 2, h2_);
}

std::array<double, 2> DenseCore::forward(std::span<const double> x,
                                         Cache* cache) const {
  if (x.size() != in_) throw std::invalid_argument("DenseCore: bad input size");
  std::vector<double> z1(h1_), a1(h1_), z2(h2_), a2(h2_);
  for (std::size_t i = 0; i < h1_; ++i) {
    double z = params_[b1_ + i];
    const double* w = &params_[w1_ + i * in_];
    for (std::size_t j = 0; j < in_; ++j) z += w[j] * x[j];
    z1[i] = z;
    a1[i] = std::tanh(z);
  }
  for (std::size_t i = 0; i < h2_; ++i) {
    double z = params_[b2_ + i];
    const double* w = &params_[w2_ + i * h1_];
    for (std::size_t j = 0; j < h1_; ++j) z += w[j] * a1[j];
    z2[i] = z;
    a2[i] = z > 0.0 ? z : 0.0;
  }
  double o0 = params_[b3_ + 0], o1 = params_[b3_ + 1];
  for (std::size_t j = 0; j < h2_; ++j) {
    o0 += params_[w3_ + j] * a2[j];
    o1 += params_[w3_ + h2_ + j] * a2[j];
  }
  auto p = softmax2(o0, o1);
  if (cache) {
    cache->x.assign(x.begin(), x.end());
    cache->z1 = std::move(z1);
    cache->a1 = std::move(a1);
    cache->z2 = std::move(z2);
    cache->a2 = std::move(a2);
    cache->p = {p[0], p[1]};
  }
  return p;
}

void DenseCore::backward(const Cache& cache, int label, double weight,
                         std::span<double> grad, std::span<double> dx) const {
  if (grad.size() != params_.size())
    throw std::invalid_argument("DenseCore: bad grad size");
  // softmax + cross-entropy: dz3 = p - onehot
  std::array<double, 2> dz3 = {cache.p[0], cache.p[1]};
  dz3[static_cast<std::size_t>(label)] -= 1.0;
  dz3[0] *= weight;
  dz3[1] *= weight;

  std::vector<double> da2(h2_, 0.0);
  for (std::size_t k = 0; k < 2; ++k) {
    grad[b3_ + k] += dz3[k];
    for (std::size_t j = 0; j < h2_; ++j) {
      grad[w3_ + k * h2_ + j] += dz3[k] * cache.a2[j];
      da2[j] += dz3[k] * params_[w3_ + k * h2_ + j];
    }
  }
  std::vector<double> da1(h1_, 0.0);
  for (std::size_t i = 0; i < h2_; ++i) {
    double dz2 = cache.z2[i] > 0.0 ? da2[i] : 0.0;
    grad[b2_ + i] += dz2;
    for (std::size_t j = 0; j < h1_; ++j) {
      grad[w2_ + i * h1_ + j] += dz2 * cache.a1[j];
      da1[j] += dz2 * params_[w2_ + i * h1_ + j];
    }
  }
  for (std::size_t i = 0; i < h1_; ++i) {
    double t = cache.a1[i];
    double dz1 = da1[i] * (1.0 - t * t);
    grad[b1_ + i] += dz1;
    for (std::size_t j = 0; j < in_; ++j) {
      grad[w1_ + i * in_ + j] += dz1 * cache.x[j];
      if (!dx.empty()) dx[j] += dz1 * params_[w1_ + i * in_ + j];
    }
  }
}

double dense_batch_loss(const DenseCore& core,
                        std::span<const std::vector<double>> xs,
                        std::span<const int> ys,
                        std::span<const double> weights) {
  KahanSum loss;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto p = core.forward(xs[i], nullptr);
    double py = p[static_cast<std::size_t>(ys[i])];
    loss.add(-weights[i] * std::log(std::max(py, 1e-300)));
  }
  return loss.value() / static_cast<double>(xs.size());
}

void dense_batch_grad(const DenseCore& core,
                      std::span<const std::vector<double>> xs,
                      std::span<const int> ys, std::span<const double> weights,
                      std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  DenseCore::Cache cache;
  double inv = 1.0 / static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    core.forward(xs[i], &cache);
    core.backward(cache, ys[i], weights[i] * inv, grad, {});
  }
}

double DenseNetModel::prob_theta1(
    const std::array<double, kWindowLen>& raw) const {
  auto x = scaler_.transform(raw);
  return core_.forward(std::span<const double>(x.data(), x.size()), nullptr)[1];
}

namespace {

// deterministic Fisher-Yates over row indices
void shuffle_indices(std::vector<std::size_t>& idx, RngStream& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

std::pair<double, double> class_weight_pair(const WindowDataset& train,
                                            bool enabled) {
  if (!enabled) return {1.0, 1.0};
  std::size_t n = train.rows.size();
  std::size_t n1 = train.count_theta(1);
  if (n1 == 0 || n1 == n)
    throw std::invalid_argument("class weights need both classes present");
  return {static_cast<double>(n) / (2.0 * static_cast<double>(n - n1)),
          static_cast<double>(n) / (2.0 * static_cast<double>(n1))};
}

}  // namespace

DenseNetModel train_dense(const WindowDataset& train, const TrainConfig& cfg) {
  cfg.validate();
  if (train.rows.empty())
    throw std::invalid_argument("train_dense: empty training set");

  DenseNetModel model;
  model.threshold_ = cfg.class1_threshold;
  model.scaler_ = cfg.standardize ? fit_scaler(train)
                                  : FeatureScaler::identity_scaler();
  model.core_ = DenseCore(kWindowLen, cfg.hidden1, cfg.hidden2);
  RngStream rng(cfg.rng_seed, 0, Draw::kGeneric);
  model.core_.init_glorot(rng);

  auto scaled = apply_scaler(model.scaler_, train);
  std::size_t n = scaled.size();
  std::vector<std::vector<double>> xs(n);
  std::vector<int> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i].assign(scaled[i].begin(), scaled[i].end());
    ys[i] = train.rows[i].theta;
  }
  auto [w0, w1] = class_weight_pair(train, cfg.class_weights);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(model.core_.param_count());
  DenseCore::Cache cache;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, rng);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      std::size_t stop = std::min(n, start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        std::size_t i = order[k];
        model.core_.forward(xs[i], &cache);
        double w = ys[i] == 1 ? w1 : w0;
        model.core_.backward(cache, ys[i], w * inv, grad, {});
      }
      auto& p = model.core_.params();
      for (std::size_t j = 0; j < p.size(); ++j)
        p[j] -= cfg.learning_rate * grad[j];
    }
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) weights[i] = ys[i] == 1 ? w1 : w0;
    double loss = dense_batch_loss(model.core_, xs, ys, weights);
    if (!std::isfinite(loss))
      throw std::runtime_error("train_dense: loss became non-finite at epoch " +
                               std::to_string(epoch) +
                               "; lower the learning rate");
    model.loss_history_.push_back(loss);
  }
  return model;
}

std::string DenseNetModel::to_json() const {
  nlohmann::json j;
  j["kind"] = "nn";
  j["threshold"] = threshold_;
  j["in"] = core_.in();
  j["h1"] = core_.h1();
  j["h2"] = core_.h2();
  j["params"] = core_.params();
  j["scaler"] = {{"identity", scaler_.identity},
                 {"mean", scaler_.mean},
                 {"std", scaler_.std}};
  return j.dump();
}

std::unique_ptr<DenseNetModel> DenseNetModel::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (j.at("kind") != "nn")
    throw std::invalid_argument("DenseNetModel: wrong kind tag");
  auto m = std::make_unique<DenseNetModel>();
  m->threshold_ = j.at("threshold").get<double>();
  m->core_ = DenseCore(j.at("in").get<std::size_t>(),
                       j.at("h1").get<std::size_t>(),
                       j.at("h2").get<std::size_t>());
  auto params = j.at("params").get<std::vector<double>>();
  if (params.size() != m->core_.param_count())
    throw std::invalid_argument("DenseNetModel: bad parameter count");
  m->core_.params() = std::move(params);
  m->scaler_.identity = j.at("scaler").at("identity").get<bool>();
  auto mean = j.at("scaler").at("mean").get<std::vector<double>>();
  auto stdv = j.at("scaler").at("std").get<std::vector<double>>();
  std::copy(mean.begin(), mean.end(), m->scaler_.mean.begin());
  std::copy(stdv.begin(), stdv.end(), m->scaler_.std.begin());
  return m;
}

}  // namespace bns
