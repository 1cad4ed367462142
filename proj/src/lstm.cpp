#include "bns/lstm.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "bns/util.hpp"

namespace bns {

namespace {
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}
constexpr std::size_t kGates = 4;  // i, f, o, g
}  // namespace

LstmCore::LstmCore(std::size_t hidden) : hidden_(hidden) {
  params_.assign(kGates * (hidden_ + hidden_ * hidden_ + hidden_), 0.0);
}

void LstmCore::init_glorot(RngStream& rng) {
  std::size_t H = hidden_;
  std::size_t per_gate = H + H * H + H;
  for (std::size_t gate = 0; gate < kGates; ++gate) {
    std::size_t base = gate * per_gate;
    double rw = std::sqrt(6.0 / static_cast<double>(1 + H));
    for (std::size_t j = 0; j < H; ++j)
      params_[base + j] = (2.0 * rng.uniform() - 1.0) * rw;
    double ru = std::sqrt(6.0 / static_cast<double>(2 * H));
    for (std::size_t j = 0; j < H * H; ++j)
      params_[base + H + j] = (2.0 * rng.uniform() - 1.0) * ru;
    for (std::size_t j = 0; j < H; ++j)
      params_[base + H + H * H + j] = gate == 1 ? 1.0 : 0.0;  // forget bias 1
  }
}

std::vector<double> LstmCore::forward(std::span<const double> seq,
                                      SeqCache* cache) const {
  if (seq.size() != kWindowLen)
    throw std::invalid_argument("LstmCore: sequence length must be 7");
  std::size_t H = hidden_;
  std::size_t per_gate = H + H * H + H;
  const double* P = params_.data();

  std::vector<double> h(H, 0.0), c(H, 0.0);
  std::vector<double> pre(kGates);
  for (std::size_t t = 0; t < kWindowLen; ++t) {
    double x = seq[t];
    StepCache* sc = cache ? &cache->steps[t] : nullptr;
    std::vector<double> i(H), f(H), o(H), g(H), c_new(H), tanh_c(H), h_new(H);
    for (std::size_t j = 0; j < H; ++j) {
      for (std::size_t gate = 0; gate < kGates; ++gate) {
        const double* base = P + gate * per_gate;
        double z = base[j] * x + base[H + H * H + j];
        const double* U = base + H + j * H;
        for (std::size_t k = 0; k < H; ++k) z += U[k] * h[k];
        pre[gate] = z;
      }
      i[j] = sigmoid(pre[0]);
      f[j] = sigmoid(pre[1]);
      o[j] = sigmoid(pre[2]);
      g[j] = std::tanh(pre[3]);
      c_new[j] = f[j] * c[j] + i[j] * g[j];
      if (!std::isfinite(c_new[j]))
        throw std::runtime_error("LstmCore: cell state diverged");
      tanh_c[j] = std::tanh(c_new[j]);
      h_new[j] = o[j] * tanh_c[j];
    }
    if (sc) {
      sc->x = x;
      sc->i = i;
      sc->f = f;
      sc->o = o;
      sc->g = g;
      sc->c = c_new;
      sc->tanh_c = tanh_c;
      sc->h = h_new;
    }
    c = std::move(c_new);
    h = std::move(h_new);
  }
  return h;
}

void LstmCore::backward(const SeqCache& cache, std::span<const double> dh_last,
                        std::span<double> grad) const {
  std::size_t H = hidden_;
  std::size_t per_gate = H + H * H + H;
  const double* P = params_.data();

  std::vector<double> dh(dh_last.begin(), dh_last.end());
  std::vector<double> dc(H, 0.0);
  std::vector<double> dpre(kGates);
  for (std::size_t ti = kWindowLen; ti-- > 0;) {
    const StepCache& sc = cache.steps[ti];
    const std::vector<double>* h_prev = ti > 0 ? &cache.steps[ti - 1].h : nullptr;
    const std::vector<double>* c_prev = ti > 0 ? &cache.steps[ti - 1].c : nullptr;
    std::vector<double> dh_prev(H, 0.0), dc_prev(H, 0.0);
    for (std::size_t j = 0; j < H; ++j) {
      double do_ = dh[j] * sc.tanh_c[j];
      double dcj = dc[j] + dh[j] * sc.o[j] * (1.0 - sc.tanh_c[j] * sc.tanh_c[j]);
      double cp = c_prev ? (*c_prev)[j] : 0.0;
      double di = dcj * sc.g[j];
      double df = dcj * cp;
      double dg = dcj * sc.i[j];
      dpre[0] = di * sc.i[j] * (1.0 - sc.i[j]);
      dpre[1] = df * sc.f[j] * (1.0 - sc.f[j]);
      dpre[2] = do_ * sc.o[j] * (1.0 - sc.o[j]);
      dpre[3] = dg * (1.0 - sc.g[j] * sc.g[j]);
      for (std::size_t gate = 0; gate < kGates; ++gate) {
        std::size_t base = gate * per_gate;
        grad[base + j] += dpre[gate] * sc.x;
        grad[base + H + H * H + j] += dpre[gate];
        const double* U = P + base + H + j * H;
        double* gU = grad.data() + base + H + j * H;
        if (h_prev) {
          for (std::size_t k = 0; k < H; ++k) {
            gU[k] += dpre[gate] * (*h_prev)[k];
            dh_prev[k] += dpre[gate] * U[k];
          }
        }
      }
      dc_prev[j] = dcj * sc.f[j];
    }
    dh = std::move(dh_prev);
    dc = std::move(dc_prev);
  }
}

void BatchNorm::init(std::size_t dim, double eps_, double momentum_) {
  gamma.assign(dim, 1.0);
  beta.assign(dim, 0.0);
  running_mean.assign(dim, 0.0);
  running_var.assign(dim, 1.0);
  eps = eps_;
  momentum = momentum_;
}

std::vector<std::vector<double>> BatchNorm::forward_train(
    const std::vector<std::vector<double>>& x, Cache* cache,
    bool update_running) {
  std::size_t B = x.size();
  if (B < 2)
    throw std::invalid_argument("BatchNorm: train mode needs batch size >= 2");
  std::size_t D = gamma.size();
  std::vector<double> mean(D, 0.0), var(D, 0.0), inv_std(D);
  for (const auto& row : x)
    for (std::size_t j = 0; j < D; ++j) mean[j] += row[j];
  for (std::size_t j = 0; j < D; ++j) mean[j] /= static_cast<double>(B);
  for (const auto& row : x)
    for (std::size_t j = 0; j < D; ++j) {
      double d = row[j] - mean[j];
      var[j] += d * d;
    }
  for (std::size_t j = 0; j < D; ++j) {
    var[j] /= static_cast<double>(B);  // biased, as in training-mode BN
    inv_std[j] = 1.0 / std::sqrt(var[j] + eps);
  }
  std::vector<std::vector<double>> out(B, std::vector<double>(D));
  std::vector<std::vector<double>> xhat(B, std::vector<double>(D));
  for (std::size_t i = 0; i < B; ++i)
    for (std::size_t j = 0; j < D; ++j) {
      xhat[i][j] = (x[i][j] - mean[j]) * inv_std[j];
      out[i][j] = gamma[j] * xhat[i][j] + beta[j];
    }
  if (update_running) {
    for (std::size_t j = 0; j < D; ++j) {
      running_mean[j] = (1.0 - momentum) * running_mean[j] + momentum * mean[j];
      running_var[j] = (1.0 - momentum) * running_var[j] + momentum * var[j];
    }
  }
  if (cache) {
    cache->mean = std::move(mean);
    cache->var = std::move(var);
    cache->inv_std = std::move(inv_std);
    cache->xhat = std::move(xhat);
  }
  return out;
}

std::vector<double> BatchNorm::forward_eval(const std::vector<double>& x) const {
  std::size_t D = gamma.size();
  std::vector<double> out(D);
  for (std::size_t j = 0; j < D; ++j)
    out[j] = gamma[j] * (x[j] - running_mean[j]) /
                 std::sqrt(running_var[j] + eps) +
             beta[j];
  return out;
}

std::vector<std::vector<double>> BatchNorm::backward(
    const Cache& cache, const std::vector<std::vector<double>>& dy,
    std::span<double> dgamma, std::span<double> dbeta) const {
  std::size_t B = dy.size();
  std::size_t D = gamma.size();
  double invB = 1.0 / static_cast<double>(B);
  std::vector<std::vector<double>> dx(B, std::vector<double>(D, 0.0));
  for (std::size_t j = 0; j < D; ++j) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (std::size_t i = 0; i < B; ++i) {
      sum_dy += dy[i][j];
      sum_dy_xhat += dy[i][j] * cache.xhat[i][j];
    }
    dgamma[j] += sum_dy_xhat;
    dbeta[j] += sum_dy;
    for (std::size_t i = 0; i < B; ++i) {
      // dx = (gamma*inv_std/B) * (B*dy - sum(dy) - xhat*sum(dy*xhat))
      dx[i][j] = gamma[j] * cache.inv_std[j] * invB *
                 (static_cast<double>(B) * dy[i][j] - sum_dy -
                  cache.xhat[i][j] * sum_dy_xhat);
    }
  }
  return dx;
}

double LstmNetModel::prob_theta1(
    const std::array<double, kWindowLen>& raw) const {
  auto x = scaler_.transform(raw);
  auto h = lstm_.forward(std::span<const double>(x.data(), x.size()), nullptr);
  std::vector<double> in = use_bn_ ? bn_.forward_eval(h) : h;
  return head_.forward(in, nullptr)[1];
}

std::size_t LstmNetModel::total_params() const {
  return lstm_.param_count() + (use_bn_ ? 2 * bn_.gamma.size() : 0) +
         head_.param_count();
}

double& LstmNetModel::param_at(std::size_t idx) {
  if (idx < lstm_.param_count()) return lstm_.params()[idx];
  idx -= lstm_.param_count();
  if (use_bn_) {
    if (idx < bn_.gamma.size()) return bn_.gamma[idx];
    idx -= bn_.gamma.size();
    if (idx < bn_.beta.size()) return bn_.beta[idx];
    idx -= bn_.beta.size();
  }
  return head_.params()[idx];
}

double LstmNetModel::batch_loss_train(
    const std::vector<std::array<double, kWindowLen>>& xs,
    std::span<const int> ys, std::span<const double> weights) {
  std::size_t B = xs.size();
  std::vector<std::vector<double>> hs(B);
  for (std::size_t i = 0; i < B; ++i)
    hs[i] = lstm_.forward(std::span<const double>(xs[i].data(), kWindowLen),
                          nullptr);
  std::vector<std::vector<double>> ins =
      use_bn_ ? bn_.forward_train(hs, nullptr, false) : hs;
  KahanSum loss;
  for (std::size_t i = 0; i < B; ++i) {
    auto p = head_.forward(ins[i], nullptr);
    double py = p[static_cast<std::size_t>(ys[i])];
    loss.add(-weights[i] * std::log(std::max(py, 1e-300)));
  }
  return loss.value() / static_cast<double>(B);
}

void LstmNetModel::batch_grad_train(
    const std::vector<std::array<double, kWindowLen>>& xs,
    std::span<const int> ys, std::span<const double> weights,
    std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  std::size_t B = xs.size();
  std::size_t H = lstm_.hidden();
  double invB = 1.0 / static_cast<double>(B);

  std::vector<LstmCore::SeqCache> caches(B);
  std::vector<std::vector<double>> hs(B);
  for (std::size_t i = 0; i < B; ++i)
    hs[i] = lstm_.forward(std::span<const double>(xs[i].data(), kWindowLen),
                          &caches[i]);

  BatchNorm::Cache bn_cache;
  std::vector<std::vector<double>> ins =
      use_bn_ ? bn_.forward_train(hs, &bn_cache, false) : hs;

  std::span<double> lstm_grad = grad.subspan(0, lstm_.param_count());
  std::span<double> head_grad =
      grad.subspan(grad.size() - head_.param_count(), head_.param_count());

  // head backward per sample, collecting the input gradients
  std::vector<std::vector<double>> din(B, std::vector<double>(H, 0.0));
  DenseCore::Cache hc;
  for (std::size_t i = 0; i < B; ++i) {
    head_.forward(ins[i], &hc);
    head_.backward(hc, ys[i], weights[i] * invB, head_grad, din[i]);
  }

  std::vector<std::vector<double>> dh(B);
  if (use_bn_) {
    std::span<double> dgamma = grad.subspan(lstm_.param_count(), H);
    std::span<double> dbeta = grad.subspan(lstm_.param_count() + H, H);
    dh = bn_.backward(bn_cache, din, dgamma, dbeta);
  } else {
    dh = std::move(din);
  }
  for (std::size_t i = 0; i < B; ++i)
    lstm_.backward(caches[i], dh[i], lstm_grad);
}

LstmNetModel train_lstm(const WindowDataset& train, const TrainConfig& cfg,
                        bool use_batchnorm) {
  cfg.validate();
  if (train.rows.empty())
    throw std::invalid_argument("train_lstm: empty training set");
  if (use_batchnorm && cfg.batch_size < 2)
    throw std::invalid_argument(
        "train_lstm: batch_size 1 with batch normalization is rejected");

  LstmNetModel model;
  model.threshold_ = cfg.class1_threshold;
  model.use_bn_ = use_batchnorm;
  model.scaler_ = cfg.standardize ? fit_scaler(train)
                                  : FeatureScaler::identity_scaler();
  model.lstm_ = LstmCore(cfg.lstm_hidden);
  model.head_ = DenseCore(cfg.lstm_hidden, cfg.hidden1, cfg.hidden2);
  RngStream rng(cfg.rng_seed, 0, Draw::kGeneric);
  model.lstm_.init_glorot(rng);
  model.head_.init_glorot(rng);
  if (use_batchnorm)
    model.bn_.init(cfg.lstm_hidden, cfg.bn_epsilon, cfg.bn_momentum);

  auto scaled = apply_scaler(model.scaler_, train);
  std::size_t n = scaled.size();
  std::vector<int> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = train.rows[i].theta;
  std::size_t n1 = train.count_theta(1);
  double w0 = 1.0, w1 = 1.0;
  if (cfg.class_weights) {
    if (n1 == 0 || n1 == n)
      throw std::invalid_argument("train_lstm: class weights need both classes");
    w0 = static_cast<double>(n) / (2.0 * static_cast<double>(n - n1));
    w1 = static_cast<double>(n) / (2.0 * static_cast<double>(n1));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(model.total_params());

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
      std::swap(order[i - 1], order[j]);
    }
    std::size_t start = 0;
    while (start < n) {
      std::size_t stop = std::min(n, start + cfg.batch_size);
      // batch norm cannot take a trailing 1-sample batch
      if (use_batchnorm && n - start > cfg.batch_size &&
          n - (start + cfg.batch_size) == 1)
        stop = start + cfg.batch_size - 1;
      std::size_t B = stop - start;
      if (use_batchnorm && B < 2) break;  // n == 1 was rejected above
      std::vector<std::array<double, kWindowLen>> xs(B);
      std::vector<int> by(B);
      std::vector<double> bw(B);
      for (std::size_t k = 0; k < B; ++k) {
        std::size_t i = order[start + k];
        xs[k] = scaled[i];
        by[k] = ys[i];
        bw[k] = ys[i] == 1 ? w1 : w0;
      }
      if (use_batchnorm) {
        // refresh running stats on this batch
        std::vector<std::vector<double>> hs(B);
        for (std::size_t k = 0; k < B; ++k)
          hs[k] = model.lstm_.forward(
              std::span<const double>(xs[k].data(), kWindowLen), nullptr);
        model.bn_.forward_train(hs, nullptr, true);
      }
      model.batch_grad_train(xs, by, bw, grad);
      for (std::size_t j = 0; j < grad.size(); ++j)
        model.param_at(j) -= cfg.learning_rate * grad[j];
      start = stop;
    }
    // epoch loss over the full set in train-mode batches
    std::vector<std::array<double, kWindowLen>> all_x(scaled.begin(),
                                                      scaled.end());
    std::vector<double> all_w(n);
    for (std::size_t i = 0; i < n; ++i) all_w[i] = ys[i] == 1 ? w1 : w0;
    double loss = use_batchnorm && n < 2
                      ? 0.0
                      : model.batch_loss_train(all_x, ys, all_w);
    if (!std::isfinite(loss))
      throw std::runtime_error("train_lstm: loss became non-finite at epoch " +
                               std::to_string(epoch) +
                               "; lower the learning rate");
    model.loss_history_.push_back(loss);
  }
  return model;
}

std::string LstmNetModel::to_json() const {
  nlohmann::json j;
  j["kind"] = kind();
  j["threshold"] = threshold_;
  j["hidden"] = lstm_.hidden();
  j["lstm_params"] = lstm_.params();
  j["use_bn"] = use_bn_;
  if (use_bn_) {
    j["bn"] = {{"gamma", bn_.gamma},
               {"beta", bn_.beta},
               {"running_mean", bn_.running_mean},
               {"running_var", bn_.running_var},
               {"eps", bn_.eps},
               {"momentum", bn_.momentum}};
  }
  j["head"] = {{"in", head_.in()},
               {"h1", head_.h1()},
               {"h2", head_.h2()},
               {"params", head_.params()}};
  j["scaler"] = {{"identity", scaler_.identity},
                 {"mean", scaler_.mean},
                 {"std", scaler_.std}};
  return j.dump();
}

std::unique_ptr<LstmNetModel> LstmNetModel::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  std::string kind = j.at("kind").get<std::string>();
  if (kind != "lstm" && kind != "lstm-bn")
    throw std::invalid_argument("LstmNetModel: wrong kind tag");
  auto m = std::make_unique<LstmNetModel>();
  m->threshold_ = j.at("threshold").get<double>();
  m->use_bn_ = j.at("use_bn").get<bool>();
  m->lstm_ = LstmCore(j.at("hidden").get<std::size_t>());
  m->lstm_.params() = j.at("lstm_params").get<std::vector<double>>();
  if (m->use_bn_) {
    const auto& bj = j.at("bn");
    m->bn_.gamma = bj.at("gamma").get<std::vector<double>>();
    m->bn_.beta = bj.at("beta").get<std::vector<double>>();
    m->bn_.running_mean = bj.at("running_mean").get<std::vector<double>>();
    m->bn_.running_var = bj.at("running_var").get<std::vector<double>>();
    m->bn_.eps = bj.at("eps").get<double>();
    m->bn_.momentum = bj.at("momentum").get<double>();
  }
  const auto& hj = j.at("head");
  m->head_ = DenseCore(hj.at("in").get<std::size_t>(),
                       hj.at("h1").get<std::size_t>(),
                       hj.at("h2").get<std::size_t>());
  m->head_.params() = hj.at("params").get<std::vector<double>>();
  m->scaler_.identity = j.at("scaler").at("identity").get<bool>();
  auto mean = j.at("scaler").at("mean").get<std::vector<double>>();
  auto stdv = j.at("scaler").at("std").get<std::vector<double>>();
  std::copy(mean.begin(), mean.end(), m->scaler_.mean.begin());
  std::copy(stdv.begin(), stdv.end(), m->scaler_.std.begin());
  return m;
}

}  // namespace bns
