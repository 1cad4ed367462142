#include "bns/classifier.hpp"

#include <stdexcept>

#include <json.hpp>

#include "bns/forest.hpp"
#include "bns/logistic.hpp"
#include "bns/lstm.hpp"
#include "bns/nn.hpp"

namespace bns {

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be > 0");
  if (epochs == 0) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  if (hidden1 == 0 || hidden2 == 0 || lstm_hidden == 0)
    throw std::invalid_argument("hidden sizes must be >= 1");
  if (trees_count == 0) throw std::invalid_argument("trees_count must be >= 1");
  if (features_per_split == 0 || features_per_split > kWindowLen)
    throw std::invalid_argument("features_per_split must be in 1..7");
  if (bn_epsilon <= 0.0) throw std::invalid_argument("bn_epsilon must be > 0");
  if (!(class1_threshold > 0.0 && class1_threshold < 1.0))
    throw std::invalid_argument("class1_threshold must be in (0,1)");
  if (!(linear_threshold > 0.0 && linear_threshold < 1.0))
    throw std::invalid_argument("linear_threshold must be in (0,1)");
}

std::string TrainConfig::to_json() const {
  nlohmann::json j;
  j["learning_rate"] = learning_rate;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["hidden1"] = hidden1;
  j["hidden2"] = hidden2;
  j["lstm_hidden"] = lstm_hidden;
  j["trees_count"] = trees_count;
  j["max_depth"] = max_depth;
  j["features_per_split"] = features_per_split;
  j["bootstrap"] = bootstrap;
  j["rng_seed"] = rng_seed;
  j["bn_epsilon"] = bn_epsilon;
  j["bn_momentum"] = bn_momentum;
  j["class1_threshold"] = class1_threshold;
  j["linear_threshold"] = linear_threshold;
  j["standardize"] = standardize;
  j["class_weights"] = class_weights;
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  TrainConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("learning_rate", c.learning_rate);
  get("epochs", c.epochs);
  get("batch_size", c.batch_size);
  get("hidden1", c.hidden1);
  get("hidden2", c.hidden2);
  get("lstm_hidden", c.lstm_hidden);
  get("trees_count", c.trees_count);
  get("max_depth", c.max_depth);
  get("features_per_split", c.features_per_split);
  get("bootstrap", c.bootstrap);
  get("rng_seed", c.rng_seed);
  get("bn_epsilon", c.bn_epsilon);
  get("bn_momentum", c.bn_momentum);
  get("class1_threshold", c.class1_threshold);
  get("linear_threshold", c.linear_threshold);
  get("standardize", c.standardize);
  get("class_weights", c.class_weights);
  c.validate();
  return c;
}

std::vector<Prediction> predict_theta(const Classifier& model,
                                      const WindowDataset& rows) {
  std::vector<Prediction> out;
  out.reserve(rows.rows.size());
  for (const auto& row : rows.rows) {
    Prediction p;
    p.prob_theta1 = model.prob_theta1(row.features);
    p.label = p.prob_theta1 > model.threshold() ? 1 : 0;
    out.push_back(p);
  }
  return out;
}

std::unique_ptr<Classifier> classifier_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "lr") return LogisticModel::from_json(text);
  if (kind == "rf") return ForestModel::from_json(text);
  if (kind == "nn") return DenseNetModel::from_json(text);
  if (kind == "lstm" || kind == "lstm-bn") return LstmNetModel::from_json(text);
  throw std::invalid_argument("unknown model kind: " + kind);
}

std::unique_ptr<Classifier> train_model(const std::string& model,
                                        const WindowDataset& train,
                                        const TrainConfig& cfg) {
  if (model == "lr")
    return std::make_unique<LogisticModel>(train_logistic(train, cfg));
  if (model == "rf")
    return std::make_unique<ForestModel>(train_forest(train, cfg));
  if (model == "nn")
    return std::make_unique<DenseNetModel>(train_dense(train, cfg));
  if (model == "lstm")
    return std::make_unique<LstmNetModel>(train_lstm(train, cfg, false));
  if (model == "lstm-bn")
    return std::make_unique<LstmNetModel>(train_lstm(train, cfg, true));
  throw std::invalid_argument("unknown model: " + model +
                              " (expected lr|rf|nn|lstm|lstm-bn)");
}

}  // namespace bns
