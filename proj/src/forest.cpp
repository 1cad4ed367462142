#include "bns/forest.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "bns/rng.hpp"

namespace bns {

namespace {

struct Split {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gini = 2.0;
};

double gini_of(std::size_t c0, std::size_t c1) {
  std::size_t n = c0 + c1;
  if (n == 0) return 0.0;
  double p0 = static_cast<double>(c0) / static_cast<double>(n);
  double p1 = static_cast<double>(c1) / static_cast<double>(n);
  return 1.0 - p0 * p0 - p1 * p1;
}

class TreeBuilder {
 public:
  TreeBuilder(const WindowDataset& data, std::size_t max_depth,
              std::size_t features_per_split, RngStream& rng)
      : data_(data),
        max_depth_(max_depth),
        features_per_split_(features_per_split),
        rng_(rng) {}

  DecisionTree build(std::vector<std::size_t> sample) {
    tree_.nodes.clear();
    grow(std::move(sample), 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t> idx, std::size_t depth) {
    TreeNode node;
    for (std::size_t i : idx) {
      if (data_.rows[i].theta == 1)
        ++node.count1;
      else
        ++node.count0;
    }
    int self = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(node);

    bool pure = node.count0 == 0 || node.count1 == 0;
    bool depth_capped = max_depth_ > 0 && depth >= max_depth_;
    if (pure || depth_capped || idx.size() < 2) return self;

    Split best = best_split(idx);
    if (!best.found) return self;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      if (data_.rows[i].features[static_cast<std::size_t>(best.feature)] <=
          best.threshold)
        left.push_back(i);
      else
        right.push_back(i);
    }
    if (left.empty() || right.empty()) return self;

    tree_.nodes[static_cast<std::size_t>(self)].feature = best.feature;
    tree_.nodes[static_cast<std::size_t>(self)].threshold = best.threshold;
    int l = grow(std::move(left), depth + 1);
    int r = grow(std::move(right), depth + 1);
    tree_.nodes[static_cast<std::size_t>(self)].left = l;
    tree_.nodes[static_cast<std::size_t>(self)].right = r;
    return self;
  }

  Split best_split(const std::vector<std::size_t>& idx) {
    // uniform feature subset without replacement, re-drawn at every node
    std::array<int, kWindowLen> feats;
    std::iota(feats.begin(), feats.end(), 0);
    for (std::size_t j = 0; j < features_per_split_; ++j) {
      std::size_t pick =
          j + static_cast<std::size_t>(rng_.next_u64() % (kWindowLen - j));
      std::swap(feats[j], feats[pick]);
    }
    std::array<int, kWindowLen> chosen{};
    std::copy_n(feats.begin(), features_per_split_, chosen.begin());
    // deterministic tie-breaks: lowest feature index, then lowest threshold
    std::sort(chosen.begin(), chosen.begin() + static_cast<long>(features_per_split_));

    Split best;
    std::vector<std::pair<double, int>> vals(idx.size());
    for (std::size_t jj = 0; jj < features_per_split_; ++jj) {
      int f = chosen[jj];
      for (std::size_t k = 0; k < idx.size(); ++k)
        vals[k] = {data_.rows[idx[k]].features[static_cast<std::size_t>(f)],
                   data_.rows[idx[k]].theta};
      std::sort(vals.begin(), vals.end());
      std::size_t total1 = 0;
      for (auto& [v, y] : vals) total1 += static_cast<std::size_t>(y);
      std::size_t n = vals.size();
      std::size_t left0 = 0, left1 = 0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        if (vals[k].second == 1)
          ++left1;
        else
          ++left0;
        if (vals[k].first == vals[k + 1].first) continue;
        std::size_t right1 = total1 - left1;
        std::size_t right0 = (n - k - 1) - right1;
        double nl = static_cast<double>(k + 1), nr = static_cast<double>(n - k - 1);
        double g = (nl * gini_of(left0, left1) + nr * gini_of(right0, right1)) /
                   static_cast<double>(n);
        double thr = 0.5 * (vals[k].first + vals[k + 1].first);
        if (g < best.gini - 1e-15 ||
            (std::abs(g - best.gini) <= 1e-15 &&
             (f < best.feature ||
              (f == best.feature && thr < best.threshold)))) {
          best.found = true;
          best.gini = g;
          best.feature = f;
          best.threshold = thr;
        }
      }
    }
    return best;
  }

  const WindowDataset& data_;
  std::size_t max_depth_;
  std::size_t features_per_split_;
  RngStream& rng_;
  DecisionTree tree_;
};

}  // namespace

int DecisionTree::predict_class(const std::array<double, kWindowLen>& x) const {
  int node = 0;
  for (;;) {
    const TreeNode& n = nodes[static_cast<std::size_t>(node)];
    if (n.feature < 0) {
      // leaf ties go to class 0
      return n.count1 > n.count0 ? 1 : 0;
    }
    node = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                 : n.right;
  }
}

double ForestModel::prob_theta1(const std::array<double, kWindowLen>& raw) const {
  if (trees_.empty()) throw std::runtime_error("ForestModel: not trained");
  std::size_t votes1 = 0;
  for (const auto& t : trees_)
    votes1 += static_cast<std::size_t>(t.predict_class(raw));
  return static_cast<double>(votes1) / static_cast<double>(trees_.size());
}

ForestModel train_forest(const WindowDataset& train, const TrainConfig& cfg) {
  cfg.validate();
  if (train.rows.empty())
    throw std::invalid_argument("train_forest: empty training set");
  if (cfg.trees_count < 1)
    throw std::invalid_argument("train_forest: trees_count must be >= 1");
  if (cfg.features_per_split < 1 || cfg.features_per_split > kWindowLen)
    throw std::invalid_argument("train_forest: features_per_split must be 1..7");

  ForestModel model;
  model.threshold_ = cfg.linear_threshold;
  model.max_depth_ = cfg.max_depth;
  model.features_per_split_ = cfg.features_per_split;
  model.trees_.resize(cfg.trees_count);
  std::size_t n = train.rows.size();
  // one stream per tree so parallel training would not change results
  for (std::size_t t = 0; t < cfg.trees_count; ++t) {
    RngStream rng(cfg.rng_seed, t, Draw::kGeneric);
    std::vector<std::size_t> sample(n);
    if (cfg.bootstrap) {
      for (auto& s : sample) s = static_cast<std::size_t>(rng.next_u64() % n);
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    TreeBuilder builder(train, cfg.max_depth, cfg.features_per_split, rng);
    model.trees_[t] = builder.build(std::move(sample));
  }
  return model;
}

std::string ForestModel::to_json() const {
  nlohmann::json j;
  j["kind"] = "rf";
  j["threshold"] = threshold_;
  j["max_depth"] = max_depth_;
  j["features_per_split"] = features_per_split_;
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes)
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.count0,
                       n.count1});
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j.dump();
}

std::unique_ptr<ForestModel> ForestModel::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (j.at("kind") != "rf")
    throw std::invalid_argument("ForestModel: wrong kind tag");
  auto m = std::make_unique<ForestModel>();
  m->threshold_ = j.at("threshold").get<double>();
  m->max_depth_ = j.at("max_depth").get<std::size_t>();
  m->features_per_split_ = j.at("features_per_split").get<std::size_t>();
  for (const auto& tj : j.at("trees")) {
    DecisionTree t;
    for (const auto& nj : tj) {
      TreeNode n;
      n.feature = nj.at(0).get<int>();
      n.threshold = nj.at(1).get<double>();
      n.left = nj.at(2).get<int>();
      n.right = nj.at(3).get<int>();
      n.count0 = nj.at(4).get<std::size_t>();
      n.count1 = nj.at(5).get<std::size_t>();
      t.nodes.push_back(n);
    }
    m->trees_.push_back(std::move(t));
  }
  return m;
}

}  // namespace bns
