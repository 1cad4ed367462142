#include "bns/scaler.hpp"

#include <cmath>
#include <stdexcept>

#include "bns/util.hpp"

namespace bns {

std::array<double, kWindowLen> FeatureScaler::transform(
    const std::array<double, kWindowLen>& x) const {
  if (identity) return x;
  std::array<double, kWindowLen> out;
  for (std::size_t j = 0; j < kWindowLen; ++j)
    out[j] = (x[j] - mean[j]) / std[j];
  return out;
}

std::array<double, kWindowLen> FeatureScaler::inverse(
    const std::array<double, kWindowLen>& x) const {
  if (identity) return x;
  std::array<double, kWindowLen> out;
  for (std::size_t j = 0; j < kWindowLen; ++j)
    out[j] = x[j] * std[j] + mean[j];
  return out;
}

FeatureScaler FeatureScaler::identity_scaler() {
  FeatureScaler s;
  s.identity = true;
  s.mean.fill(0.0);
  s.std.fill(1.0);
  return s;
}

FeatureScaler fit_scaler(const WindowDataset& train, double eps) {
  if (train.rows.empty())
    throw std::invalid_argument("fit_scaler: empty training set");
  FeatureScaler s;
  double n = static_cast<double>(train.rows.size());
  for (std::size_t j = 0; j < kWindowLen; ++j) {
    KahanSum sum;
    for (const auto& r : train.rows) sum.add(r.features[j]);
    s.mean[j] = sum.value() / n;
    KahanSum sq;
    for (const auto& r : train.rows) {
      double d = r.features[j] - s.mean[j];
      sq.add(d * d);
    }
    double var = sq.value() / n;  // population variance
    s.std[j] = std::sqrt(var);
    if (!(s.std[j] > eps)) s.std[j] = eps;
  }
  return s;
}

std::vector<std::array<double, kWindowLen>> apply_scaler(
    const FeatureScaler& scaler, const WindowDataset& rows) {
  std::vector<std::array<double, kWindowLen>> out;
  out.reserve(rows.rows.size());
  for (const auto& r : rows.rows) out.push_back(scaler.transform(r.features));
  return out;
}

}  // namespace bns
