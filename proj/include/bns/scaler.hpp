#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "bns/windowing.hpp"

namespace bns {

// Per-feature z-score scaler fitted on training rows only. Constant columns
// get an epsilon-floored std so transform stays finite.
struct FeatureScaler {
  std::array<double, kWindowLen> mean{};
  std::array<double, kWindowLen> std{};
  bool identity = false;  // raw-price fidelity mode

  std::array<double, kWindowLen> transform(
      const std::array<double, kWindowLen>& x) const;
  std::array<double, kWindowLen> inverse(
      const std::array<double, kWindowLen>& x) const;

  static FeatureScaler identity_scaler();
};

FeatureScaler fit_scaler(const WindowDataset& train, double eps = 1e-8);

std::vector<std::array<double, kWindowLen>> apply_scaler(
    const FeatureScaler& scaler, const WindowDataset& rows);

}  // namespace bns
