#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "bns/price_series.hpp"

namespace bns {

inline constexpr std::size_t kWindowLen = 7;
inline constexpr std::size_t kHorizon = 7;

// Indices t where the close dropped by at least k_percent relative to the
// previous close: 100*(close_{t-1} - close_t)/close_{t-1} >= k_percent.
// Rises never count.
struct JumpSet {
  double k_percent = 2.0;
  std::vector<std::size_t> jump_indices;  // sorted, each >= 1

  bool contains(std::size_t t) const;
};

JumpSet detect_jumps(const PriceSeries& series, double k_percent);

struct WindowRow {
  std::array<double, kWindowLen> features{};  // closes i..i+6 in series order
  std::size_t start_index = 0;
  int theta = 0;  // 1 iff >= 2 jumps land in [i+7, i+13]
};

struct WindowDataset {
  std::vector<WindowRow> rows;
  double k_percent = 2.0;

  std::size_t size() const { return rows.size(); }
  std::size_t count_theta(int value) const;
  std::string to_csv() const;  // c0..c6,start_index,theta
};

// Stride-1 windows; trailing windows without a fully observed 7-day horizon
// are dropped, so a series shorter than 14 gives an empty dataset.
WindowDataset build_dataset(const PriceSeries& series, const JumpSet& jumps);

struct IndexRange {
  std::size_t lo = 0;
  std::size_t hi = 0;  // inclusive
};

// Membership by start_index only; ranges must not overlap and must lie
// inside the series index range.
std::pair<WindowDataset, WindowDataset> split_by_range(
    const WindowDataset& dataset, const PriceSeries& series, IndexRange train,
    IndexRange test);

}  // namespace bns
