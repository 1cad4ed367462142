#include "bns/windowing.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "bns/util.hpp"

namespace bns {

bool JumpSet::contains(std::size_t t) const {
  return std::binary_search(jump_indices.begin(), jump_indices.end(), t);
}

JumpSet detect_jumps(const PriceSeries& series, double k_percent) {
  if (!(k_percent > 0.0))
    throw std::invalid_argument("detect_jumps: k_percent must be > 0");
  if (series.size() < 2)
    throw std::invalid_argument("detect_jumps: need at least 2 records");
  JumpSet out;
  out.k_percent = k_percent;
  const auto& recs = series.records();
  for (std::size_t t = 1; t < recs.size(); ++t) {
    double drop = 100.0 * (recs[t - 1].close - recs[t].close) / recs[t - 1].close;
    if (drop >= k_percent) out.jump_indices.push_back(t);
  }
  return out;
}

std::size_t WindowDataset::count_theta(int value) const {
  std::size_t n = 0;
  for (const auto& r : rows)
    if (r.theta == value) ++n;
  return n;
}

std::string WindowDataset::to_csv() const {
  std::ostringstream out;
  out << "c0,c1,c2,c3,c4,c5,c6,start_index,theta\n";
  for (const auto& r : rows) {
    for (double f : r.features) out << fmt_double(f) << ',';
    out << r.start_index << ',' << r.theta << '\n';
  }
  return out.str();
}

WindowDataset build_dataset(const PriceSeries& series, const JumpSet& jumps) {
  WindowDataset ds;
  ds.k_percent = jumps.k_percent;
  std::size_t n = series.size();
  if (n < kWindowLen + kHorizon) return ds;  // empty, not an error
  ds.rows.reserve(n - kWindowLen - kHorizon + 1);
  for (std::size_t i = 0; i + kWindowLen + kHorizon <= n; ++i) {
    WindowRow row;
    row.start_index = i;
    for (std::size_t j = 0; j < kWindowLen; ++j)
      row.features[j] = series.close(i + j);
    std::size_t in_horizon = 0;
    for (std::size_t t = i + kWindowLen; t < i + kWindowLen + kHorizon; ++t)
      if (jumps.contains(t)) ++in_horizon;
    row.theta = in_horizon >= 2 ? 1 : 0;
    ds.rows.push_back(row);
  }
  return ds;
}

std::pair<WindowDataset, WindowDataset> split_by_range(
    const WindowDataset& dataset, const PriceSeries& series, IndexRange train,
    IndexRange test) {
  // lo > hi denotes an empty range (yields an empty split, not an error)
  auto empty = [](IndexRange r) { return r.lo > r.hi; };
  auto check = [&](IndexRange r, const char* name) {
    if (!empty(r) && r.hi >= series.size())
      throw std::invalid_argument(std::string("split: ") + name +
                                  " range outside series");
  };
  check(train, "train");
  check(test, "test");
  if (!empty(train) && !empty(test) && train.lo <= test.hi &&
      test.lo <= train.hi)
    throw std::invalid_argument("split: train and test ranges overlap");

  WindowDataset tr, te;
  tr.k_percent = te.k_percent = dataset.k_percent;
  for (const auto& row : dataset.rows) {
    if (!empty(train) && row.start_index >= train.lo &&
        row.start_index <= train.hi)
      tr.rows.push_back(row);
    else if (!empty(test) && row.start_index >= test.lo &&
             row.start_index <= test.hi)
      te.rows.push_back(row);
  }
  return {std::move(tr), std::move(te)};
}

}  // namespace bns
