#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bns {

struct PriceRecord {
  std::string date;  // ISO-8601 calendar day
  int year = 0;
  std::size_t index = 0;  // 0-based, consecutive after sorting by date
  double close = 0.0;     // USD, strictly positive
};

// Validated daily close series. Non-trading days are simply absent; the
// index counts available records.
class PriceSeries {
 public:
  static PriceSeries from_records(std::vector<PriceRecord> records);

  const std::vector<PriceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  double close(std::size_t i) const { return records_[i].close; }

  std::vector<double> closes() const;
  // close_t - close_{t-1} for t = 1..n-1
  std::vector<double> changes() const;
  // 100 * (close_t - close_{t-1}) / close_{t-1}
  std::vector<double> pct_changes() const;

  std::string to_csv() const;  // index,date,close with round-trip doubles

 private:
  std::vector<PriceRecord> records_;
};

struct CsvSchema {
  std::string date_column = "Date";
  std::string close_column = "Close";
};

// Reads, validates and sorts a close-price CSV. Row-level problems name the
// offending 1-based line.
PriceSeries load_csv(const std::string& path, const CsvSchema& schema = {});
PriceSeries parse_csv(const std::string& content, const CsvSchema& schema = {},
                      const std::string& origin = "<memory>");

struct SeriesStats {
  double mean_change = 0.0;
  double median_change = 0.0;
  double max_change = 0.0;
  double min_change = 0.0;
  double mean_pct = 0.0;
  double median_pct = 0.0;
  double max_pct = 0.0;
  double min_pct = 0.0;

  std::string to_json() const;  // full precision, the eight fields above
};

SeriesStats summary_stats(const PriceSeries& series);

enum class PlotKind { kClose, kYearlyBox, kHistogramChange, kHistogramPct };

PlotKind plot_kind_from_string(const std::string& name);

// CSV payload for external plotting:
//   close:            index,date,close
//   yearly-box:       year,min,q1,median,q3,max        (type-7 quantiles)
//   histogram-change: bin_low,bin_high,count
//   histogram-pct:    bin_low,bin_high,count
std::string emit_plot_data(const PriceSeries& series, PlotKind kind,
                           std::size_t bins = 20);

}  // namespace bns
