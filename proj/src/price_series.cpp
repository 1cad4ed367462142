#include "bns/price_series.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

#include "bns/util.hpp"

namespace bns {

namespace {

bool parse_iso_date(const std::string& s, int& year, int& month, int& day) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (s[i] < '0' || s[i] > '9') return false;
  year = std::stoi(s.substr(0, 4));
  month = std::stoi(s.substr(5, 2));
  day = std::stoi(s.substr(8, 2));
  if (month < 1 || month > 12 || day < 1) return false;
  static const int days_in[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int dmax = days_in[month - 1];
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) dmax = 29;
  return day <= dmax;
}

bool parse_double_strict(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  out = std::strtod(begin, &end);
  return errno == 0 && end == begin + s.size() && std::isfinite(out);
}

std::string pick_quantile_row(int year, const std::vector<double>& sorted) {
  // type-7 quantiles (linear interpolation), the numpy default
  auto q = [&](double p) {
    if (sorted.size() == 1) return sorted[0];
    double h = p * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(h);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  };
  std::ostringstream row;
  row << year << ',' << fmt_double(sorted.front()) << ',' << fmt_double(q(0.25))
      << ',' << fmt_double(q(0.5)) << ',' << fmt_double(q(0.75)) << ','
      << fmt_double(sorted.back()) << '\n';
  return row.str();
}

std::string histogram_csv(const std::vector<double>& values, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  if (values.empty()) throw std::invalid_argument("histogram: no values");
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    std::size_t idx;
    if (width == 0.0) {
      idx = 0;
    } else {
      idx = static_cast<std::size_t>((v - lo) / width);
      if (idx >= bins) idx = bins - 1;  // top edge inclusive
    }
    ++counts[idx];
  }
  std::ostringstream out;
  out << "bin_low,bin_high,count\n";
  for (std::size_t i = 0; i < bins; ++i) {
    double a = lo + width * static_cast<double>(i);
    double b = (i + 1 == bins) ? hi : lo + width * static_cast<double>(i + 1);
    out << fmt_double(a) << ',' << fmt_double(b) << ',' << counts[i] << '\n';
  }
  return out.str();
}

}  // namespace

PriceSeries PriceSeries::from_records(std::vector<PriceRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const PriceRecord& a, const PriceRecord& b) {
                     return a.date < b.date;  // ISO dates sort lexically
                   });
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0 && records[i].date == records[i - 1].date)
      throw std::runtime_error("duplicate date: " + records[i].date);
    if (!(records[i].close > 0.0) || !std::isfinite(records[i].close))
      throw std::runtime_error("non-positive close at date " + records[i].date);
    records[i].index = i;
  }
  PriceSeries s;
  s.records_ = std::move(records);
  return s;
}

std::vector<double> PriceSeries::closes() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.close);
  return out;
}

std::vector<double> PriceSeries::changes() const {
  std::vector<double> out;
  if (records_.size() < 2) return out;
  out.reserve(records_.size() - 1);
  for (std::size_t t = 1; t < records_.size(); ++t)
    out.push_back(records_[t].close - records_[t - 1].close);
  return out;
}

std::vector<double> PriceSeries::pct_changes() const {
  std::vector<double> out;
  if (records_.size() < 2) return out;
  out.reserve(records_.size() - 1);
  for (std::size_t t = 1; t < records_.size(); ++t)
    out.push_back(100.0 * (records_[t].close - records_[t - 1].close) /
                  records_[t - 1].close);
  return out;
}

std::string PriceSeries::to_csv() const {
  std::ostringstream out;
  out << "index,Date,Close\n";
  for (const auto& r : records_)
    out << r.index << ',' << r.date << ',' << fmt_double(r.close) << '\n';
  return out.str();
}

PriceSeries load_csv(const std::string& path, const CsvSchema& schema) {
  return parse_csv(read_file(path), schema, path);
}

PriceSeries parse_csv(const std::string& content, const CsvSchema& schema,
                      const std::string& origin) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(origin + ": empty file");
  auto header = split_csv_line(line);
  long date_col = -1, close_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == schema.date_column) date_col = static_cast<long>(i);
    if (header[i] == schema.close_column) close_col = static_cast<long>(i);
  }
  if (date_col < 0)
    throw std::runtime_error(origin + ": missing date column '" +
                             schema.date_column + "'");
  if (close_col < 0)
    throw std::runtime_error(origin + ": missing close column '" +
                             schema.close_column + "'");

  std::vector<PriceRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    auto fail = [&](const std::string& what) -> std::runtime_error {
      return std::runtime_error(origin + ":" + std::to_string(lineno) + ": " +
                                what);
    };
    if (cells.size() <= static_cast<std::size_t>(std::max(date_col, close_col)))
      throw fail("too few columns");
    PriceRecord rec;
    rec.date = cells[static_cast<std::size_t>(date_col)];
    int y, m, d;
    if (!parse_iso_date(rec.date, y, m, d))
      throw fail("unparsable date '" + rec.date + "'");
    rec.year = y;
    const std::string& close_str = cells[static_cast<std::size_t>(close_col)];
    if (!parse_double_strict(close_str, rec.close))
      throw fail("non-numeric close '" + close_str + "'");
    if (!(rec.close > 0.0))
      throw fail("non-positive close '" + close_str + "'");
    records.push_back(std::move(rec));
  }
  return PriceSeries::from_records(std::move(records));
}

SeriesStats summary_stats(const PriceSeries& series) {
  if (series.size() < 2)
    throw std::invalid_argument("summary_stats: need at least 2 records");
  auto ch = series.changes();
  auto pc = series.pct_changes();
  SeriesStats s;
  s.mean_change = mean_of(ch);
  s.median_change = median_of(ch);
  s.max_change = *std::max_element(ch.begin(), ch.end());
  s.min_change = *std::min_element(ch.begin(), ch.end());
  s.mean_pct = mean_of(pc);
  s.median_pct = median_of(pc);
  s.max_pct = *std::max_element(pc.begin(), pc.end());
  s.min_pct = *std::min_element(pc.begin(), pc.end());
  return s;
}

std::string SeriesStats::to_json() const {
  std::ostringstream out;
  out << "{\n"
      << "  \"mean_change\": " << fmt_double(mean_change) << ",\n"
      << "  \"median_change\": " << fmt_double(median_change) << ",\n"
      << "  \"max_change\": " << fmt_double(max_change) << ",\n"
      << "  \"min_change\": " << fmt_double(min_change) << ",\n"
      << "  \"mean_pct\": " << fmt_double(mean_pct) << ",\n"
      << "  \"median_pct\": " << fmt_double(median_pct) << ",\n"
      << "  \"max_pct\": " << fmt_double(max_pct) << ",\n"
      << "  \"min_pct\": " << fmt_double(min_pct) << "\n"
      << "}\n";
  return out.str();
}

PlotKind plot_kind_from_string(const std::string& name) {
  if (name == "close") return PlotKind::kClose;
  if (name == "yearly-box") return PlotKind::kYearlyBox;
  if (name == "histogram-change") return PlotKind::kHistogramChange;
  if (name == "histogram-pct") return PlotKind::kHistogramPct;
  throw std::invalid_argument("unknown plot kind: " + name);
}

std::string emit_plot_data(const PriceSeries& series, PlotKind kind,
                           std::size_t bins) {
  switch (kind) {
    case PlotKind::kClose: {
      std::ostringstream out;
      out << "index,date,close\n";
      for (const auto& r : series.records())
        out << r.index << ',' << r.date << ',' << fmt_double(r.close) << '\n';
      return out.str();
    }
    case PlotKind::kYearlyBox: {
      std::map<int, std::vector<double>> by_year;
      for (const auto& r : series.records()) by_year[r.year].push_back(r.close);
      std::ostringstream out;
      out << "year,min,q1,median,q3,max\n";
      for (auto& [year, vals] : by_year) {
        std::sort(vals.begin(), vals.end());
        out << pick_quantile_row(year, vals);
      }
      return out.str();
    }
    case PlotKind::kHistogramChange:
      return histogram_csv(series.changes(), bins);
    case PlotKind::kHistogramPct:
      return histogram_csv(series.pct_changes(), bins);
  }
  throw std::invalid_argument("unknown plot kind");
}

}  // namespace bns
