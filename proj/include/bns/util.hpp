#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bns {

// Compensated (Kahan) accumulator so parallel-order reductions and long
// sums stay reproducible to the last ulp.
class KahanSum {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double kahan_total(std::span<const double> xs);
double mean_of(std::span<const double> xs);
double median_of(std::vector<double> xs);  // by value: sorts a copy
double variance_of(std::span<const double> xs);  // unbiased (n-1)

// Shortest round-trip decimal formatting (std::to_chars), locale-free.
std::string fmt_double(double x);
// Fixed decimals, e.g. fmt_fixed(1.005, 2) -> "1.00"/"1.01" per printf.
std::string fmt_fixed(double x, int decimals);

std::uint64_t fnv1a64(std::string_view bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Minimal CSV split: honors double quotes, no embedded newlines.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace bns
