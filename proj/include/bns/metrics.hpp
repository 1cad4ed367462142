#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace bns {

// class 1 is the positive class
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  double accuracy() const;
};

ConfusionMatrix confusion(std::span<const int> labels_true,
                          std::span<const int> labels_pred);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool degenerate = false;  // some denominator was zero; metric reported 0.0
};

struct ClassReport {
  ClassMetrics cls0;
  ClassMetrics cls1;
  ConfusionMatrix matrix;

  double accuracy() const { return matrix.accuracy(); }
  std::string to_json() const;           // full precision
  std::string to_text_table() const;     // 2 decimals, paper-style rows
};

ClassReport report(std::span<const int> labels_true,
                   std::span<const int> labels_pred);
ClassReport report_from_confusion(const ConfusionMatrix& m);

}  // namespace bns
