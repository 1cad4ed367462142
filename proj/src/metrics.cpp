#include "bns/metrics.hpp"

#include <sstream>
#include <stdexcept>

#include "bns/util.hpp"

namespace bns {

double ConfusionMatrix::accuracy() const {
  std::size_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(n);
}

ConfusionMatrix confusion(std::span<const int> labels_true,
                          std::span<const int> labels_pred) {
  if (labels_true.size() != labels_pred.size())
    throw std::invalid_argument("confusion: length mismatch");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < labels_true.size(); ++i) {
    int t = labels_true[i], p = labels_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1))
      throw std::invalid_argument("confusion: labels must be 0 or 1");
    if (t == 1 && p == 1)
      ++m.tp;
    else if (t == 1 && p == 0)
      ++m.fn;
    else if (t == 0 && p == 1)
      ++m.fp;
    else
      ++m.tn;
  }
  return m;
}

namespace {
ClassMetrics metrics_from(std::size_t tp, std::size_t fp, std::size_t fn,
                          std::size_t support) {
  ClassMetrics c;
  c.support = support;
  if (tp + fp == 0) {
    c.precision = 0.0;
    c.degenerate = true;
  } else {
    c.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    c.recall = 0.0;
    c.degenerate = true;
  } else {
    c.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  if (c.precision + c.recall == 0.0) {
    c.f1 = 0.0;
    c.degenerate = true;
  } else {
    c.f1 = 2.0 * c.precision * c.recall / (c.precision + c.recall);
  }
  return c;
}
}  // namespace

ClassReport report_from_confusion(const ConfusionMatrix& m) {
  ClassReport r;
  r.matrix = m;
  r.cls1 = metrics_from(m.tp, m.fp, m.fn, m.tp + m.fn);
  // class 0 metrics by swapping the positive-class roles
  r.cls0 = metrics_from(m.tn, m.fn, m.fp, m.tn + m.fp);
  return r;
}

ClassReport report(std::span<const int> labels_true,
                   std::span<const int> labels_pred) {
  return report_from_confusion(confusion(labels_true, labels_pred));
}

std::string ClassReport::to_json() const {
  auto cls = [](const ClassMetrics& c) {
    std::ostringstream s;
    s << "{\"precision\": " << fmt_double(c.precision)
      << ", \"recall\": " << fmt_double(c.recall)
      << ", \"f1\": " << fmt_double(c.f1) << ", \"support\": " << c.support
      << ", \"degenerate\": " << (c.degenerate ? "true" : "false") << "}";
    return s.str();
  };
  std::ostringstream out;
  out << "{\n"
      << "  \"theta0\": " << cls(cls0) << ",\n"
      << "  \"theta1\": " << cls(cls1) << ",\n"
      << "  \"accuracy\": " << fmt_double(accuracy()) << ",\n"
      << "  \"confusion\": {\"tp\": " << matrix.tp << ", \"fp\": " << matrix.fp
      << ", \"tn\": " << matrix.tn << ", \"fn\": " << matrix.fn << "}\n"
      << "}\n";
  return out.str();
}

std::string ClassReport::to_text_table() const {
  std::ostringstream out;
  auto row = [&](const std::string& name, double v0, double v1) {
    out << name;
    for (std::size_t i = name.size(); i < 22; ++i) out << ' ';
    out << fmt_fixed(v0, 2) << "    " << fmt_fixed(v1, 2) << '\n';
  };
  out << "                      theta=0 theta=1\n";
  row("precision", cls0.precision, cls1.precision);
  row("recall", cls0.recall, cls1.recall);
  row("f1-score", cls0.f1, cls1.f1);
  out << "support               " << cls0.support << "      " << cls1.support
      << '\n';
  return out.str();
}

}  // namespace bns
