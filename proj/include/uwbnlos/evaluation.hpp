#pragma once

// Binary classification metrics with LoS as the positive class.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "uwbnlos/records.hpp"

namespace uwbnlos {

struct ConfusionMatrix {
  std::size_t tp = 0;  // LoS predicted LoS
  std::size_t fp = 0;  // NLoS predicted LoS
  std::size_t fn = 0;  // LoS predicted NLoS
  std::size_t tn = 0;  // NLoS predicted NLoS

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Empty optionals mark 0/0 ratios.
struct Metrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_score;
  std::optional<double> accuracy;
};

ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> labels);

// Precision tp/(tp+fp), recall tp/(tp+fn), F = 2PR/(P+R), accuracy (tp+tn)/total.
// F is evaluated as 2tp/(2tp+fp+fn), which is the same quantity rounded once.
Metrics metrics(const ConfusionMatrix& cm);

inline std::optional<double> f_score(const ConfusionMatrix& cm) noexcept {
  if (cm.tp == 0) return std::nullopt;  // P or R is 0/0, or P + R = 0
  return 2.0 * double(cm.tp) / (2.0 * double(cm.tp) + double(cm.fp) + double(cm.fn));
}

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) ... (1,1), fpr non-decreasing
  double auc = 0.0;
};

// Higher score means more LoS-like. Tied scores form one step of the curve.
RocCurve roc(std::span<const double> scores, std::span<const Label> labels);

struct EvalReport {
  ConfusionMatrix confusion;
  Metrics metrics;
  RocCurve roc;
};

EvalReport make_report(std::span<const double> scores, std::span<const Label> predictions,
                       std::span<const Label> labels);

// `key=value` lines; undefined metrics are written as `undefined`.
void write_summary(const EvalReport& report, std::ostream& out);
void write_roc_csv(const RocCurve& curve, std::ostream& out);

}  // namespace uwbnlos
