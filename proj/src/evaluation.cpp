#include "uwbnlos/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "uwbnlos/error.hpp"

namespace uwbnlos {

ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> labels) {
  if (predictions.size() != labels.size()) {
    throw ValidationError("confusion: " + std::to_string(predictions.size()) +
                          " predictions vs " + std::to_string(labels.size()) + " labels");
  }
  if (predictions.empty()) throw InsufficientDataError("confusion: no samples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label p = predictions[i];
    const Label l = labels[i];
    if (p == Label::Unlabeled || l == Label::Unlabeled) {
      throw ValidationError("confusion: sample " + std::to_string(i) + " is unlabeled");
    }
    if (l == Label::LoS) {
      (p == Label::LoS ? cm.tp : cm.fn) += 1;
    } else {
      (p == Label::LoS ? cm.fp : cm.tn) += 1;
    }
  }
  return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
  Metrics m;
  const auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return double(num) / double(den);
  };
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.recall = ratio(cm.tp, cm.tp + cm.fn);
  if (m.precision && m.recall) m.f_score = f_score(cm);
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  return m;
}

RocCurve roc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("roc: scores and labels differ in length");
  }
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  for (const Label l : labels) {
    if (l == Label::LoS) {
      ++n_pos;
    } else if (l == Label::NLoS) {
      ++n_neg;
    } else {
      throw ValidationError("roc: unlabeled sample");
    }
  }
  if (n_pos == 0 || n_neg == 0) throw InsufficientDataError("roc: need both LoS and NLoS samples");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  double area2 = 0.0;  // twice the area, in units of (1/n_neg)(1/n_pos)
  while (i < order.size()) {
    const double s = scores[order[i]];
    const std::size_t tp0 = tp;
    const std::size_t fp0 = fp;
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] == Label::LoS ? tp : fp) += 1;
      ++i;
    }
    area2 += double(fp - fp0) * double(tp + tp0);
    curve.points.push_back({double(fp) / double(n_neg), double(tp) / double(n_pos)});
  }
  curve.auc = area2 / (2.0 * double(n_neg) * double(n_pos));
  return curve;
}

EvalReport make_report(std::span<const double> scores, std::span<const Label> predictions,
                       std::span<const Label> labels) {
  EvalReport report;
  report.confusion = confusion(predictions, labels);
  report.metrics = metrics(report.confusion);
  report.roc = roc(scores, labels);
  return report;
}

namespace {

std::string fixed(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string maybe(const std::optional<double>& v) { return v ? fixed(*v) : "undefined"; }

}  // namespace

void write_summary(const EvalReport& r, std::ostream& out) {
  const auto& cm = r.confusion;
  out << "samples=" << cm.total() << '\n'
      << "tp=" << cm.tp << '\n'
      << "fp=" << cm.fp << '\n'
      << "fn=" << cm.fn << '\n'
      << "tn=" << cm.tn << '\n'
      << "precision=" << maybe(r.metrics.precision) << '\n'
      << "recall=" << maybe(r.metrics.recall) << '\n'
      << "f_score=" << maybe(r.metrics.f_score) << '\n'
      << "accuracy=" << maybe(r.metrics.accuracy) << '\n'
      << "auc=" << fixed(r.roc.auc) << '\n';
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
  out << "fpr,tpr\n";
  char buf[64];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", p.fpr, p.tpr);
    out << buf;
  }
}

}  // namespace uwbnlos
