#include "uwbnlos/experiments.hpp"

#include <cmath>
#include <string>

#include "uwbnlos/dataset.hpp"
#include "uwbnlos/error.hpp"
#include "uwbnlos/rng.hpp"

namespace uwbnlos {

EvalReport evaluate_model(const ClassifierModel& model, std::span<const LabeledFeatureRow> rows) {
  if (!model.epsilon_log) throw StateError("evaluate: threshold epsilon is not set");
  std::vector<double> scores;
  std::vector<Label> predictions;
  std::vector<Label> labels;
  for (const auto& row : rows) {
    if (row.label == Label::Unlabeled) continue;
    const double s = score(model, row.features).log_prob;
    scores.push_back(s);
    predictions.push_back(classify_score(s, *model.epsilon_log));
    labels.push_back(row.label);
  }
  return make_report(scores, predictions, labels);
}

PipelineResult run_pipeline(std::span<const LabeledFeatureRow> rows,
                            const PipelineOptions& options, std::uint64_t seed) {
  const auto split = split_train_validate(rows, options.train_fraction, seed);
  PipelineResult result;
  result.model = train(std::span<const LabeledFeatureRow>(split.train), options.family,
                       options.lambda, options.train);
  tune_threshold(result.model, split.validate);
  result.report = evaluate_model(result.model, rows);
  return result;
}

std::vector<RatioPoint> ratio_sweep(std::span<const LabeledFeatureRow> los_pool,
                                    std::span<const LabeledFeatureRow> nlos_pool,
                                    std::span<const double> ratios, int trials,
                                    std::uint64_t seed, const PipelineOptions& options) {
  if (trials < 1) throw ValidationError("ratio_sweep: trials must be >= 1");
  for (const auto& row : los_pool) {
    if (row.label != Label::LoS) throw ValidationError("ratio_sweep: LoS pool has a non-LoS row");
  }
  for (const auto& row : nlos_pool) {
    if (row.label != Label::NLoS) {
      throw ValidationError("ratio_sweep: NLoS pool has a non-NLoS row");
    }
  }

  std::vector<RatioPoint> table;
  for (const double r : ratios) {
    if (!(r > 0.0 && r <= 1.0)) {
      throw ValidationError("ratio_sweep: ratio " + std::to_string(r) + " outside (0, 1]");
    }
    // Guard against r * n landing a hair below an integer.
    const auto k = static_cast<std::size_t>(std::floor(r * double(los_pool.size()) + 1e-9));
    if (k > nlos_pool.size()) {
      throw InsufficientDataError("ratio_sweep: ratio " + std::to_string(r) + " needs " +
                                  std::to_string(k) + " NLoS rows, pool has " +
                                  std::to_string(nlos_pool.size()));
    }
    if (k == 0) throw InsufficientDataError("ratio_sweep: ratio selects no NLoS rows");

    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t trial_seed = Rng::derive(seed, static_cast<std::uint64_t>(t));
      // Partial Fisher-Yates: the first k indices are a uniform subset.
      std::vector<std::size_t> idx(nlos_pool.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      Rng pick(Rng::derive(trial_seed, 1));
      for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(pick.below(idx.size() - i));
        std::swap(idx[i], idx[j]);
      }
      std::vector<LabeledFeatureRow> mix(los_pool.begin(), los_pool.end());
      mix.reserve(los_pool.size() + k);
      for (std::size_t i = 0; i < k; ++i) mix.push_back(nlos_pool[idx[i]]);

      const auto result = run_pipeline(mix, options, Rng::derive(trial_seed, 2));
      sum += *result.report.metrics.accuracy;
    }
    table.push_back({r, k, sum / double(trials)});
  }
  return table;
}

ThresholdComparison compare_static_dynamic(const ClassifierModel& model,
                                           std::span<const LabeledFeatureRow> stream,
                                           double lambda) {
  if (!model.epsilon_log) throw StateError("compare_static_dynamic: threshold is not set");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("compare_static_dynamic: lambda must lie in [0, 1]");
  }
  std::size_t labeled = 0;
  std::size_t static_ok = 0;
  std::size_t dynamic_ok = 0;
  const double eps_static = *model.epsilon_log;
  double eps = eps_static;
  for (const auto& row : stream) {
    if (row.label == Label::Unlabeled) continue;
    ++labeled;
    const double s = score(model, row.features).log_prob;
    if (classify_score(s, eps_static) == row.label) ++static_ok;
    if (classify_score(s, eps) == row.label) ++dynamic_ok;
    eps = threshold_step(eps, lambda, s, row.label);
  }
  if (labeled == 0) throw InsufficientDataError("compare_static_dynamic: empty stream");
  return {double(static_ok) / double(labeled), double(dynamic_ok) / double(labeled), eps};
}

}  // namespace uwbnlos
