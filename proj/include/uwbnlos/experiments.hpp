#pragma once

// Experiment drivers built from the classifier and evaluation primitives:
// the train/tune/evaluate pipeline, the LoS:NLoS ratio sweep and the
// static-vs-dynamic threshold comparison.

#include <cstdint>
#include <span>
#include <vector>

#include "uwbnlos/classifier.hpp"
#include "uwbnlos/evaluation.hpp"

namespace uwbnlos {

struct PipelineOptions {
  Family family = Family::GGD;
  double train_fraction = 0.7;
  double lambda = 0.95;
  TrainOptions train;
};

struct PipelineResult {
  ClassifierModel model;  // trained and tuned
  EvalReport report;      // on every labeled input row
};

// Splits, trains on the LoS training part, tunes epsilon on the validation
// part and evaluates on all labeled rows.
PipelineResult run_pipeline(std::span<const LabeledFeatureRow> rows,
                            const PipelineOptions& options, std::uint64_t seed);

// Scores and classifies every labeled row with a tuned model.
EvalReport evaluate_model(const ClassifierModel& model, std::span<const LabeledFeatureRow> rows);

struct RatioPoint {
  double ratio = 0.0;
  std::size_t nlos_count = 0;
  double mean_accuracy = 0.0;
};

// For each ratio r, floor(r * |LoS pool|) NLoS rows are drawn without
// replacement and the full pipeline is rerun. Trial t of every ratio uses the
// same derived seed, so ratios are compared on paired splits.
std::vector<RatioPoint> ratio_sweep(std::span<const LabeledFeatureRow> los_pool,
                                    std::span<const LabeledFeatureRow> nlos_pool,
                                    std::span<const double> ratios, int trials,
                                    std::uint64_t seed, const PipelineOptions& options = {});

struct ThresholdComparison {
  double static_accuracy = 0.0;
  double dynamic_accuracy = 0.0;
  double final_epsilon = 0.0;  // dynamic run
};

// Classifies the ordered stream twice: once with the tuned epsilon frozen and
// once updating epsilon after every sample with the given forgetting factor.
ThresholdComparison compare_static_dynamic(const ClassifierModel& model,
                                           std::span<const LabeledFeatureRow> stream,
                                           double lambda);

}  // namespace uwbnlos
