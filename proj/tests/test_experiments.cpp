#include <gtest/gtest.h>

#include "uwbnlos/error.hpp"
#include "uwbnlos/experiments.hpp"
#include "uwbnlos/synth.hpp"

using namespace uwbnlos;

namespace {

std::vector<LabeledFeatureRow> pool(std::size_t n_los, std::size_t n_nlos, std::uint64_t seed) {
  return generate_feature_dataset(default_los_profile(), default_nlos_profile(), n_los, n_nlos, seed);
}

ClassifierModel tuned_model(std::uint64_t seed) {
  return run_pipeline(pool(1000, 100, seed), PipelineOptions{}, seed).model;
}

}  // namespace

TEST(Pipeline, DeterministicPerSeed) {
  const auto rows = pool(500, 60, 1);
  const auto a = run_pipeline(rows, PipelineOptions{}, 3);
  const auto b = run_pipeline(rows, PipelineOptions{}, 3);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.report.confusion, b.report.confusion);
  EXPECT_EQ(a.report.confusion.total(), rows.size());
}

TEST(Pipeline, BeatsImbalanceBaseline) {
  for (const auto family : {Family::GD, Family::GGD}) {
    PipelineOptions o;
    o.family = family;
    const auto r = run_pipeline(pool(1000, 100, 2), o, 2);
    EXPECT_GT(*r.report.metrics.accuracy, 1000.0 / 1100.0);
  }
}

TEST(Evaluate, NeedsThreshold) {
  auto m = tuned_model(4);
  m.epsilon_log.reset();
  EXPECT_THROW(evaluate_model(m, pool(10, 10, 5)), StateError);
}

TEST(RatioSweep, NlosCountsFollowRatios) {
  const auto los = pool(1000, 0, 1);
  const auto nlos = pool(0, 1000, 2);
  const std::vector<double> ratios{0.1, 0.2, 0.5, 0.8, 1.0};
  const auto t = ratio_sweep(los, nlos, ratios, 1, 7);
  ASSERT_EQ(t.size(), 5u);
  const std::size_t expected[] = {100, 200, 500, 800, 1000};
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(t[i].ratio, ratios[i]);
    EXPECT_EQ(t[i].nlos_count, expected[i]);
  }
}

TEST(RatioSweep, DeterministicPerSeed) {
  const auto los = pool(300, 0, 3);
  const auto nlos = pool(0, 300, 4);
  const std::vector<double> ratios{0.1, 0.5};
  const auto a = ratio_sweep(los, nlos, ratios, 1, 11);
  const auto b = ratio_sweep(los, nlos, ratios, 1, 11);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].mean_accuracy, b[i].mean_accuracy);
}

TEST(RatioSweep, Errors) {
  const auto los = pool(100, 0, 3);
  const auto nlos = pool(0, 50, 4);
  const std::vector<double> too_many{1.0};
  EXPECT_THROW(ratio_sweep(los, nlos, too_many, 1, 1), InsufficientDataError);
  const std::vector<double> outside{1.5};
  EXPECT_THROW(ratio_sweep(los, nlos, outside, 1, 1), ValidationError);
  const std::vector<double> ok{0.1};
  EXPECT_THROW(ratio_sweep(los, nlos, ok, 0, 1), ValidationError);
  EXPECT_THROW(ratio_sweep(nlos, los, ok, 1, 1), ValidationError);
}

TEST(CompareThresholds, StationaryStreamBarelyMoves) {
  const auto model = tuned_model(5);
  const auto stream = generate_feature_stream(default_los_profile(), default_nlos_profile(), 2000, 0.1, 6);
  const auto c = compare_static_dynamic(model, stream, 0.95);
  EXPECT_LE(std::abs(c.dynamic_accuracy - c.static_accuracy), 0.02);
}

TEST(CompareThresholds, ZeroLambdaIsStatic) {
  const auto model = tuned_model(6);
  const auto stream = generate_feature_stream(default_los_profile(), default_nlos_profile(), 1000, 0.3, 7);
  const auto c = compare_static_dynamic(model, stream, 0.0);
  EXPECT_EQ(c.dynamic_accuracy, c.static_accuracy);
  EXPECT_EQ(c.final_epsilon, *model.epsilon_log);
}

TEST(CompareThresholds, Errors) {
  const auto model = tuned_model(7);
  EXPECT_THROW(compare_static_dynamic(model, std::vector<LabeledFeatureRow>{}, 0.95),
               InsufficientDataError);
  const auto stream = pool(5, 5, 1);
  EXPECT_THROW(compare_static_dynamic(model, stream, 1.5), ValidationError);
}
