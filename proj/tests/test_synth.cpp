#include <gtest/gtest.h>

#include <cmath>

#include "uwbnlos/dataset.hpp"
#include "uwbnlos/error.hpp"
#include "uwbnlos/experiments.hpp"
#include "uwbnlos/synth.hpp"

using namespace uwbnlos;

namespace {

SceneConfig square_scene() {
  SceneConfig sc;
  sc.anchors = {{0, {0, 0}}, {1, {10, 0}}, {2, {10, 10}}, {3, {0, 10}}};
  sc.tag_path = random_tag_path(50, {1, 1}, {9, 9}, 3);
  sc.seed = 4;
  return sc;
}

}  // namespace

TEST(SampleGgd, GaussianShapeVariance) {
  const GgdParams<double> p{1.0, 1.3, 2.0};
  const auto xs = sample_ggd(p, 100000, 1);
  const auto m = estimate_moments<double>(xs);
  EXPECT_NEAR(m.variance, p.alpha * p.alpha / 2.0, 0.02 * p.alpha * p.alpha / 2.0);
}

TEST(SampleGgd, LaplaceKurtosis) {
  const auto xs = sample_ggd(GgdParams<double>{0.0, 1.0, 1.0}, 100000, 2);
  EXPECT_NEAR(*estimate_moments<double>(xs).kurtosis_excess, 3.0, 0.3);
}

TEST(SampleGgd, Deterministic) {
  const GgdParams<double> p{0.0, 1.0, 1.5};
  EXPECT_EQ(sample_ggd(p, 1, 5), sample_ggd(p, 1, 5));
  EXPECT_NE(sample_ggd(p, 1, 5), sample_ggd(p, 1, 6));
  EXPECT_THROW(sample_ggd(p, 0, 5), ValidationError);
  EXPECT_THROW(sample_ggd(GgdParams<double>{0.0, -1.0, 1.5}, 3, 5), DomainError);
}

TEST(SampleGgd, FitterClosedLoop) {
  for (const double beta : {1.0, 1.5, 2.0, 4.0}) {
    const GgdParams<double> p{-2.0, 0.8, beta};
    const auto xs = sample_ggd(p, 100000, 10 + static_cast<std::uint64_t>(beta * 10));
    const auto q = fit_ggd<double>(xs);
    EXPECT_NEAR(q.mu, p.mu, 0.02 * p.alpha) << "beta " << beta;
    EXPECT_NEAR(q.alpha, p.alpha, 0.05 * p.alpha) << "beta " << beta;
    EXPECT_NEAR(q.beta, p.beta, 0.15) << "beta " << beta;
  }
}

TEST(FeatureDataset, Counts) {
  const auto rows = generate_feature_dataset(default_los_profile(), default_nlos_profile(), 1000, 100, 1);
  ASSERT_EQ(rows.size(), 1100u);
  std::size_t los = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].record_id, i);
    los += rows[i].label == Label::LoS;
    EXPECT_EQ(rows[i].features.threshold_power_db,
              rows[i].features.rx_level_dbm - rows[i].features.fp_level_dbm);
  }
  EXPECT_EQ(los, 1000u);
  const auto nlos = generate_feature_dataset(default_los_profile(), default_nlos_profile(), 0, 5, 1);
  ASSERT_EQ(nlos.size(), 5u);
  for (const auto& r : nlos) EXPECT_EQ(r.label, Label::NLoS);
}

TEST(FeatureDataset, NlosHasLargerPowerGap) {
  const auto rows = generate_feature_dataset(default_los_profile(), default_nlos_profile(), 10000, 10000, 2);
  double los = 0.0, nlos = 0.0;
  for (const auto& r : rows) {
    (r.label == Label::LoS ? los : nlos) += std::abs(r.features.threshold_power_db);
  }
  EXPECT_GT(nlos / 10000.0, los / 10000.0);
  EXPECT_NEAR(los / 10000.0, 3.0, 0.5);
  EXPECT_NEAR(nlos / 10000.0, 6.0, 0.5);
}

TEST(FeatureDataset, Reproducible) {
  const auto a = generate_feature_dataset(default_los_profile(), default_nlos_profile(), 50, 50, 9);
  const auto b = generate_feature_dataset(default_los_profile(), default_nlos_profile(), 50, 50, 9);
  EXPECT_EQ(a, b);
}

TEST(FeatureStream, LabelsFollowFraction) {
  const auto s = generate_feature_stream(default_los_profile(), default_nlos_profile(), 5000, 0.2, 3, 100);
  ASSERT_EQ(s.size(), 5000u);
  EXPECT_EQ(s.front().record_id, 100u);
  std::size_t nlos = 0;
  for (const auto& r : s) nlos += r.label == Label::NLoS;
  EXPECT_NEAR(double(nlos) / 5000.0, 0.2, 0.02);
  EXPECT_THROW(generate_feature_stream(default_los_profile(), default_nlos_profile(), 5, 1.5, 3),
               ValidationError);
}

TEST(RangingLog, NoiselessTimestampInversion) {
  SceneConfig sc;
  sc.anchors = {{0, {0, 0}}};
  sc.tag_path = {{5.99584916, 0.0}};
  sc.range_noise_sigma_m = 0.0;
  const auto log = generate_ranging_log(sc);
  ASSERT_EQ(log.size(), 1u);
  EXPECT_NEAR(*log[0].t_round_ns - *log[0].t_reply_ns, 40.0, 1e-6);
  EXPECT_EQ(*log[0].t_reply_ns, 60000.0);
  EXPECT_EQ(log[0].label, Label::LoS);
}

TEST(RangingLog, FullEpisodeBiasesEveryRange) {
  auto sc = square_scene();
  for (const auto& a : sc.anchors) sc.nlos_episodes.push_back({a.anchor_id, 0, sc.tag_path.size()});
  const auto log = generate_ranging_log(sc);
  ASSERT_EQ(log.size(), sc.tag_path.size() * sc.anchors.size());
  for (const auto& r : log) {
    EXPECT_EQ(r.label, Label::NLoS);
    const auto i = r.record_id / sc.anchors.size();
    const auto j = r.record_id % sc.anchors.size();
    const double truth = (sc.tag_path[i] - sc.anchors[j].position).norm();
    EXPECT_GE(extract(r).distance_m, truth + sc.nlos_bias_m - 3 * sc.range_noise_sigma_m);
  }
}

TEST(RangingLog, RecordsAreValidAndReproducible) {
  const auto sc = square_scene();
  const auto a = generate_ranging_log(sc);
  EXPECT_EQ(a, generate_ranging_log(sc));
  for (const auto& r : a) EXPECT_NO_THROW(validate(r));
}

TEST(RangingLog, Errors) {
  auto sc = square_scene();
  sc.nlos_episodes = {{9, 0, 1}};
  EXPECT_THROW(generate_ranging_log(sc), ValidationError);
  sc.nlos_episodes = {{1, 0, 999}};
  EXPECT_THROW(generate_ranging_log(sc), ValidationError);
  sc.nlos_episodes.clear();
  sc.nlos_bias_m = 0.0;
  EXPECT_THROW(generate_ranging_log(sc), ValidationError);
}

TEST(RangingLog, PipelineBeatsImbalanceBaseline) {
  auto sc = square_scene();
  sc.tag_path = random_tag_path(275, {1, 1}, {9, 9}, 11);
  sc.nlos_episodes = {{2, 0, 50}, {0, 200, 250}};
  std::vector<LabeledFeatureRow> rows;
  for (const auto& r : generate_ranging_log(sc)) rows.push_back(extract_row(r));
  std::size_t los = 0;
  for (const auto& r : rows) los += r.label == Label::LoS;
  const double baseline = double(los) / double(rows.size());
  const auto result = run_pipeline(rows, PipelineOptions{}, 1);
  EXPECT_GE(*result.report.metrics.accuracy, baseline);
}

TEST(Scene, JsonRoundTrip) {
  auto sc = square_scene();
  sc.nlos_episodes = {{2, 3, 9}};
  sc.range_noise_sigma_m = 0.0;
  const auto back = parse_scene(dump_scene(sc));
  EXPECT_EQ(back.anchors.size(), 4u);
  EXPECT_EQ(back.tag_path, sc.tag_path);
  EXPECT_EQ(back.nlos_episodes.size(), 1u);
  EXPECT_EQ(back.range_noise_sigma_m, 0.0);
  EXPECT_EQ(generate_ranging_log(back), generate_ranging_log(sc));
  EXPECT_THROW(parse_scene("{\"anchors\": ["), ParseError);
  EXPECT_THROW(parse_scene("{\"anchors\": []}"), SchemaError);
}
