#pragma once

// Seeded synthetic data: feature-level datasets drawn from per-class GGD
// profiles, and ranging-level two-way-ranging logs over a scene with NLoS
// episodes. These stand in for measured campaigns; the default profiles are
// calibrated to DW1000-like register magnitudes, not to any measured truth.

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "uwbnlos/distfit.hpp"
#include "uwbnlos/features.hpp"
#include "uwbnlos/localization.hpp"
#include "uwbnlos/records.hpp"
#include "uwbnlos/rng.hpp"

namespace uwbnlos {

// Per-class feature laws. The RX level is not drawn on its own: it is
// fp_level + threshold_power so every generated row satisfies the feature
// identity threshold = RX - FP.
//
// A fraction of rows can be replaced by multipath outliers: the range gains
// an excess drawn uniformly from [0.5, 1.5] * outlier_range_excess_m and the
// threshold power is shifted by outlier_threshold_shift_db. The label is kept.
struct ClassProfile {
  GgdParams<double> distance;
  GgdParams<double> fp_level;
  GgdParams<double> threshold_power;
  double outlier_fraction = 0.0;
  double outlier_range_excess_m = 0.0;
  double outlier_threshold_shift_db = 0.0;
};

// GGD parameters from (mean, standard deviation, shape).
GgdParams<double> ggd_from_moments(double mean, double sd, double beta);

ClassProfile default_los_profile();
ClassProfile default_nlos_profile();

// |x - mu| / alpha = G^(1/beta) with G ~ Gamma(1/beta, 1); sign uniform.
double sample_ggd(const GgdParams<double>& params, Rng& rng);
std::vector<double> sample_ggd(const GgdParams<double>& params, std::size_t n, std::uint64_t seed);

FeatureVector sample_features(const ClassProfile& profile, Rng& rng);

// LoS rows first, then NLoS rows; record ids 0..n_los+n_nlos-1.
std::vector<LabeledFeatureRow> generate_feature_dataset(const ClassProfile& los_profile,
                                                        const ClassProfile& nlos_profile,
                                                        std::size_t n_los, std::size_t n_nlos,
                                                        std::uint64_t seed);

// Time-ordered rows with labels drawn independently: NLoS with probability
// nlos_fraction. Record ids start at first_id.
std::vector<LabeledFeatureRow> generate_feature_stream(const ClassProfile& los_profile,
                                                       const ClassProfile& nlos_profile,
                                                       std::size_t n, double nlos_fraction,
                                                       std::uint64_t seed,
                                                       std::uint64_t first_id = 0);

struct NlosEpisode {
  std::uint32_t anchor_id = 0;
  std::size_t start_index = 0;  // inclusive
  std::size_t end_index = 0;    // exclusive
};

struct SceneConfig {
  std::vector<Anchor> anchors;
  std::vector<Eigen::Vector2d> tag_path;
  double nlos_bias_m = 1.5;
  std::vector<NlosEpisode> nlos_episodes;
  double range_noise_sigma_m = 0.05;  // 0 gives noiseless timestamps
  std::uint64_t seed = 0;
  double t_reply_ns = 60000.0;
  std::uint32_t preamble_min = 980;
  std::uint32_t preamble_max = 1024;
  ClassProfile los_profile = default_los_profile();
  ClassProfile nlos_profile = default_nlos_profile();
  RadioConstants radio;
};

// One record per (path index, anchor) in path-major order, record_id =
// index * anchors + anchor position. Timestamps carry the geometry; the
// power registers are drawn from the class profile of the link state.
std::vector<RangingRecord> generate_ranging_log(const SceneConfig& scene);

// Inverts the FP/RX level formulas into register values for preamble count n.
void encode_power_registers(double fp_level_dbm, double rx_level_dbm, std::uint32_t n,
                            const RadioConstants& consts, Rng& rng, RangingRecord& record);

std::vector<Eigen::Vector2d> random_tag_path(std::size_t n, const Eigen::Vector2d& lower,
                                             const Eigen::Vector2d& upper, std::uint64_t seed);

// JSON scene file:
// {
//   "anchors": [{"anchor_id": 0, "x_m": 0.0, "y_m": 0.0}, ...],
//   "tag_path": [[x, y], ...],
//   "nlos_bias_m": 1.5,
//   "range_noise_sigma_m": 0.05,
//   "nlos_episodes": [{"anchor_id": 2, "start_index": 0, "end_index": 10}],
//   "seed": 7,
//   "t_reply_ns": 60000          (optional)
// }
SceneConfig read_scene(const std::filesystem::path& path);
SceneConfig parse_scene(std::string_view json_text);
std::string dump_scene(const SceneConfig& scene);

}  // namespace uwbnlos
