#pragma once

// Value types shared by the dataset, features and classifier modules.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace uwbnlos {

enum class Label : std::uint8_t { LoS = 0, NLoS = 1, Unlabeled = 2 };

std::string_view to_string(Label label) noexcept;

// One raw two-way ranging exchange as logged by the tag.
struct RangingRecord {
  std::uint64_t record_id = 0;
  Label label = Label::Unlabeled;
  double f1 = 0.0;  // first-path harmonic amplitudes, register units
  double f2 = 0.0;
  double f3 = 0.0;
  std::uint32_t preamble_count = 1;
  double cir_power = 0.0;
  double noise_std = 0.0;
  std::optional<double> t_round_ns;
  std::optional<double> t_reply_ns;
  std::optional<double> measured_distance_m;
  std::uint32_t anchor_id = 0;

  friend bool operator==(const RangingRecord&, const RangingRecord&) = default;
};

inline constexpr std::size_t kFeatureCount = 4;

// Feature order used everywhere a model stores per-feature parameters.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "distance_m", "fp_level_dbm", "rx_level_dbm", "threshold_power_db"};

struct FeatureVector {
  double distance_m = 0.0;
  double fp_level_dbm = 0.0;
  double rx_level_dbm = 0.0;
  double threshold_power_db = 0.0;

  std::array<double, kFeatureCount> values() const noexcept {
    return {distance_m, fp_level_dbm, rx_level_dbm, threshold_power_db};
  }
  bool all_finite() const noexcept;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct LabeledFeatureRow {
  std::uint64_t record_id = 0;
  Label label = Label::Unlabeled;
  FeatureVector features;

  friend bool operator==(const LabeledFeatureRow&, const LabeledFeatureRow&) = default;
};

}  // namespace uwbnlos
