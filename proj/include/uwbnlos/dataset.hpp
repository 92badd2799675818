#pragma once

// CSV ingestion and serialization of raw ranging logs and feature files.
//
// Raw log header (exact, LF line endings):
//   record_id,label,f1,f2,f3,preamble_count,cir_power,noise_std,t_round_ns,t_reply_ns,measured_distance_m,anchor_id
// Feature file header:
//   record_id,label,distance_m,fp_level_dbm,rx_level_dbm,threshold_power_db
// Labels are 0 (LoS), 1 (NLoS) or empty (unlabeled). Optional numeric columns
// are empty when absent.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "uwbnlos/records.hpp"

namespace uwbnlos {

inline constexpr std::string_view kRawCsvHeader =
    "record_id,label,f1,f2,f3,preamble_count,cir_power,noise_std,t_round_ns,t_reply_ns,"
    "measured_distance_m,anchor_id";
inline constexpr std::string_view kFeatureCsvHeader =
    "record_id,label,distance_m,fp_level_dbm,rx_level_dbm,threshold_power_db";

// Throws ValidationError naming the offending field.
void validate(const RangingRecord& record);

std::vector<RangingRecord> parse_records(std::istream& in);
std::vector<RangingRecord> read_records(const std::filesystem::path& path);
void write_records(std::span<const RangingRecord> records, std::ostream& out);
void write_records(std::span<const RangingRecord> records, const std::filesystem::path& path);

std::vector<LabeledFeatureRow> parse_feature_rows(std::istream& in);
std::vector<LabeledFeatureRow> read_feature_rows(const std::filesystem::path& path);
// Values are written with 9 significant digits.
void write_feature_rows(std::span<const LabeledFeatureRow> rows, std::ostream& out);
void write_feature_rows(std::span<const LabeledFeatureRow> rows,
                        const std::filesystem::path& path);

struct Split {
  std::vector<RangingRecord> train;
  std::vector<RangingRecord> validate;
};

struct FeatureSplit {
  std::vector<LabeledFeatureRow> train;
  std::vector<LabeledFeatureRow> validate;
};

// Draws round(train_fraction * #LoS) LoS records for training after a seeded
// shuffle. Validation keeps the remaining LoS (shuffled order) followed by
// every NLoS record in input order. Unlabeled records go to neither side.
Split split_train_validate(std::span<const RangingRecord> records, double train_fraction,
                           std::uint64_t seed);
FeatureSplit split_train_validate(std::span<const LabeledFeatureRow> rows, double train_fraction,
                                  std::uint64_t seed);

}  // namespace uwbnlos
