#include "uwbnlos/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_set>

#include "uwbnlos/error.hpp"
#include "uwbnlos/rng.hpp"

namespace uwbnlos {

std::string_view to_string(Label label) noexcept {
  switch (label) {
    case Label::LoS:
      return "LoS";
    case Label::NLoS:
      return "NLoS";
    case Label::Unlabeled:
      break;
  }
  return "Unlabeled";
}

bool FeatureVector::all_finite() const noexcept {
  const auto v = values();
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void check_header(std::string_view got, std::string_view expected) {
  if (got == expected) return;
  const auto g = split_fields(got);
  const auto e = split_fields(expected);
  for (std::size_t i = 0; i < std::max(g.size(), e.size()); ++i) {
    const std::string_view gi = i < g.size() ? g[i] : std::string_view("<missing>");
    const std::string_view ei = i < e.size() ? e[i] : std::string_view("<none>");
    if (gi != ei) {
      throw SchemaError("line 1, column " + std::to_string(i + 1) + ": expected header field '" +
                        std::string(ei) + "', got '" + std::string(gi) + "'");
    }
  }
  throw SchemaError("line 1: header mismatch");
}

// Context for parse errors: which line and, once known, which record.
struct LineContext {
  std::size_t line_no = 0;
  std::string record_id = "?";

  [[noreturn]] void fail(std::string_view column, std::string_view text) const {
    throw ParseError("line " + std::to_string(line_no) + " (record_id " + record_id +
                     "): column '" + std::string(column) + "' is not a valid number: '" +
                     std::string(text) + "'");
  }
};

double parse_double(std::string_view text, std::string_view column, const LineContext& ctx) {
  double value = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    ctx.fail(column, text);
  }
  return value;
}

std::optional<double> parse_optional(std::string_view text, std::string_view column,
                                     const LineContext& ctx) {
  if (text.empty()) return std::nullopt;
  return parse_double(text, column, ctx);
}

template <typename Int>
Int parse_integer(std::string_view text, std::string_view column, const LineContext& ctx) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    ctx.fail(column, text);
  }
  return value;
}

Label parse_label(std::string_view text, const LineContext& ctx) {
  if (text.empty()) return Label::Unlabeled;
  if (text == "0") return Label::LoS;
  if (text == "1") return Label::NLoS;
  throw ParseError("line " + std::to_string(ctx.line_no) + " (record_id " + ctx.record_id +
                   "): label must be 0, 1 or empty, got '" + std::string(text) + "'");
}

std::string_view label_field(Label label) {
  switch (label) {
    case Label::LoS:
      return "0";
    case Label::NLoS:
      return "1";
    case Label::Unlabeled:
      break;
  }
  return "";
}

// Shortest representation that parses back to the identical double.
void append_exact(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

void append_9g(std::string& out, double value) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.9g", value);
  out.append(buf, static_cast<std::size_t>(n));
}

void append_optional(std::string& out, const std::optional<double>& value) {
  if (value) append_exact(out, *value);
}

template <typename Fn>
void for_each_data_line(std::istream& in, std::string_view header, Fn&& fn) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  check_header(line, header);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(std::string_view(line), line_no);
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::size_t train_count(std::size_t los_count, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train_fraction must lie in (0, 1), got " +
                          std::to_string(train_fraction));
  }
  if (los_count == 0) throw InsufficientDataError("split_train_validate: no LoS records");
  const auto n = static_cast<std::size_t>(std::llround(train_fraction * double(los_count)));
  if (n == 0 || n >= los_count) {
    throw InsufficientDataError("split_train_validate: fraction " +
                                std::to_string(train_fraction) + " of " +
                                std::to_string(los_count) +
                                " LoS records leaves an empty partition");
  }
  return n;
}

template <typename Row>
std::pair<std::vector<Row>, std::vector<Row>> split_rows(std::span<const Row> rows,
                                                         double train_fraction,
                                                         std::uint64_t seed) {
  std::vector<std::size_t> los;
  std::vector<std::size_t> nlos;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].label == Label::LoS) los.push_back(i);
    if (rows[i].label == Label::NLoS) nlos.push_back(i);
  }
  const std::size_t n_train = train_count(los.size(), train_fraction);

  // Fisher-Yates, descending.
  Rng rng(seed);
  for (std::size_t i = los.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(los[i], los[j]);
  }

  std::pair<std::vector<Row>, std::vector<Row>> out;
  out.first.reserve(n_train);
  out.second.reserve(los.size() - n_train + nlos.size());
  for (std::size_t k = 0; k < los.size(); ++k) {
    (k < n_train ? out.first : out.second).push_back(rows[los[k]]);
  }
  for (const std::size_t idx : nlos) out.second.push_back(rows[idx]);
  return out;
}

}  // namespace

void validate(const RangingRecord& r) {
  const std::string id = " (record_id " + std::to_string(r.record_id) + ")";
  if (r.preamble_count < 1) throw ValidationError("preamble_count must be >= 1" + id);
  auto non_negative = [&](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string(name) + " must be finite and >= 0" + id);
    }
  };
  non_negative(r.f1, "f1");
  non_negative(r.f2, "f2");
  non_negative(r.f3, "f3");
  non_negative(r.cir_power, "cir_power");
  non_negative(r.noise_std, "noise_std");
  if (r.t_round_ns) non_negative(*r.t_round_ns, "t_round_ns");
  if (r.t_reply_ns) non_negative(*r.t_reply_ns, "t_reply_ns");
  if (r.measured_distance_m) non_negative(*r.measured_distance_m, "measured_distance_m");
  if (r.t_round_ns.has_value() != r.t_reply_ns.has_value()) {
    throw ValidationError("t_round_ns and t_reply_ns must be given together" + id);
  }
  if (r.t_round_ns && *r.t_round_ns < *r.t_reply_ns) {
    throw ValidationError("t_round_ns must be >= t_reply_ns" + id);
  }
  if (!r.t_round_ns && !r.measured_distance_m) {
    throw ValidationError("record needs timestamps or measured_distance_m" + id);
  }
  if (r.label != Label::LoS && r.label != Label::NLoS && r.label != Label::Unlabeled) {
    throw ValidationError("label out of range" + id);
  }
}

std::vector<RangingRecord> parse_records(std::istream& in) {
  std::vector<RangingRecord> records;
  std::unordered_set<std::uint64_t> seen;
  for_each_data_line(in, kRawCsvHeader, [&](std::string_view line, std::size_t line_no) {
    const auto f = split_fields(line);
    LineContext ctx{line_no, f.empty() ? std::string("?") : std::string(f[0])};
    if (f.size() != 12) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected 12 fields, got " +
                        std::to_string(f.size()));
    }
    RangingRecord r;
    r.record_id = parse_integer<std::uint64_t>(f[0], "record_id", ctx);
    r.label = parse_label(f[1], ctx);
    r.f1 = parse_double(f[2], "f1", ctx);
    r.f2 = parse_double(f[3], "f2", ctx);
    r.f3 = parse_double(f[4], "f3", ctx);
    r.preamble_count = parse_integer<std::uint32_t>(f[5], "preamble_count", ctx);
    r.cir_power = parse_double(f[6], "cir_power", ctx);
    r.noise_std = parse_double(f[7], "noise_std", ctx);
    r.t_round_ns = parse_optional(f[8], "t_round_ns", ctx);
    r.t_reply_ns = parse_optional(f[9], "t_reply_ns", ctx);
    r.measured_distance_m = parse_optional(f[10], "measured_distance_m", ctx);
    r.anchor_id = parse_integer<std::uint32_t>(f[11], "anchor_id", ctx);
    try {
      validate(r);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(r.record_id).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate record_id " +
                            std::to_string(r.record_id));
    }
    records.push_back(r);
  });
  return records;
}

std::vector<RangingRecord> read_records(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_records(in);
}

void write_records(std::span<const RangingRecord> records, std::ostream& out) {
  std::string buf;
  buf.append(kRawCsvHeader).push_back('\n');
  for (const auto& r : records) {
    buf.append(std::to_string(r.record_id)).push_back(',');
    buf.append(label_field(r.label)).push_back(',');
    append_exact(buf, r.f1);
    buf.push_back(',');
    append_exact(buf, r.f2);
    buf.push_back(',');
    append_exact(buf, r.f3);
    buf.push_back(',');
    buf.append(std::to_string(r.preamble_count)).push_back(',');
    append_exact(buf, r.cir_power);
    buf.push_back(',');
    append_exact(buf, r.noise_std);
    buf.push_back(',');
    append_optional(buf, r.t_round_ns);
    buf.push_back(',');
    append_optional(buf, r.t_reply_ns);
    buf.push_back(',');
    append_optional(buf, r.measured_distance_m);
    buf.push_back(',');
    buf.append(std::to_string(r.anchor_id)).push_back('\n');
  }
  out << buf;
}

void write_records(std::span<const RangingRecord> records, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_records(records, out);
  finish_write(out, path);
}

std::vector<LabeledFeatureRow> parse_feature_rows(std::istream& in) {
  std::vector<LabeledFeatureRow> rows;
  for_each_data_line(in, kFeatureCsvHeader, [&](std::string_view line, std::size_t line_no) {
    const auto f = split_fields(line);
    LineContext ctx{line_no, f.empty() ? std::string("?") : std::string(f[0])};
    if (f.size() != 6) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                        std::to_string(f.size()));
    }
    LabeledFeatureRow row;
    row.record_id = parse_integer<std::uint64_t>(f[0], "record_id", ctx);
    row.label = parse_label(f[1], ctx);
    row.features.distance_m = parse_double(f[2], "distance_m", ctx);
    row.features.fp_level_dbm = parse_double(f[3], "fp_level_dbm", ctx);
    row.features.rx_level_dbm = parse_double(f[4], "rx_level_dbm", ctx);
    row.features.threshold_power_db = parse_double(f[5], "threshold_power_db", ctx);
    if (!row.features.all_finite()) {
      throw ValidationError("line " + std::to_string(line_no) + ": non-finite feature value");
    }
    rows.push_back(row);
  });
  return rows;
}

std::vector<LabeledFeatureRow> read_feature_rows(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_feature_rows(in);
}

void write_feature_rows(std::span<const LabeledFeatureRow> rows, std::ostream& out) {
  std::string buf;
  buf.append(kFeatureCsvHeader).push_back('\n');
  for (const auto& row : rows) {
    if (!row.features.all_finite()) {
      throw ValidationError("record_id " + std::to_string(row.record_id) +
                            ": non-finite feature value");
    }
    buf.append(std::to_string(row.record_id)).push_back(',');
    buf.append(label_field(row.label));
    for (const double v : row.features.values()) {
      buf.push_back(',');
      append_9g(buf, v);
    }
    buf.push_back('\n');
  }
  out << buf;
}

void write_feature_rows(std::span<const LabeledFeatureRow> rows,
                        const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_feature_rows(rows, out);
  finish_write(out, path);
}

Split split_train_validate(std::span<const RangingRecord> records, double train_fraction,
                           std::uint64_t seed) {
  auto [train, val] = split_rows(records, train_fraction, seed);
  return {std::move(train), std::move(val)};
}

FeatureSplit split_train_validate(std::span<const LabeledFeatureRow> rows, double train_fraction,
                                  std::uint64_t seed) {
  auto [train, val] = split_rows(rows, train_fraction, seed);
  return {std::move(train), std::move(val)};
}

}  // namespace uwbnlos
