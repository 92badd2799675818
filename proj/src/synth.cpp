#include "uwbnlos/synth.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "uwbnlos/error.hpp"

namespace uwbnlos {

GgdParams<double> ggd_from_moments(double mean, double sd, double beta) {
  return {mean, alpha_from_variance(sd * sd, beta), beta};
}

// The threshold power keeps the RX - FP sign, so LoS sits near -3 dB and NLoS
// near -6 dB. About 2% of LoS rows are multipath outliers that look NLoS.
ClassProfile default_los_profile() {
  ClassProfile p{ggd_from_moments(8.0, 0.25, 4.0), ggd_from_moments(-89.6, 1.16, 3.0),
                 ggd_from_moments(-3.0, 0.65, 1.5)};
  p.outlier_fraction = 0.02;
  p.outlier_range_excess_m = 0.64;
  p.outlier_threshold_shift_db = -5.0;
  return p;
}

ClassProfile default_nlos_profile() {
  return {ggd_from_moments(9.59, 0.40, 4.0), ggd_from_moments(-89.15, 1.16, 1.5),
          ggd_from_moments(-6.0, 1.13, 1.5)};
}

namespace {

void check_params(const GgdParams<double>& p) {
  if (!std::isfinite(p.mu) || !(p.alpha > 0.0) || !std::isfinite(p.alpha) || !(p.beta > 0.0) ||
      !std::isfinite(p.beta)) {
    throw DomainError("sample_ggd: invalid parameters (alpha and beta must be positive)");
  }
}

bool draw_outlier(const ClassProfile& profile, Rng& rng) {
  return profile.outlier_fraction > 0.0 && rng.uniform() < profile.outlier_fraction;
}

}  // namespace

double sample_ggd(const GgdParams<double>& params, Rng& rng) {
  check_params(params);
  const double g = rng.gamma(1.0 / params.beta);
  const double magnitude = params.alpha * std::pow(g, 1.0 / params.beta);
  return (rng.next() >> 63) ? params.mu - magnitude : params.mu + magnitude;
}

std::vector<double> sample_ggd(const GgdParams<double>& params, std::size_t n,
                               std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample_ggd: n must be >= 1");
  check_params(params);
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = sample_ggd(params, rng);
  return out;
}

FeatureVector sample_features(const ClassProfile& profile, Rng& rng) {
  FeatureVector fv;
  fv.distance_m = sample_ggd(profile.distance, rng);
  fv.fp_level_dbm = sample_ggd(profile.fp_level, rng);
  fv.threshold_power_db = sample_ggd(profile.threshold_power, rng);
  if (draw_outlier(profile, rng)) {
    fv.distance_m += profile.outlier_range_excess_m * rng.uniform(0.5, 1.5);
    fv.threshold_power_db += profile.outlier_threshold_shift_db;
  }
  fv.rx_level_dbm = fv.fp_level_dbm + fv.threshold_power_db;
  // Recompute so the stored identity holds bit-for-bit.
  fv.threshold_power_db = fv.rx_level_dbm - fv.fp_level_dbm;
  return fv;
}

std::vector<LabeledFeatureRow> generate_feature_dataset(const ClassProfile& los_profile,
                                                        const ClassProfile& nlos_profile,
                                                        std::size_t n_los, std::size_t n_nlos,
                                                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledFeatureRow> rows;
  rows.reserve(n_los + n_nlos);
  for (std::size_t i = 0; i < n_los + n_nlos; ++i) {
    const bool los = i < n_los;
    rows.push_back({i, los ? Label::LoS : Label::NLoS,
                    sample_features(los ? los_profile : nlos_profile, rng)});
  }
  return rows;
}

std::vector<LabeledFeatureRow> generate_feature_stream(const ClassProfile& los_profile,
                                                       const ClassProfile& nlos_profile,
                                                       std::size_t n, double nlos_fraction,
                                                       std::uint64_t seed, std::uint64_t first_id) {
  if (!(nlos_fraction >= 0.0 && nlos_fraction <= 1.0)) {
    throw ValidationError("generate_feature_stream: nlos_fraction must lie in [0, 1]");
  }
  Rng rng(seed);
  std::vector<LabeledFeatureRow> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool nlos = rng.uniform() < nlos_fraction;
    rows.push_back({first_id + i, nlos ? Label::NLoS : Label::LoS,
                    sample_features(nlos ? nlos_profile : los_profile, rng)});
  }
  return rows;
}

void encode_power_registers(double fp_level_dbm, double rx_level_dbm, std::uint32_t n,
                            const RadioConstants& consts, Rng& rng, RangingRecord& record) {
  const double nn = double(n) * double(n);
  const double energy = nn * std::pow(10.0, (fp_level_dbm + consts.a_constant) / 10.0);
  double w[3];
  double wsum = 0.0;
  for (double& wi : w) {
    wi = rng.uniform(0.2, 1.0);
    wsum += wi;
  }
  record.preamble_count = n;
  record.f1 = std::sqrt(energy * w[0] / wsum);
  record.f2 = std::sqrt(energy * w[1] / wsum);
  record.f3 = std::sqrt(energy * w[2] / wsum);
  record.cir_power = nn * std::pow(10.0, (rx_level_dbm + consts.a_constant) / 10.0) /
                     consts.cir_scale;
}

std::vector<RangingRecord> generate_ranging_log(const SceneConfig& scene) {
  if (scene.anchors.empty()) throw ValidationError("scene: no anchors");
  if (!(scene.nlos_bias_m > 0.0)) throw ValidationError("scene: nlos_bias_m must be positive");
  if (!(scene.range_noise_sigma_m >= 0.0)) {
    throw ValidationError("scene: range_noise_sigma_m must be >= 0");
  }
  if (!(scene.t_reply_ns >= 0.0)) throw ValidationError("scene: t_reply_ns must be >= 0");
  if (scene.preamble_min < 1 || scene.preamble_max < scene.preamble_min) {
    throw ValidationError("scene: invalid preamble count range");
  }

  std::unordered_map<std::uint32_t, std::size_t> slot;
  for (std::size_t j = 0; j < scene.anchors.size(); ++j) {
    if (!slot.emplace(scene.anchors[j].anchor_id, j).second) {
      throw ValidationError("scene: duplicate anchor_id " +
                            std::to_string(scene.anchors[j].anchor_id));
    }
  }
  const std::size_t n_pos = scene.tag_path.size();
  const std::size_t n_anchor = scene.anchors.size();
  std::vector<char> nlos(n_pos * n_anchor, 0);
  for (const auto& ep : scene.nlos_episodes) {
    const auto it = slot.find(ep.anchor_id);
    if (it == slot.end()) {
      throw ValidationError("scene: episode references unknown anchor " +
                            std::to_string(ep.anchor_id));
    }
    if (ep.start_index >= ep.end_index || ep.end_index > n_pos) {
      throw ValidationError("scene: episode [" + std::to_string(ep.start_index) + ", " +
                            std::to_string(ep.end_index) + ") outside path of length " +
                            std::to_string(n_pos));
    }
    for (std::size_t i = ep.start_index; i < ep.end_index; ++i) nlos[i * n_anchor + it->second] = 1;
  }

  constexpr double kNsPerMeter = 1e9 / kSpeedOfLight;
  Rng rng(scene.seed);
  std::vector<RangingRecord> log;
  log.reserve(n_pos * n_anchor);
  for (std::size_t i = 0; i < n_pos; ++i) {
    for (std::size_t j = 0; j < n_anchor; ++j) {
      const bool is_nlos = nlos[i * n_anchor + j] != 0;
      RangingRecord r;
      r.record_id = i * n_anchor + j;
      r.anchor_id = scene.anchors[j].anchor_id;
      r.label = is_nlos ? Label::NLoS : Label::LoS;

      const double true_m = (scene.tag_path[i] - scene.anchors[j].position).norm();
      double tau_ns = true_m * kNsPerMeter;
      if (is_nlos) tau_ns += scene.nlos_bias_m * kNsPerMeter;
      const double noise_ns =
          scene.range_noise_sigma_m > 0.0 ? rng.normal(0.0, scene.range_noise_sigma_m) * kNsPerMeter
                                          : 0.0;

      const auto& profile = is_nlos ? scene.nlos_profile : scene.los_profile;
      const double fp = sample_ggd(profile.fp_level, rng);
      double threshold = sample_ggd(profile.threshold_power, rng);
      if (draw_outlier(profile, rng)) {
        tau_ns += profile.outlier_range_excess_m * rng.uniform(0.5, 1.5) * kNsPerMeter;
        threshold += profile.outlier_threshold_shift_db;
      }
      const double rx = fp + threshold;
      r.t_reply_ns = scene.t_reply_ns;
      r.t_round_ns = std::max(scene.t_reply_ns, scene.t_reply_ns + 2.0 * (tau_ns + noise_ns));
      const auto n = scene.preamble_min + static_cast<std::uint32_t>(rng.below(
                                              scene.preamble_max - scene.preamble_min + 1));
      encode_power_registers(fp, rx, n, scene.radio, rng, r);
      r.noise_std = rng.uniform(10.0, 60.0);
      log.push_back(r);
    }
  }
  return log;
}

std::vector<Eigen::Vector2d> random_tag_path(std::size_t n, const Eigen::Vector2d& lower,
                                             const Eigen::Vector2d& upper, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::Vector2d> path(n);
  for (auto& p : path) {
    const double x = rng.uniform(lower.x(), upper.x());
    const double y = rng.uniform(lower.y(), upper.y());
    p = {x, y};
  }
  return path;
}

namespace {

using nlohmann::json;

SceneConfig scene_from_json(const json& doc) {
  SceneConfig scene;
  for (const auto& a : doc.at("anchors")) {
    scene.anchors.push_back(
        {a.at("anchor_id").get<std::uint32_t>(), {a.at("x_m").get<double>(), a.at("y_m").get<double>()}});
  }
  for (const auto& p : doc.at("tag_path")) {
    if (!p.is_array() || p.size() != 2) throw SchemaError("scene: tag_path entries are [x, y]");
    scene.tag_path.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  scene.nlos_bias_m = doc.value("nlos_bias_m", scene.nlos_bias_m);
  scene.range_noise_sigma_m = doc.value("range_noise_sigma_m", scene.range_noise_sigma_m);
  scene.seed = doc.value("seed", scene.seed);
  scene.t_reply_ns = doc.value("t_reply_ns", scene.t_reply_ns);
  if (doc.contains("nlos_episodes")) {
    for (const auto& e : doc.at("nlos_episodes")) {
      scene.nlos_episodes.push_back({e.at("anchor_id").get<std::uint32_t>(),
                                     e.at("start_index").get<std::size_t>(),
                                     e.at("end_index").get<std::size_t>()});
    }
  }
  return scene;
}

}  // namespace

SceneConfig parse_scene(std::string_view json_text) {
  try {
    return scene_from_json(json::parse(json_text));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scene: ") + e.what());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("scene: ") + e.what());
  }
}

SceneConfig read_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scene file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scene(text.str());
}

std::string dump_scene(const SceneConfig& scene) {
  json doc;
  json anchors = json::array();
  for (const auto& a : scene.anchors) {
    anchors.push_back({{"anchor_id", a.anchor_id}, {"x_m", a.position.x()}, {"y_m", a.position.y()}});
  }
  doc["anchors"] = std::move(anchors);
  json path = json::array();
  for (const auto& p : scene.tag_path) path.push_back({p.x(), p.y()});
  doc["tag_path"] = std::move(path);
  doc["nlos_bias_m"] = scene.nlos_bias_m;
  doc["range_noise_sigma_m"] = scene.range_noise_sigma_m;
  json episodes = json::array();
  for (const auto& e : scene.nlos_episodes) {
    episodes.push_back(
        {{"anchor_id", e.anchor_id}, {"start_index", e.start_index}, {"end_index", e.end_index}});
  }
  doc["nlos_episodes"] = std::move(episodes);
  doc["seed"] = scene.seed;
  doc["t_reply_ns"] = scene.t_reply_ns;
  return doc.dump(2) + "\n";
}

}  // namespace uwbnlos
