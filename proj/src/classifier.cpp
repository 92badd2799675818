#include "uwbnlos/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "uwbnlos/error.hpp"
#include "uwbnlos/evaluation.hpp"

namespace uwbnlos {

std::string_view to_string(Family family) noexcept {
  return family == Family::GD ? "gd" : "ggd";
}

Family parse_family(std::string_view text) {
  if (text == "gd" || text == "GD") return Family::GD;
  if (text == "ggd" || text == "GGD") return Family::GGD;
  throw ValidationError("unknown family '" + std::string(text) + "' (expected gd or ggd)");
}

double log_density(double x, const FeatureDensity& density) {
  return std::visit(
      [x](const auto& p) {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, GaussianParams<double>>) {
          return log_pdf_gaussian(x, p);
        } else {
          return log_pdf_ggd(x, p);
        }
      },
      density);
}

ClassifierModel train(std::span<const FeatureVector> train_features, Family family,
                      double lambda, const TrainOptions& options) {
  if (train_features.size() < options.min_samples) {
    throw InsufficientDataError("train: need at least " + std::to_string(options.min_samples) +
                                " LoS samples, got " + std::to_string(train_features.size()));
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("train: lambda must lie in [0, 1], got " + std::to_string(lambda));
  }

  ClassifierModel model;
  model.family = family;
  model.lambda = lambda;
  model.diagnostics.trained_count = train_features.size();

  std::vector<double> column(train_features.size());
  for (std::size_t m = 0; m < kFeatureCount; ++m) {
    for (std::size_t t = 0; t < train_features.size(); ++t) {
      const double v = train_features[t].values()[m];
      if (!std::isfinite(v)) {
        throw DomainError("train: non-finite value in feature " + std::string(kFeatureNames[m]));
      }
      column[t] = v;
    }
    const std::span<const double> samples(column);
    try {
      if (family == Family::GD) {
        model.feature_params.emplace_back(fit_gaussian(samples));
      } else {
        const auto fit = fit_ggd_detailed(samples, options.forced_beta);
        if (fit.shape_clamped) {
          std::ostringstream note;
          note.precision(6);
          note << kFeatureNames[m] << ": sample kurtosis " << *fit.moments.kurtosis_excess
               << " outside GGD range, shape clamped to beta=" << fit.params.beta;
          model.diagnostics.notes.push_back(note.str());
        }
        model.feature_params.emplace_back(fit.params);
      }
    } catch (const DomainError& e) {
      throw DomainError("train: feature " + std::string(kFeatureNames[m]) + " is degenerate: " +
                        e.what());
    }
  }
  return model;
}

ClassifierModel train(std::span<const LabeledFeatureRow> train_rows, Family family, double lambda,
                      const TrainOptions& options) {
  std::vector<FeatureVector> features;
  features.reserve(train_rows.size());
  for (const auto& row : train_rows) {
    if (row.label != Label::LoS) {
      throw ValidationError("train: training rows must be LoS (record_id " +
                            std::to_string(row.record_id) + ")");
    }
    features.push_back(row.features);
  }
  return train(std::span<const FeatureVector>(features), family, lambda, options);
}

Score score(const ClassifierModel& model, const FeatureVector& u) {
  if (model.feature_params.size() != kFeatureCount) {
    throw StateError("score: model is not trained");
  }
  const auto values = u.values();
  double total = 0.0;
  for (std::size_t m = 0; m < kFeatureCount; ++m) {
    if (!std::isfinite(values[m])) {
      throw DomainError("score: non-finite value in feature " + std::string(kFeatureNames[m]));
    }
    total += log_density(values[m], model.feature_params[m]);
  }
  if (!std::isfinite(total)) throw DomainError("score: log-probability is not finite");
  return {total};
}

Label classify_score(double log_prob, double epsilon_log) noexcept {
  return log_prob <= epsilon_log ? Label::NLoS : Label::LoS;
}

Label classify(const ClassifierModel& model, const FeatureVector& u) {
  if (!model.epsilon_log) throw StateError("classify: threshold epsilon is not set");
  return classify_score(score(model, u).log_prob, *model.epsilon_log);
}

ThresholdChoice select_threshold(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("select_threshold: scores and labels differ in length");
  }
  struct Item {
    double score;
    bool los;
  };
  std::vector<Item> items;
  items.reserve(scores.size());
  std::size_t n_los = 0;
  std::size_t n_nlos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DomainError("select_threshold: non-finite score");
    if (labels[i] == Label::LoS) {
      ++n_los;
    } else if (labels[i] == Label::NLoS) {
      ++n_nlos;
    } else {
      throw ValidationError("select_threshold: validation rows must be labeled");
    }
    items.push_back({scores[i], labels[i] == Label::LoS});
  }
  if (n_los == 0 || n_nlos == 0) {
    throw InsufficientDataError("select_threshold: validation set needs both LoS and NLoS rows");
  }
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.score < b.score; });

  // Sweep epsilon upwards. Before the sweep (epsilon below every score) all
  // samples are predicted LoS.
  ConfusionMatrix cm{n_los, n_nlos, 0, 0};
  ThresholdChoice best;
  best.epsilon_log = items.front().score - 1.0;
  best.f_score = std::numeric_limits<double>::quiet_NaN();
  if (auto f = f_score(cm)) best.f_score = *f;

  auto consider = [&](double eps) {
    const auto f = f_score(cm);
    if (f && (std::isnan(best.f_score) || *f > best.f_score)) {
      best.f_score = *f;
      best.epsilon_log = eps;
    }
  };

  std::size_t i = 0;
  while (i < items.size()) {
    // Move every sample tied at this score to the NLoS side.
    const double s = items[i].score;
    while (i < items.size() && items[i].score == s) {
      if (items[i].los) {
        --cm.tp;
        ++cm.fn;
      } else {
        --cm.fp;
        ++cm.tn;
      }
      ++i;
    }
    double eps = s + 1.0;
    if (i < items.size()) {
      eps = s + (items[i].score - s) / 2.0;
      // Adjacent doubles: the midpoint can round up onto the next score.
      if (eps >= items[i].score) eps = s;
    }
    consider(eps);
  }
  return best;
}

double tune_threshold(ClassifierModel& model, std::span<const LabeledFeatureRow> validate) {
  std::vector<double> scores;
  std::vector<Label> labels;
  scores.reserve(validate.size());
  labels.reserve(validate.size());
  for (const auto& row : validate) {
    scores.push_back(score(model, row.features).log_prob);
    labels.push_back(row.label);
  }
  const auto choice = select_threshold(scores, labels);
  model.epsilon_log = choice.epsilon_log;
  return choice.epsilon_log;
}

double threshold_step(double epsilon_log, double lambda, double log_prob, Label true_label) {
  const Label predicted = classify_score(log_prob, epsilon_log);
  const double error = predicted == true_label ? 0.0 : log_prob - epsilon_log;
  return epsilon_log + lambda * error;
}

double update_threshold(ClassifierModel& model, Score s, Label true_label) {
  if (!model.epsilon_log) throw StateError("update_threshold: threshold epsilon is not set");
  if (true_label == Label::Unlabeled) return *model.epsilon_log;
  model.epsilon_log = threshold_step(*model.epsilon_log, model.lambda, s.log_prob, true_label);
  return *model.epsilon_log;
}

AdaptiveThreshold::AdaptiveThreshold(double epsilon_log, double lambda)
    : epsilon_(epsilon_log), lambda_(lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
}

double AdaptiveThreshold::update(Score s, Label true_label) noexcept {
  const double current = epsilon_.load(std::memory_order_relaxed);
  if (true_label == Label::Unlabeled) return current;
  const double next = threshold_step(current, lambda_, s.log_prob, true_label);
  epsilon_.store(next, std::memory_order_release);
  return next;
}

// ---------------------------------------------------------------------------
// Model file
//
// {
//   "format": "uwbnlos-model",
//   "version": 1,
//   "family": "gd" | "ggd",
//   "lambda": <number>,
//   "epsilon_log": <number> | null,
//   "trained_count": <integer>,
//   "features": [ {"name": "distance_m", "mu": .., "sigma2": ..}            (gd)
//                 {"name": "distance_m", "mu": .., "alpha": .., "beta": ..}  (ggd)
//                 ... four entries in feature order ],
//   "notes": [ <string>, ... ]
// }
//
// Numbers are written with round-trip precision (up to 17 significant digits).

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "uwbnlos-model";

double finite_number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw SchemaError(std::string("model: '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(std::string("model: '") + key + "' must be finite");
  return d;
}

}  // namespace

void save_model(const ClassifierModel& model, std::ostream& out) {
  if (model.feature_params.size() != kFeatureCount) {
    throw StateError("save_model: model is not trained");
  }
  json doc;
  doc["format"] = kFormatTag;
  doc["version"] = kModelFormatVersion;
  doc["family"] = std::string(to_string(model.family));
  doc["lambda"] = model.lambda;
  doc["epsilon_log"] = model.epsilon_log ? json(*model.epsilon_log) : json(nullptr);
  doc["trained_count"] = model.diagnostics.trained_count;
  json features = json::array();
  for (std::size_t m = 0; m < kFeatureCount; ++m) {
    json f;
    f["name"] = std::string(kFeatureNames[m]);
    std::visit(
        [&f](const auto& p) {
          if constexpr (std::is_same_v<std::decay_t<decltype(p)>, GaussianParams<double>>) {
            f["mu"] = p.mu;
            f["sigma2"] = p.sigma2;
          } else {
            f["mu"] = p.mu;
            f["alpha"] = p.alpha;
            f["beta"] = p.beta;
          }
        },
        model.feature_params[m]);
    features.push_back(std::move(f));
  }
  doc["features"] = std::move(features);
  doc["notes"] = model.diagnostics.notes;
  out << doc.dump(2) << '\n';
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  save_model(model, out);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

ClassifierModel load_model(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model: corrupt or truncated file: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", std::string()) != kFormatTag) {
      throw SchemaError("model: missing format tag 'uwbnlos-model'");
    }
    const auto& version = doc.at("version");
    if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
      throw VersionError("model: unsupported format version " + version.dump() + " (expected " +
                         std::to_string(kModelFormatVersion) + ")");
    }
    ClassifierModel model;
    model.family = parse_family(doc.at("family").get<std::string>());
    model.lambda = finite_number(doc, "lambda");
    if (!(model.lambda >= 0.0 && model.lambda <= 1.0)) {
      throw SchemaError("model: lambda outside [0, 1]");
    }
    if (!doc.at("epsilon_log").is_null()) model.epsilon_log = finite_number(doc, "epsilon_log");
    model.diagnostics.trained_count = doc.at("trained_count").get<std::size_t>();
    if (doc.contains("notes")) {
      model.diagnostics.notes = doc.at("notes").get<std::vector<std::string>>();
    }
    const auto& features = doc.at("features");
    if (!features.is_array() || features.size() != kFeatureCount) {
      throw SchemaError("model: 'features' must list exactly 4 entries");
    }
    for (std::size_t m = 0; m < kFeatureCount; ++m) {
      const auto& f = features[m];
      if (f.at("name").get<std::string>() != kFeatureNames[m]) {
        throw SchemaError("model: feature " + std::to_string(m) + " must be '" +
                          std::string(kFeatureNames[m]) + "'");
      }
      if (model.family == Family::GD) {
        GaussianParams<double> p{finite_number(f, "mu"), finite_number(f, "sigma2")};
        if (!(p.sigma2 > 0.0)) throw SchemaError("model: sigma2 must be positive");
        model.feature_params.emplace_back(p);
      } else {
        GgdParams<double> p{finite_number(f, "mu"), finite_number(f, "alpha"),
                            finite_number(f, "beta")};
        if (!(p.alpha > 0.0) || !(p.beta > 0.0)) {
          throw SchemaError("model: alpha and beta must be positive");
        }
        model.feature_params.emplace_back(p);
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model: ") + e.what());
  }
}

ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model '" + path.string() + "'");
  return load_model(in);
}

}  // namespace uwbnlos
