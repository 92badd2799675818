#pragma once

// One-class NLoS detector. Each feature gets an independent density fitted on
// LoS training data; a sample's score is the sum of per-feature log-densities
// and the sample is NLoS when the score is at or below the threshold epsilon.
// The threshold is picked on a labeled validation set by maximizing the
// F-score with LoS as the positive class, and may drift afterwards through a
// forgetting-factor update driven by misclassifications.

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "uwbnlos/distfit.hpp"
#include "uwbnlos/records.hpp"

namespace uwbnlos {

enum class Family { GD, GGD };

std::string_view to_string(Family family) noexcept;
Family parse_family(std::string_view text);

using FeatureDensity = std::variant<GaussianParams<double>, GgdParams<double>>;

double log_density(double x, const FeatureDensity& density);

struct FitDiagnostics {
  std::size_t trained_count = 0;
  std::vector<std::string> notes;  // e.g. shape clamping events

  friend bool operator==(const FitDiagnostics&, const FitDiagnostics&) = default;
};

struct ClassifierModel {
  Family family = Family::GGD;
  // Ordered as kFeatureNames.
  std::vector<FeatureDensity> feature_params;
  std::optional<double> epsilon_log;
  double lambda = 0.95;
  FitDiagnostics diagnostics;

  friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;
};

struct Score {
  double log_prob = 0.0;
};

struct TrainOptions {
  std::size_t min_samples = 30;
  // GGD only: skip the kurtosis inversion and use this shape for every feature.
  std::optional<double> forced_beta;
};

ClassifierModel train(std::span<const FeatureVector> train_features, Family family,
                      double lambda = 0.95, const TrainOptions& options = {});
ClassifierModel train(std::span<const LabeledFeatureRow> train_rows, Family family,
                      double lambda = 0.95, const TrainOptions& options = {});

Score score(const ClassifierModel& model, const FeatureVector& u);

// Score <= epsilon is NLoS.
Label classify_score(double log_prob, double epsilon_log) noexcept;
Label classify(const ClassifierModel& model, const FeatureVector& u);

struct ThresholdChoice {
  double epsilon_log = 0.0;
  double f_score = 0.0;  // NaN when no candidate has a defined F-score
};

// Candidates are midpoints between consecutive distinct scores plus one value
// below the minimum and one above the maximum. Returns the smallest candidate
// with the highest F-score.
ThresholdChoice select_threshold(std::span<const double> scores, std::span<const Label> labels);

double tune_threshold(ClassifierModel& model, std::span<const LabeledFeatureRow> validate);

// epsilon += lambda * e where e is (score - epsilon) for a misclassified
// sample and 0 otherwise.
double threshold_step(double epsilon_log, double lambda, double log_prob, Label true_label);
double update_threshold(ClassifierModel& model, Score s, Label true_label);

// Shared threshold for one writer applying updates while other threads
// classify. Readers always observe a whole epsilon value.
class AdaptiveThreshold {
 public:
  AdaptiveThreshold(double epsilon_log, double lambda);

  double epsilon() const noexcept { return epsilon_.load(std::memory_order_acquire); }
  double lambda() const noexcept { return lambda_; }
  Label classify(Score s) const noexcept { return classify_score(s.log_prob, epsilon()); }
  // Single writer only.
  double update(Score s, Label true_label) noexcept;

 private:
  std::atomic<double> epsilon_;
  double lambda_;
};

inline constexpr int kModelFormatVersion = 1;

void save_model(const ClassifierModel& model, std::ostream& out);
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(std::istream& in);
ClassifierModel load_model(const std::filesystem::path& path);

}  // namespace uwbnlos
