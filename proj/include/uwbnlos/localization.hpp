#pragma once

// 2D weighted least-squares trilateration from anchor ranges.

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "uwbnlos/classifier.hpp"
#include "uwbnlos/features.hpp"
#include "uwbnlos/records.hpp"

namespace uwbnlos {

struct Anchor {
  std::uint32_t anchor_id = 0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

struct RangeObservation {
  std::uint32_t anchor_id = 0;
  double distance_m = 0.0;
  double weight = 1.0;  // 1 trusted, 0 excluded
};

struct PositionEstimate {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double residual_rms_m = 0.0;  // weighted RMS of range residuals
  int used_anchor_count = 0;
  int iterations = 0;
  bool degraded = false;  // set by the classifier-aware locator's fallback path
};

struct SolverOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-9;
  double collinear_area_m2 = 1e-6;
};

// Minimizes sum_j w_j (|p - a_j| - d_j)^2 over ranges with w_j > 0, starting
// from the weighted linearized solution and refining with damped Gauss-Newton.
PositionEstimate trilaterate(std::span<const Anchor> anchors,
                             std::span<const RangeObservation> ranges,
                             const SolverOptions& options = {});

// Weighted sum of squared range residuals at p (ranges with w > 0).
double range_cost(std::span<const Anchor> anchors, std::span<const RangeObservation> ranges,
                  const Eigen::Vector2d& p);

inline constexpr double kDegradedNlosWeight = 0.25;

struct ClassifiedFix {
  PositionEstimate estimate;
  std::vector<RangeObservation> ranges;  // weights actually used
  std::vector<Label> decisions;          // per input record
};

// Classifies every anchor's record and drops NLoS ranges. When fewer than
// three LoS ranges remain, all ranges are used with NLoS weighted 0.25 and
// the estimate is flagged degraded.
ClassifiedFix locate_with_classifier(const ClassifierModel& model,
                                     std::span<const Anchor> anchors,
                                     std::span<const RangingRecord> records,
                                     const RadioConstants& consts = {},
                                     const SolverOptions& options = {});

// CSV with header `anchor_id,x_m,y_m`.
std::vector<Anchor> read_anchors(const std::filesystem::path& path);
void write_anchors(std::span<const Anchor> anchors, const std::filesystem::path& path);

}  // namespace uwbnlos
