#pragma once

// Moment-matched Gaussian and generalized Gaussian (GGD) densities.
//
// The GGD with location mu, scale alpha and shape beta has density
//
//   p(x) = beta / (2 alpha Gamma(1/beta)) * exp(-(|x - mu| / alpha)^beta)
//
// with variance alpha^2 Gamma(3/beta) / Gamma(1/beta) and excess kurtosis
// Gamma(5/beta) Gamma(1/beta) / Gamma(3/beta)^2 - 3. beta = 2 is the normal
// law, beta = 1 the Laplace law. Fitting inverts those two relations from the
// biased (1/n) sample moments. Everything is evaluated in the log domain.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "uwbnlos/error.hpp"
#include "uwbnlos/special.hpp"

namespace uwbnlos {

// Admissible GGD shape range. Kurtosis targets outside the image of this
// interval are clamped and the clamp is reported through ShapeRecovery.
inline constexpr double kBetaMin = 0.15;
inline constexpr double kBetaMax = 20.0;

template <std::floating_point T = double>
struct GaussianParams {
  T mu{};
  T sigma2{1};

  friend bool operator==(const GaussianParams&, const GaussianParams&) = default;
};

template <std::floating_point T = double>
struct GgdParams {
  T mu{};
  T alpha{1};
  T beta{2};

  friend bool operator==(const GgdParams&, const GgdParams&) = default;
};

template <std::floating_point T = double>
struct MomentSummary {
  T mean{};
  T variance{};  // 1/n normalizer
  std::optional<T> kurtosis_excess;  // empty when the variance is zero
  std::size_t count = 0;
};

template <std::floating_point T = double>
struct ShapeRecovery {
  T beta{};
  bool clamped = false;
};

template <std::floating_point T>
MomentSummary<T> estimate_moments(std::span<const T> samples) {
  const std::size_t n = samples.size();
  if (n < 2) {
    throw InsufficientDataError("estimate_moments: need at least 2 samples, got " +
                                std::to_string(n));
  }
  T sum = 0;
  for (const T s : samples) {
    if (!std::isfinite(s)) throw DomainError("estimate_moments: non-finite sample");
    sum += s;
  }
  const T count = static_cast<T>(n);
  const T mean = sum / count;

  T sum2 = 0;
  T sum4 = 0;
  for (const T s : samples) {
    const T d = s - mean;
    const T d2 = d * d;
    sum2 += d2;
    sum4 += d2 * d2;
  }
  MomentSummary<T> out;
  out.mean = mean;
  out.variance = sum2 / count;
  out.count = n;
  if (out.variance > 0) {
    const T m4 = sum4 / count;
    out.kurtosis_excess = m4 / (out.variance * out.variance) - T(3);
  }
  return out;
}

template <std::floating_point T>
void check_beta_range(T beta, const char* where) {
  if (!(beta >= T(kBetaMin) && beta <= T(kBetaMax))) {
    throw DomainError(std::string(where) + ": shape beta=" + std::to_string(beta) +
                      " outside [0.15, 20]");
  }
}

template <std::floating_point T>
T ggd_kurtosis(T beta) {
  check_beta_range(beta, "ggd_kurtosis");
  const T inv = T(1) / beta;
  return std::exp(log_gamma(T(5) * inv) + log_gamma(inv) - T(2) * log_gamma(T(3) * inv)) - T(3);
}

// Inverts ggd_kurtosis by bisection on [kBetaMin, kBetaMax]. The kurtosis is
// strictly decreasing in beta, so the bracket always holds.
template <std::floating_point T>
ShapeRecovery<T> recover_shape(T kurtosis_excess) {
  const T k_low = ggd_kurtosis(T(kBetaMax)) + T(1e-6);
  const T k_high = ggd_kurtosis(T(kBetaMin));

  ShapeRecovery<T> out;
  T target = kurtosis_excess;
  if (std::isnan(target)) throw DomainError("recover_shape: kurtosis is NaN");
  if (target < k_low) {
    target = k_low;
    out.clamped = true;
  } else if (target > k_high) {
    target = k_high;
    out.clamped = true;
  }

  T lo = T(kBetaMin);
  T hi = T(kBetaMax);
  for (int it = 0; it < 200 && hi - lo > T(1e-12); ++it) {
    const T mid = T(0.5) * (lo + hi);
    if (ggd_kurtosis(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.beta = T(0.5) * (lo + hi);
  return out;
}

template <std::floating_point T>
T beta_from_kurtosis(T kurtosis_excess) {
  return recover_shape(kurtosis_excess).beta;
}

template <std::floating_point T>
T alpha_from_variance(T sigma2, T beta) {
  if (!(sigma2 > T(0)) || !std::isfinite(sigma2)) {
    throw DomainError("alpha_from_variance: variance must be positive, got " +
                      std::to_string(sigma2));
  }
  if (!(beta > T(0))) throw DomainError("alpha_from_variance: beta must be positive");
  const T inv = T(1) / beta;
  return std::sqrt(sigma2 * std::exp(log_gamma(inv) - log_gamma(T(3) * inv)));
}

template <std::floating_point T>
T ggd_variance(const GgdParams<T>& p) {
  const T inv = T(1) / p.beta;
  return p.alpha * p.alpha * std::exp(log_gamma(T(3) * inv) - log_gamma(inv));
}

template <std::floating_point T>
GaussianParams<T> fit_gaussian(std::span<const T> samples) {
  const auto m = estimate_moments(samples);
  if (!(m.variance > T(0))) {
    throw DomainError("fit_gaussian: samples have zero variance; drop this feature");
  }
  return {m.mean, m.variance};
}

template <std::floating_point T>
struct GgdFit {
  GgdParams<T> params;
  MomentSummary<T> moments;
  bool shape_clamped = false;
};

// Moment-matching GGD fit. `forced_beta` bypasses the kurtosis inversion
// (beta = 2 reproduces the Gaussian fit exactly).
template <std::floating_point T>
GgdFit<T> fit_ggd_detailed(std::span<const T> samples,
                           std::optional<T> forced_beta = std::nullopt) {
  if (samples.size() < 4) {
    throw InsufficientDataError("fit_ggd: need at least 4 samples, got " +
                                std::to_string(samples.size()));
  }
  GgdFit<T> fit;
  fit.moments = estimate_moments(samples);
  if (!(fit.moments.variance > T(0)) || !fit.moments.kurtosis_excess) {
    throw DomainError("fit_ggd: samples have zero variance; drop this feature");
  }
  if (forced_beta) {
    check_beta_range(*forced_beta, "fit_ggd");
    fit.params.beta = *forced_beta;
  } else {
    const auto shape = recover_shape(*fit.moments.kurtosis_excess);
    fit.params.beta = shape.beta;
    fit.shape_clamped = shape.clamped;
  }
  fit.params.mu = fit.moments.mean;
  fit.params.alpha = alpha_from_variance(fit.moments.variance, fit.params.beta);
  return fit;
}

template <std::floating_point T>
GgdParams<T> fit_ggd(std::span<const T> samples) {
  return fit_ggd_detailed(samples).params;
}

template <std::floating_point T>
T log_pdf_gaussian(T x, const GaussianParams<T>& p) {
  const T d = x - p.mu;
  return T(-0.5) * std::log(T(2) * std::numbers::pi_v<T> * p.sigma2) - d * d / (T(2) * p.sigma2);
}

template <std::floating_point T>
T log_pdf_ggd(T x, const GgdParams<T>& p) {
  const T z = std::abs(x - p.mu) / p.alpha;
  return std::log(p.beta) - std::log(T(2) * p.alpha) - log_gamma(T(1) / p.beta) -
         std::pow(z, p.beta);
}

}  // namespace uwbnlos
