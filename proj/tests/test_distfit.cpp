#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "uwbnlos/distfit.hpp"
#include "uwbnlos/error.hpp"
#include "uwbnlos/rng.hpp"
#include "uwbnlos/special.hpp"
#include "uwbnlos/synth.hpp"

using namespace uwbnlos;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = rng.normal();
  return xs;
}

}  // namespace

TEST(Rng, SplitMixReferenceVector) {
  SplitMix64 sm(0);
  EXPECT_EQ(sm.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(sm.next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(sm.next(), 0x06C45D188009454FULL);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformRanges) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double v = rng.uniform_open();
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
    EXPECT_LT(rng.below(7), 7u);
  }
}

TEST(Rng, GammaMeanMatchesShape) {
  for (const double shape : {0.25, 0.5, 1.0, 2.5, 7.0}) {
    Rng rng(11);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += rng.gamma(shape);
    EXPECT_NEAR(sum / n, shape, 0.02 * shape + 0.005) << "shape " << shape;
  }
}

TEST(Rng, DeriveSeparatesChildren) {
  EXPECT_NE(Rng::derive(1, 0), Rng::derive(1, 1));
  EXPECT_NE(Rng::derive(1, 0), Rng::derive(2, 0));
  EXPECT_EQ(Rng::derive(5, 3), Rng::derive(5, 3));
}

TEST(Gamma, KnownValues) {
  EXPECT_NEAR(gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-14);
  EXPECT_NEAR(gamma_fn(5.0), 24.0, 24.0 * 1e-13);
  EXPECT_NEAR(gamma_fn(1.0), 1.0, 1e-14);
  EXPECT_NEAR(gamma_fn(1.5), 0.5 * std::sqrt(std::numbers::pi), 1e-14);
}

TEST(Gamma, MatchesStdTgammaOnReferencePoints) {
  const double xs[] = {0.01, 0.1,  0.25, 0.3333, 0.5,  0.75, 1.0,  1.25, 1.5,  2.0,
                       2.5,  3.0,  4.2,  5.5,    7.0,  10.0, 12.3, 20.0, 33.3, 50.0};
  for (const double x : xs) {
    const double ref = std::tgamma(x);
    EXPECT_LE(std::abs(gamma_fn(x) - ref) / ref, 1e-10) << "x=" << x;
  }
}

TEST(Gamma, LogGammaLargeArgument) {
  EXPECT_NEAR(log_gamma(170.5), std::lgamma(170.5), 1e-9);
  EXPECT_TRUE(std::isfinite(gamma_fn(170.9)));
}

TEST(Gamma, DomainErrors) {
  EXPECT_THROW(gamma_fn(0.0), DomainError);
  EXPECT_THROW(gamma_fn(-1.0), DomainError);
  EXPECT_THROW(gamma_fn(172.0), DomainError);
}

TEST(Moments, HandExample) {
  const std::vector<double> xs{1, 2, 3};
  const auto m = estimate_moments<double>(xs);
  EXPECT_DOUBLE_EQ(m.mean, 2.0);
  EXPECT_DOUBLE_EQ(m.variance, 2.0 / 3.0);
  ASSERT_TRUE(m.kurtosis_excess.has_value());
  EXPECT_NEAR(*m.kurtosis_excess, -1.5, 1e-12);
  EXPECT_EQ(m.count, 3u);
}

TEST(Moments, ConstantSamplesHaveNoKurtosis) {
  const std::vector<double> xs(5, 4.25);
  const auto m = estimate_moments<double>(xs);
  EXPECT_EQ(m.mean, 4.25);
  EXPECT_EQ(m.variance, 0.0);
  EXPECT_FALSE(m.kurtosis_excess.has_value());
}

TEST(Moments, RejectsTooFewOrNonFinite) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(estimate_moments<double>(one), InsufficientDataError);
  const std::vector<double> bad{1.0, NAN};
  EXPECT_THROW(estimate_moments<double>(bad), DomainError);
}

TEST(Moments, NormalDrawsHaveNearZeroKurtosis) {
  const auto xs = normals(10000, 3);
  const auto m = estimate_moments<double>(xs);
  EXPECT_NEAR(*m.kurtosis_excess, 0.0, 0.15);
}

TEST(Moments, MatchesBruteForceExactly) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(99);
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.normal(rng.uniform(-50, 50), rng.uniform(0.01, 10));
    const auto got = estimate_moments<double>(xs);
    const auto ref = oracle::brute_moments(xs);
    EXPECT_EQ(got.mean, ref.mean);
    EXPECT_EQ(got.variance, ref.variance);
    ASSERT_TRUE(got.kurtosis_excess.has_value());
    EXPECT_EQ(*got.kurtosis_excess, ref.m4 / (ref.variance * ref.variance) - 3.0);
  }
}

TEST(Moments, FloatInstantiation) {
  const std::vector<float> xs{1.f, 2.f, 3.f, 4.f};
  const auto m = estimate_moments<float>(xs);
  EXPECT_FLOAT_EQ(m.mean, 2.5f);
  EXPECT_FLOAT_EQ(m.variance, 1.25f);
}

TEST(Kurtosis, ReferenceShapes) {
  EXPECT_NEAR(ggd_kurtosis(2.0), 0.0, 1e-12);
  EXPECT_NEAR(ggd_kurtosis(1.0), 3.0, 1e-12);
  const double k8 = ggd_kurtosis(8.0);
  EXPECT_GT(k8, -1.2);
  EXPECT_LT(k8, 0.0);
}

TEST(Kurtosis, StrictlyDecreasingOverShapeDomain) {
  double prev = ggd_kurtosis(kBetaMin);
  for (double b = kBetaMin + 0.01; b <= kBetaMax; b += 0.01) {
    const double k = ggd_kurtosis(b);
    EXPECT_LT(k, prev) << "beta " << b;
    prev = k;
  }
}

TEST(Kurtosis, RejectsShapeOutsideDomain) {
  EXPECT_THROW(ggd_kurtosis(0.1), DomainError);
  EXPECT_THROW(ggd_kurtosis(25.0), DomainError);
}

TEST(Shape, InvertsKurtosis) {
  EXPECT_NEAR(beta_from_kurtosis(0.0), 2.0, 1e-9);
  EXPECT_NEAR(beta_from_kurtosis(3.0), 1.0, 1e-9);
  for (const double b : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    EXPECT_NEAR(beta_from_kurtosis(ggd_kurtosis(b)), b, 1e-6);
  }
  for (double b = 0.2; b < 19.0; b *= 1.3) {
    EXPECT_NEAR(beta_from_kurtosis(ggd_kurtosis(b)), b, 1e-6 * b) << "beta " << b;
  }
}

TEST(Shape, MonotoneDecreasingInKurtosis) {
  double prev = beta_from_kurtosis(-1.19);
  for (double k = -1.1; k < 50.0; k += 0.37) {
    const double b = beta_from_kurtosis(k);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(Shape, ClampsOutOfRangeKurtosis) {
  const auto low = recover_shape(-1.5);
  EXPECT_TRUE(low.clamped);
  EXPECT_NEAR(low.beta, kBetaMax, 1e-3);
  const auto high = recover_shape(1e6);
  EXPECT_TRUE(high.clamped);
  EXPECT_NEAR(high.beta, kBetaMin, 1e-9);
  EXPECT_FALSE(recover_shape(0.0).clamped);
}

TEST(Scale, FromVariance) {
  EXPECT_NEAR(alpha_from_variance(1.0, 2.0), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(alpha_from_variance(4.0, 2.0), 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(alpha_from_variance(1.0, 1.0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_THROW(alpha_from_variance(0.0, 2.0), DomainError);
  EXPECT_NEAR(ggd_variance(GgdParams<double>{0.0, alpha_from_variance(2.5, 0.7), 0.7}), 2.5, 1e-10);
}

TEST(Fit, GaussianHandExample) {
  const std::vector<double> xs{-1, 0, 1};
  const auto p = fit_gaussian<double>(xs);
  EXPECT_DOUBLE_EQ(p.mu, 0.0);
  EXPECT_DOUBLE_EQ(p.sigma2, 2.0 / 3.0);
}

TEST(Fit, ConstantSamplesRejected) {
  const std::vector<double> xs(10, 1.0);
  EXPECT_THROW(fit_gaussian<double>(xs), DomainError);
  EXPECT_THROW(fit_ggd<double>(xs), DomainError);
  const std::vector<double> three{1, 2, 3};
  EXPECT_THROW(fit_ggd<double>(three), InsufficientDataError);
}

TEST(Fit, RecoversLaplaceLikeShape) {
  const auto xs = sample_ggd(GgdParams<double>{0.0, 1.0, 1.5}, 100000, 77);
  const auto p = fit_ggd<double>(xs);
  EXPECT_NEAR(p.beta, 1.5, 0.1);
  EXPECT_NEAR(p.alpha, 1.0, 0.05);
  EXPECT_NEAR(p.mu, 0.0, 0.02);
}

TEST(Fit, ForcedShapeMatchesGaussianScale) {
  const auto xs = normals(500, 9);
  const auto g = fit_gaussian<double>(xs);
  const auto f = fit_ggd_detailed<double>(xs, 2.0);
  EXPECT_EQ(f.params.mu, g.mu);
  EXPECT_EQ(f.params.beta, 2.0);
  EXPECT_NEAR(f.params.alpha * f.params.alpha / 2.0, g.sigma2, 1e-12);
}

TEST(LogPdf, HandValues) {
  EXPECT_NEAR(log_pdf_gaussian(0.0, GaussianParams<double>{0.0, 1.0}), -0.9189385332046727, 1e-12);
  EXPECT_NEAR(log_pdf_ggd(0.0, GgdParams<double>{0.0, 1.0, 1.0}), std::log(0.5), 1e-12);
}

TEST(LogPdf, ShapeTwoReducesToGaussian) {
  const GaussianParams<double> g{0.0, 1.0};
  const GgdParams<double> q{0.0, std::sqrt(2.0), 2.0};
  for (int i = 0; i <= 1000; ++i) {
    const double x = -5.0 + 0.01 * i;
    EXPECT_NEAR(log_pdf_ggd(x, q), log_pdf_gaussian(x, g), 1e-12);
  }
}

TEST(LogPdf, SymmetricAndModalAtMean) {
  const GgdParams<double> q{1.5, 0.8, 0.9};
  const GaussianParams<double> g{1.5, 0.3};
  for (double d = 0.0; d < 6.0; d += 0.125) {
    EXPECT_EQ(log_pdf_ggd(1.5 + d, q), log_pdf_ggd(1.5 - d, q));
    EXPECT_EQ(log_pdf_gaussian(1.5 + d, g), log_pdf_gaussian(1.5 - d, g));
    EXPECT_LE(log_pdf_ggd(1.5 + d, q), log_pdf_ggd(1.5, q));
    EXPECT_LE(log_pdf_gaussian(1.5 + d, g), log_pdf_gaussian(1.5, g));
  }
  EXPECT_TRUE(std::isfinite(log_pdf_ggd(1e6, q)));
}

// Outside +-40 sigma the GGD keeps mass above 1e-6 once beta drops below about
// 0.4, so the window grows for those shapes.
TEST(LogPdf, IntegratesToOne) {
  const GaussianParams<double> g{3.0, 2.0};
  const double sg = std::sqrt(g.sigma2);
  const double total_g = oracle::integrate(
      [&](double x) { return std::exp(log_pdf_gaussian(x, g)); }, g.mu - 40 * sg, g.mu,
      g.mu + 40 * sg);
  EXPECT_NEAR(total_g, 1.0, 1e-6);

  for (const double beta : {0.3, 0.35, 0.4, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0}) {
    const GgdParams<double> q{-1.0, 0.7, beta};
    const double sd = std::sqrt(ggd_variance(q));
    const double half = (beta < 0.4 ? 400.0 : 40.0) * sd;
    const double total = oracle::integrate([&](double x) { return std::exp(log_pdf_ggd(x, q)); },
                                           q.mu - half, q.mu, q.mu + half);
    EXPECT_NEAR(total, 1.0, 1e-6) << "beta " << beta;
  }
}
