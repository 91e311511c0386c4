#include <gtest/gtest.h>

#include <cmath>

#include "fewg/constants.hpp"
#include "fewg/errors.hpp"
#include "fewg/resonator.hpp"

using namespace fewg;

namespace {

ResonatorParams params(double finesse, double anchor = 1.2e15) {
  ResonatorParams p;
  p.fsr = 100e9;
  p.finesse = finesse;
  p.anchor_omega = anchor;
  return p;
}

CouplingSpectrum gaussian_open(double centre, double sigma, double half_span, double step) {
  CouplingSpectrum s;
  s.families = {"TM00"};
  s.density.resize(1);
  const long n = std::lround(2.0 * half_span / step);
  for (long k = 0; k <= n; ++k) {
    const double w = centre - half_span + k * step;
    s.omega.push_back(w);
    s.density[0].push_back(1e-15 * std::exp(-0.5 * std::pow((w - centre) / sigma, 2)));
    s.background.push_back(3e-18);
  }
  return s;
}

}  // namespace

TEST(Susceptibility, PeakAndHalfWidth) {
  const auto p = params(150.0, 0.0);
  EXPECT_NEAR(susceptibility(p.anchor_omega, p.anchor_omega, p), 2.0 * 150.0 / constants::pi,
              1e-12);
  const double half = susceptibility(p.anchor_omega + 0.5 * p.linewidth(), p.anchor_omega, p);
  EXPECT_NEAR(half / susceptibility(p.anchor_omega, p.anchor_omega, p), 0.5, 1e-12);
  EXPECT_NEAR(p.linewidth() * p.finesse, 2.0 * constants::pi * p.fsr, 1e-3);
}

TEST(Susceptibility, IsolatedLineIntegratesToFsr) {
  const auto p = params(80.0);
  const double k = p.linewidth();
  const double X = 400.0 * k;
  const int n = 800000;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double d = -X + 2.0 * X * i / n;
    sum += (i == 0 || i == n ? 0.5 : 1.0) * susceptibility(p.anchor_omega + d, p.anchor_omega, p);
  }
  sum *= 2.0 * X / n;
  // Closed form over [-X, X]; tends to F kappa = 2 pi fsr.
  const double oracle = p.finesse * k * 2.0 / constants::pi * std::atan(2.0 * X / k);
  EXPECT_NEAR(sum / oracle, 1.0, 1e-6);
  EXPECT_NEAR(oracle / p.fsr_omega(), 1.0, 2e-3);
}

TEST(Comb, TruncatedSumMatchesClosedForm) {
  for (double F : {10.0, 100.0, 1000.0}) {
    const auto p = params(F);
    EXPECT_LT(comb_truncation_bound(p), 1e-4);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const double w = p.anchor_omega + p.fsr_omega() * (i / 2000.0 - 0.37);
      const double exact = comb_susceptibility_exact(w, p);
      worst = std::max(worst, std::abs(comb_susceptibility(w, p) - exact));
    }
    // Bound is relative to the FSR-averaged comb, which is 1.
    EXPECT_LE(worst, comb_truncation_bound(p)) << F;
  }
}

TEST(Resonator, QuantaConservedOverBroadBand) {
  const double sigma = 5e12;  // FWHM about 19 FSR
  for (double F : {10.0, 100.0, 1000.0}) {
    const auto p = params(F);
    const auto open = gaussian_open(1.2e15, sigma, 8.0 * sigma, 2e10);
    ResonatorOptions o;
    const auto r = resonator_spectrum(open, p, o);
    const double before = trapezoid(open.omega, open.density[0]);
    const double after = trapezoid(r.spectrum.omega, r.spectrum.density[0]);
    EXPECT_NEAR(after / before, 1.0, 5e-3) << F;
    EXPECT_EQ(r.refined, p.linewidth() / 8 < 2e10);
  }
}

TEST(Resonator, PeakEnhancementAtCombLines) {
  const auto p = params(100.0);
  const double step = p.linewidth() / 8.0;
  // Grid through the anchor with FSR an integer number of steps.
  const auto open = gaussian_open(p.anchor_omega, 5e12, 6400 * step, step);
  const auto r = resonator_spectrum(open, p);
  ASSERT_FALSE(r.refined);
  for (int m : {-3, 0, 2, 7}) {
    const std::size_t k = 6400 + 800 * m;
    ASSERT_NEAR(r.spectrum.omega[k], p.anchor_omega + m * p.fsr_omega(), 1e-6 * step);
    const double ratio = r.spectrum.density[0][k] / open.density[0][k];
    EXPECT_NEAR(ratio / (2.0 * p.finesse / constants::pi), 1.0, 0.01) << m;
  }
  // Local maxima of the enhancement sit on comb lines.
  for (std::size_t k = 1; k + 1 < open.omega.size(); ++k) {
    const double c = r.spectrum.density[0][k] / open.density[0][k];
    if (c > r.spectrum.density[0][k - 1] / open.density[0][k - 1] &&
        c > r.spectrum.density[0][k + 1] / open.density[0][k + 1]) {
      const double x = (open.omega[k] - p.anchor_omega) / p.fsr_omega();
      EXPECT_LE(std::abs(x - std::round(x)) * p.fsr_omega(), step);
    }
  }
  // Background is not resonant.
  EXPECT_EQ(r.spectrum.background, open.background);
}

TEST(Resonator, ConstantSpectrumOverWholeFsrs) {
  const auto p = params(300.0);
  CouplingSpectrum open;
  open.families = {"TM00"};
  open.omega = {p.anchor_omega + 0.25 * p.fsr_omega(), p.anchor_omega + 5.25 * p.fsr_omega()};
  open.density = {{2e-16, 2e-16}};
  open.background = {0.0, 0.0};
  const auto r = resonator_spectrum(open, p);
  EXPECT_TRUE(r.refined);
  const double after = trapezoid(r.spectrum.omega, r.spectrum.density[0]);
  EXPECT_NEAR(after / (2e-16 * 5.0 * p.fsr_omega()), 1.0, 1e-3);
}

TEST(Resonator, LowFinesseLimitIsFlat) {
  const auto p = params(1.0001);
  const auto open = gaussian_open(1.2e15, 5e12, 4e13, 1e10);
  const auto r = resonator_spectrum(open, p);
  for (std::size_t k = 0; k < r.spectrum.omega.size(); k += 97) {
    const double want = 1e-15 * std::exp(-0.5 * std::pow((r.spectrum.omega[k] - 1.2e15) / 5e12, 2));
    if (want < 1e-20) continue;
    EXPECT_NEAR(r.spectrum.density[0][k] / want, 1.0, 0.15);
  }
}

TEST(Resonator, RefinementCapAndValidation) {
  const auto open = gaussian_open(1.2e15, 5e12, 4e13, 1e10);
  ResonatorOptions o;
  o.max_points = 1000;
  EXPECT_THROW(resonator_spectrum(open, params(1000.0), o), UnderResolvedComb);
  EXPECT_THROW(resonator_spectrum(open, params(1.0)), ConfigError);
  auto bad = params(10.0);
  bad.fsr = 0.0;
  EXPECT_THROW(resonator_spectrum(open, bad), ConfigError);
}

TEST(Resonator, CoherenceFlags) {
  const auto open = gaussian_open(1.2e15, 5e12, 4e13, 1e10);
  const auto r = resonator_spectrum(open, params(10.0));
  EXPECT_DOUBLE_EQ(r.round_trip_time, 1e-11);
  EXPECT_FALSE(r.comb_resolvable);
  EXPECT_TRUE(r.open_smooth);
}

TEST(ModesInBand, Estimates) {
  EXPECT_NEAR(modes_in_band(2.0, 1.9), 10.0, 1e-12);
  EXPECT_LT(modes_in_band(3.2, 1.6), 1.0);
  EXPECT_THROW(modes_in_band(1.7, 1.7 + 1e-12), DegenerateDispersion);
}
