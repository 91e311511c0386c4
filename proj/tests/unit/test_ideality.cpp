#include <gtest/gtest.h>

#include <cmath>

#include "fewg/constants.hpp"
#include "fewg/errors.hpp"
#include "fewg/ideality.hpp"
#include "synthetic.hpp"

using namespace fewg;

namespace {

// Gaussian bands in photon energy on a uniform energy grid 0.5-1.6 eV.
CouplingSpectrum gaussian_bands(const std::vector<std::pair<std::string, double>>& centres_eV,
                                const std::vector<double>& heights, double width_eV = 0.03,
                                double background = 0.0, int points = 4001) {
  CouplingSpectrum s;
  for (int k = 0; k < points; ++k) s.omega.push_back(omega_from_eV(0.5 + 1.1 * k / (points - 1)));
  for (std::size_t f = 0; f < centres_eV.size(); ++f) {
    s.families.push_back(centres_eV[f].first);
    std::vector<double> d;
    for (double w : s.omega) {
      const double x = (eV_from_omega(w) - centres_eV[f].second) / width_eV;
      d.push_back(heights[f] * std::exp(-0.5 * x * x));
    }
    s.density.push_back(std::move(d));
  }
  s.background.assign(s.omega.size(), background);
  return s;
}

double trapz_eV(const std::vector<double>& e, const std::vector<double>& y) {
  double t = 0.0;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) t += 0.5 * (y[k] + y[k + 1]) * (e[k + 1] - e[k]);
  return t;
}

}  // namespace

TEST(Ideality, SingleFamilyIsIdeal) {
  const auto s = gaussian_bands({{"TM00", 0.9}}, {1e-15});
  EXPECT_NEAR(ideality_full(s), 1.0, 1e-12);
  for (double fwhm : {0.1, 0.5, 1.0}) {
    IdealityOptions o;
    o.zlp_fwhm_eV = fwhm;
    EXPECT_NEAR(ideality_filtered(s, o), 1.0, 1e-12) << fwhm;
  }
}

TEST(Ideality, TwoEqualFamiliesHalf) {
  const auto s = gaussian_bands({{"TM00", 0.7}, {"TE00", 1.4}}, {1e-15, 1e-15});
  EXPECT_NEAR(ideality_full(s), 0.5, 1e-6);
}

TEST(Ideality, FilteringRemovesDistantBand) {
  const auto s = gaussian_bands({{"TM00", 0.65}, {"TE10", 1.45}}, {1e-15, 1e-15});
  IdealityOptions o;
  o.zlp_fwhm_eV = 0.2;
  std::vector<std::string> warnings;
  const double I_star = ideality_filtered(s, o, &warnings);
  EXPECT_GT(I_star, 0.999);
  EXPECT_NEAR(ideality_full(s), 0.5, 1e-6);
  EXPECT_GE(I_star, ideality_full(s));
  EXPECT_TRUE(warnings.empty());
}

TEST(Ideality, OverlapWarningForNearbyBand) {
  const auto s = gaussian_bands({{"TM00", 0.9}, {"TE00", 1.05}}, {1e-15, 5e-16});
  IdealityOptions o;
  std::vector<std::string> warnings;
  const double I_star = ideality_filtered(s, o, &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_EQ(warnings[0], "TE00");
  EXPECT_LT(I_star, 0.9);
}

TEST(Ideality, ScaleInvariance) {
  auto s = gaussian_bands({{"TM00", 0.8}, {"TE00", 1.1}}, {1e-15, 3e-16}, 0.03, 2e-18);
  IdealityOptions o;
  const double I = ideality_full(s);
  const double Is = ideality_filtered(s, o);
  for (auto& d : s.density) {
    for (auto& v : d) v *= 37.5;
  }
  for (auto& v : s.background) v *= 37.5;
  EXPECT_NEAR(ideality_full(s), I, 1e-12);
  EXPECT_NEAR(ideality_filtered(s, o), Is, 1e-12);
}

TEST(Ideality, BackgroundEntersDenominator) {
  const auto s = gaussian_bands({{"TM00", 0.9}}, {1e-15}, 0.03, 1e-17);
  const double target = trapezoid(s.omega, s.density[0]);
  const double bg = trapezoid(s.omega, s.background);
  EXPECT_NEAR(ideality_full(s), target / (target + bg), 1e-12);
}

TEST(Ideality, TargetAtGridEdgeIsTruncated) {
  const auto s = gaussian_bands({{"TM00", 0.52}}, {1e-15});
  EXPECT_THROW(ideality_full(s), BandTruncated);
  EXPECT_THROW(ideality_filtered(s, IdealityOptions{}), BandTruncated);
}

TEST(Ideality, ReportStrengthsSumToTotal) {
  const auto s = gaussian_bands({{"TM00", 0.8}, {"TE00", 1.1}, {"TM01", 1.3}},
                                {1e-15, 3e-16, 1e-16}, 0.03, 1e-18);
  const auto r = ideality_report(s, IdealityOptions{});
  double sum = r.background_strength;
  for (const auto& [name, v] : r.family_strengths) sum += v;
  EXPECT_NEAR(sum / r.total_strength, 1.0, 1e-9);
  EXPECT_GE(r.I, 0.0);
  EXPECT_LE(r.I, 1.0);
  EXPECT_GE(r.I_star, 0.0);
  EXPECT_LE(r.I_star, 1.0);
  EXPECT_DOUBLE_EQ(r.window_half_width_eV, 0.5);
  EXPECT_NEAR(r.filtered_peak_eV, 0.8, 2e-3);
}

TEST(ZlpConvolution, PreservesIntegral) {
  std::vector<double> e;
  std::vector<double> d;
  for (int k = 0; k <= 700; ++k) {
    // Non-uniform nodes, denser near the band.
    const double t = k / 700.0;
    e.push_back(0.5 + 1.1 * t * t);
    d.push_back(std::exp(-std::pow((e.back() - 0.9) / 0.05, 2)) + 0.1);
  }
  std::vector<double> out;
  for (int k = 0; k <= 20000; ++k) out.push_back(-4.0 + 10.0 * k / 20000.0);
  const auto c = zlp_convolve(e, d, 0.5, out);
  EXPECT_NEAR(trapz_eV(out, c) / trapz_eV(e, d), 1.0, 1e-9);
}

TEST(ZlpProfile, NormalizedWithRequestedWidth) {
  std::vector<double> x;
  std::vector<double> y;
  for (int k = 0; k <= 20000; ++k) {
    x.push_back(-5.0 + 10.0 * k / 20000.0);
    y.push_back(zlp_profile(x.back(), 0.5));
  }
  EXPECT_NEAR(trapz_eV(x, y), 1.0, 1e-12);
  EXPECT_NEAR(zlp_profile(0.25, 0.5) / zlp_profile(0.0, 0.5), 0.5, 1e-12);
}

TEST(GapTradeoff, StrengthFallsWithGapAndRangeChecked) {
  // Field decaying as exp(-y / 150 nm) above the surface.
  auto f = test_support::linear_family("TM00", Polarization::QuasiTM, 0.78e15, 2.42e15, 161, 1.5,
                                       5e-16, 1.5e15, 1.0);
  const auto field = test_support::sampled_field(
      [](double, double y) { return 1e6 * std::exp(-y / 150e-9); }, -2e-6, 2e-6, -0.2e-6, 1.6e-6,
      5e-9);
  for (auto& m : f.modes) m.field = field;
  BeamParams beam;
  beam.beta = 1.0 / 1.52;
  beam.length = 100e-6;
  SpectrumRecipe recipe;
  recipe.lambda_min = 785e-9;
  recipe.lambda_max = 2350e-9;
  const auto curve = gap_tradeoff({f}, beam, {100e-9, 200e-9, 300e-9, 400e-9}, recipe, {});
  EXPECT_TRUE(curve.strength_decreasing);
  ASSERT_EQ(curve.points.size(), 4u);
  // Decay of |u_z|^2 is exp(-2 y / 150 nm).
  EXPECT_NEAR(curve.points[1].target_strength / curve.points[0].target_strength,
              std::exp(-2.0 * 100.0 / 150.0), 1e-3);
  EXPECT_THROW(gap_tradeoff({f}, beam, {30e-9}, recipe, {}), ConfigError);
  EXPECT_THROW(gap_tradeoff({f}, beam, {1.2e-6}, recipe, {}), ConfigError);
  EXPECT_THROW(gap_tradeoff({f}, beam, {}, recipe, {}), ConfigError);

  const double want = curve.points[2].target_strength;
  const double gap = gap_for_strength({f}, beam, want, recipe, "TM00", 100e-9, 400e-9);
  EXPECT_NEAR(gap, 300e-9, 0.1e-9);
}
