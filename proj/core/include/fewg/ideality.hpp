#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fewg/coupling.hpp"

namespace fewg {

struct IdealityOptions {
  std::string target = "TM00";
  double zlp_fwhm_eV = 0.5;
  /// Half-width of the sideband filter window in units of the ZLP FWHM.
  double window_fwhm = 1.0;
  /// Families below this fraction of the target's integrated strength are
  /// ignored by the overlap check.
  double overlap_min_fraction = 1e-4;
};

struct IdealityReport {
  std::string target;
  double I = 0.0;
  double I_star = 0.0;
  double zlp_fwhm_eV = 0.0;
  double window_half_width_eV = 0.0;
  /// Peak of the target's ZLP-convolved density, eV of photon energy.
  double filtered_peak_eV = 0.0;
  std::vector<std::pair<std::string, double>> family_strengths;
  double background_strength = 0.0;
  double total_strength = 0.0;
  /// Families whose convolved peak falls inside the filter window.
  std::vector<std::string> overlap_warnings;
  /// Non-target families with significant density at a grid edge.
  std::vector<std::string> truncated_families;
  BeamParams beam;

  double strength(const std::string& family) const;
};

/// Normalized Gaussian ZLP of the given FWHM.
double zlp_profile(double energy_eV, double fwhm_eV);

/// Convolves a density sampled at (possibly non-uniform) photon energies with
/// the ZLP, using trapezoid weights at the nodes. Output is per eV of the
/// input measure and integrates to the trapezoid integral of the input.
std::vector<double> zlp_convolve(const std::vector<double>& energy_eV,
                                 const std::vector<double>& density,
                                 double fwhm_eV, const std::vector<double>& out_eV);

/// |g_target|^2 over the integral of all families plus background.
double ideality_full(const CouplingSpectrum& spectrum, const std::string& target = "TM00");

/// Sideband-filtered ideality: all channels convolved with the ZLP, then
/// integrated over +-window around the target's convolved peak.
double ideality_filtered(const CouplingSpectrum& spectrum, const IdealityOptions& options,
                         std::vector<std::string>* overlap_warnings = nullptr,
                         double* filtered_peak_eV = nullptr);

IdealityReport ideality_report(const CouplingSpectrum& spectrum, const IdealityOptions& options);

/// Builds the spectrum for one beam from solved families, over a band.
struct SpectrumRecipe {
  double lambda_min = 780e-9;
  double lambda_max = 2500e-9;
  int points = 600;
  int refine = 4;
  /// Background density as a function of omega for the given beam.
  std::function<double(const BeamParams&, double)> background;
};

CouplingSpectrum spectrum_for_beam(const std::vector<FamilyDispersion>& families,
                                   const BeamParams& beam, const SpectrumRecipe& recipe);

struct TradeoffPoint {
  double gap = 0.0;
  double target_strength = 0.0;
  IdealityReport report;
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;
  bool strength_decreasing = true;
  bool ideality_increasing = true;
};

/// One report per gap in [50 nm, 1 um].
TradeoffCurve gap_tradeoff(const std::vector<FamilyDispersion>& families,
                           const BeamParams& beam_template, const std::vector<double>& gaps,
                           const SpectrumRecipe& recipe, const IdealityOptions& options);

/// Gap at which the target's integrated strength equals `strength`, by
/// bisection in log strength over [gap_lo, gap_hi].
double gap_for_strength(const std::vector<FamilyDispersion>& families,
                        const BeamParams& beam_template, double strength,
                        const SpectrumRecipe& recipe, const std::string& target,
                        double gap_lo, double gap_hi, double rel_tol = 1e-4);

}  // namespace fewg
