#pragma once

#include <cstddef>

#include "fewg/coupling.hpp"

namespace fewg {

struct ResonatorParams {
  /// Free spectral range, Hz.
  double fsr = 100e9;
  double finesse = 100.0;
  /// One comb line sits here, rad/s.
  double anchor_omega = 0.0;

  void validate() const;
  /// Angular FSR, rad/s.
  double fsr_omega() const;
  /// Angular linewidth kappa = 2 pi fsr / F, rad/s.
  double linewidth() const;
};

/// (2/pi) F / (1 + 4 (omega - omega0)^2 / kappa^2).
double susceptibility(double omega, double omega0, const ResonatorParams& params);

/// Lines summed on each side of a frequency: max(5, ceil(1e4 / (pi F) + 1/2)),
/// which keeps comb_truncation_bound below 1e-4.
int comb_lines_per_side(const ResonatorParams& params);

/// Bound on the relative error of the truncated comb sum against the full
/// periodic sum, from the Lorentzian tails beyond the summed lines, as a
/// fraction of the FSR-averaged comb (which is 1).
double comb_truncation_bound(const ResonatorParams& params);

/// Truncated comb sum sum_m chi_m(omega).
double comb_susceptibility(double omega, const ResonatorParams& params);

/// Closed-form infinite comb sum sinh(pi/F) / (cosh(pi/F) - cos(2 pi x)).
double comb_susceptibility_exact(double omega, const ResonatorParams& params);

struct ResonatorOptions {
  int points_per_linewidth = 8;
  /// Largest refined grid before UnderResolvedComb is thrown.
  std::size_t max_points = 4'000'000;
  double zlp_fwhm_eV = 0.5;
};

struct ResonatorResult {
  CouplingSpectrum spectrum;
  ResonatorParams params;
  int lines_per_side = 0;
  double truncation_bound = 0.0;
  bool refined = false;
  /// False when the open spectrum varies on the FSR scale.
  bool open_smooth = true;
  /// 1 / fsr, s.
  double round_trip_time = 0.0;
  /// h / ZLP FWHM, s.
  double zlp_coherence_time = 0.0;
  /// FSR exceeds the ZLP width, so the electron could resolve the comb.
  bool comb_resolvable = false;
};

/// Multiplies each family by the comb sum; background passes through.
ResonatorResult resonator_spectrum(const CouplingSpectrum& open, const ResonatorParams& params,
                                   const ResonatorOptions& options = {});

/// Resonances inside one phase-matching band, 1 / |n_g - n_eff|.
double modes_in_band(double n_g, double n_eff);

}  // namespace fewg
