#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fewg/modesolver.hpp"

namespace fewg {

/// Mode solutions at one frequency of a sweep. A failed sample keeps its
/// frequency so trackers can flag the gap.
struct OmegaSample {
  double omega = 0.0;
  bool failed = false;
  std::string error;
  std::vector<ModeSolution> modes;
};

/// One mode family followed across frequency, samples ascending in omega.
struct FamilyDispersion {
  std::string family;
  Polarization polarization = Polarization::QuasiTM;
  std::vector<double> omega;
  std::vector<double> n_eff;
  std::vector<double> n_g;
  std::vector<ModeSolution> modes;
  /// Sweep frequencies inside the family's range with no solution; values
  /// there are interpolated.
  std::vector<double> gaps;

  bool covers(double w) const;
  double n_eff_at(double w) const;
  double n_g_at(double w) const;
};

/// n_eff + omega dn_eff/domega from the quadratic through the three samples
/// nearest to `omega`. Exact for quadratic n_eff(omega).
double group_index(const FamilyDispersion& family, double omega);
double group_index(const std::vector<double>& omega,
                   const std::vector<double>& n_eff, double at);

struct TrackingReport {
  /// Human-readable AmbiguousTracking and gap notes.
  std::vector<std::string> issues;
};

/// Greedy overlap matching between adjacent samples. Families are labelled at
/// the lowest frequency where they appear. Fills n_g of every sample.
std::vector<FamilyDispersion> track_families(const std::vector<OmegaSample>& samples,
                                             TrackingReport* report = nullptr,
                                             double min_overlap = 0.5);

/// Samples of a sweep as returned by solve_modes, one per frequency.
std::vector<OmegaSample> sweep_modes(const WaveguideGeometry& geometry,
                                     const MaterialLibrary& materials,
                                     const std::vector<double>& omegas,
                                     const GridSpec& grid,
                                     const SolveOptions& options, int jobs = 1);

using OmegaSolver = std::function<std::vector<ModeSolution>(double omega)>;

/// Same with a caller-supplied per-frequency solver (for example a cache).
/// NoGuidedMode yields an empty sample; other errors mark it failed.
std::vector<OmegaSample> sweep_modes(const std::vector<double>& omegas,
                                     const OmegaSolver& solver, int jobs = 1);

/// Frequencies uniformly spaced between two vacuum wavelengths.
std::vector<double> omega_grid_for_band(double lambda_min, double lambda_max,
                                        int points);

}  // namespace fewg
