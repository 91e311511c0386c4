#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fewg/beam.hpp"
#include "fewg/dispersion.hpp"
#include "fewg/modesolver.hpp"

namespace fewg {

/// Absolute sampling points of the electron's transverse density. A
/// point-like beam yields one point at (lateral_offset, gap).
std::vector<WeightedPoint> beam_support(const BeamParams& beam);

/// Weighted average of a pointwise field over a transverse density. Throws
/// SupportViolation if a weighted point lies inside material.
double transverse_average(const std::function<double(double, double)>& field,
                          const std::vector<WeightedPoint>& density,
                          const std::function<bool(double, double)>& in_material = {});

/// |u_z|^2 of a mode averaged over the beam's transverse density.
double beam_uz_abs2(const ModeSolution& mode, const BeamParams& beam);

/// alpha c L^2 |u_z|^2 |W(delta L)|^2 / (omega v_g), in s.
double coupling_density_closed_form(double omega, double n_eff, double n_g,
                                    double uz_abs2, const BeamParams& beam);

/// Density of a solved mode; requires n_g to be set.
double coupling_density(const ModeSolution& mode, const BeamParams& beam);

/// 2 pi alpha c L |u_z|^2 / (omega |1 - v_g / v|), the weak-dispersion band
/// integral for a rectangular window.
double integrated_strength_closed_form(double omega_pm, double n_g,
                                       double uz_abs2, const BeamParams& beam);

/// Smooth interpolant of one family's dispersion and beam-averaged |u_z|^2.
class FamilyCouplingModel {
 public:
  FamilyCouplingModel(const FamilyDispersion& family, const BeamParams& beam);

  const std::string& family() const { return family_; }
  Polarization polarization() const { return polarization_; }
  bool covers(double omega) const;
  double omega_min() const { return omega_.front(); }
  double omega_max() const { return omega_.back(); }
  double n_eff(double omega) const;
  double n_g(double omega) const;
  double uz_abs2(double omega) const;
  /// Density at (omega, beta) for the given interaction length and window.
  /// Zero outside the family's frequency range.
  double density(double omega, const BeamParams& beam) const;
  /// Frequency where n_eff = 1 / beta, if inside the family's range.
  std::optional<double> phase_matching_omega(double beta) const;

  const std::vector<double>& sample_omega() const { return omega_; }
  const std::vector<double>& sample_uz_abs2() const { return uz2_; }

 private:
  struct Splines;
  std::string family_;
  Polarization polarization_;
  std::vector<double> omega_;
  std::vector<double> n_eff_;
  std::vector<double> n_g_;
  std::vector<double> uz2_;
  std::shared_ptr<const Splines> splines_;
};

std::vector<FamilyCouplingModel> coupling_models(const std::vector<FamilyDispersion>& families,
                                                 const BeamParams& beam);

struct CouplingSpectrum {
  std::vector<double> omega;
  std::vector<std::string> families;
  /// density[f][k] at omega[k], s.
  std::vector<std::vector<double>> density;
  std::vector<double> background;
  BeamParams beam;

  std::size_t family_index(const std::string& family) const;
  const std::vector<double>& family_density(const std::string& family) const;
  double total(std::size_t k) const;
};

/// Base grid of `points` uniform in omega across the band, refined by
/// `refine` where any family exceeds `threshold` of its peak and densely
/// enough near phase matching to resolve the main lobe.
std::vector<double> coupling_omega_grid(const std::vector<FamilyCouplingModel>& models,
                                        const BeamParams& beam, double lambda_min,
                                        double lambda_max, int points = 600,
                                        int refine = 4, double threshold = 1e-4);

/// Evaluates every family (and an optional background density) on a grid.
CouplingSpectrum coupling_spectrum(const std::vector<FamilyCouplingModel>& models,
                                   const BeamParams& beam,
                                   const std::vector<double>& omega,
                                   const std::function<double(double)>& background = {});

/// Trapezoidal integral of a family over its band window: the span from the
/// first to the last sample above `threshold` of the peak. Throws
/// BandTruncated if the density at either grid edge exceeds 1e-3 of the peak.
double integrated_strength(const CouplingSpectrum& spectrum, const std::string& family,
                           double threshold = 1e-4);

/// Band window [first, last] sample indices used by integrated_strength.
std::pair<std::size_t, std::size_t> band_window(const std::vector<double>& density,
                                                double threshold = 1e-4);

double trapezoid(const std::vector<double>& x, const std::vector<double>& y,
                 std::size_t first = 0, std::size_t last = static_cast<std::size_t>(-1));

struct CouplingMap {
  std::vector<double> beta;
  std::vector<double> omega;
  std::vector<std::string> families;
  /// per_family[f][i * omega.size() + k] at (beta[i], omega[k]).
  std::vector<std::vector<double>> per_family;
  std::vector<double> background;
  std::vector<double> total;
  std::vector<std::uint8_t> failed;
  std::vector<std::string> failures;

  std::size_t at(std::size_t ib, std::size_t iw) const { return ib * omega.size() + iw; }
};

/// Background density as a function of (beta, omega); may throw, in which
/// case the cell is marked failed.
using BackgroundFunction = std::function<double(double beta, double omega)>;

CouplingMap coupling_map(const std::vector<FamilyCouplingModel>& models,
                         const BeamParams& beam_template,
                         const std::vector<double>& beta_grid,
                         const std::vector<double>& omega_grid,
                         const BackgroundFunction& background = {}, int jobs = 1);

}  // namespace fewg
