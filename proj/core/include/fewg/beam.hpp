#pragma once

#include <string>
#include <vector>

namespace fewg {

enum class WindowKind { Rectangular, Blackman };

WindowKind window_from_string(const std::string& name);
std::string to_string(WindowKind window);

/// A sample of the transverse probability density |psi_perp|^2, as an
/// offset from the nominal beam position with its probability weight.
struct WeightedPoint {
  double dx = 0.0;
  double dy = 0.0;
  double weight = 1.0;
};

/// Electron beam: velocity, position above the core top surface, and the
/// length of the co-propagating interaction.
struct BeamParams {
  double beta = 0.65;
  double gap = 100e-9;
  double length = 50e-6;
  WindowKind window = WindowKind::Rectangular;
  /// Horizontal beam position relative to the core center.
  double lateral_offset = 0.0;
  /// Empty means a point-like beam at (lateral_offset, gap).
  std::vector<WeightedPoint> transverse_density;

  void validate() const;
  double velocity() const;
  double gamma() const;
};

/// Kinetic energy (eV) of an electron with v/c = beta.
double beta_to_kinetic_energy(double beta);
double kinetic_energy_to_beta(double kinetic_energy_eV);

/// Samples a normalized isotropic Gaussian density of 1/e^2 intensity waist
/// `waist` on a square grid of `points_per_axis`^2 points spanning +-2 waist.
std::vector<WeightedPoint> gaussian_transverse_density(double waist,
                                                       int points_per_axis);

}  // namespace fewg
