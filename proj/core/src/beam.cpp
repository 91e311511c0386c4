#include "fewg/beam.hpp"

#include <cmath>

#include "fewg/constants.hpp"
#include "fewg/errors.hpp"

namespace fewg {

WindowKind window_from_string(const std::string& name) {
  if (name == "rectangular") return WindowKind::Rectangular;
  if (name == "blackman") return WindowKind::Blackman;
  throw ConfigError("beam.window must be 'rectangular' or 'blackman', got '" +
                    name + "'");
}

std::string to_string(WindowKind window) {
  return window == WindowKind::Rectangular ? "rectangular" : "blackman";
}

void BeamParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beam.beta must be in (0, 1)");
  if (!(gap > 0.0)) throw ConfigError("beam.gap must be > 0");
  if (!(length > 0.0)) throw ConfigError("beam.length must be > 0");
  if (!transverse_density.empty()) {
    double total = 0.0;
    for (const auto& p : transverse_density) {
      if (p.weight < 0.0) {
        throw ConfigError("beam.transverse_density weights must be >= 0");
      }
      total += p.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ConfigError("beam.transverse_density must integrate to 1");
    }
  }
}

double BeamParams::velocity() const { return beta * constants::speed_of_light; }

double BeamParams::gamma() const { return 1.0 / std::sqrt(1.0 - beta * beta); }

double beta_to_kinetic_energy(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  // (gamma - 1) written without cancellation for small beta.
  const double s = std::sqrt(1.0 - beta * beta);
  return constants::electron_rest_energy_eV * beta * beta / (s * (1.0 + s));
}

double kinetic_energy_to_beta(double kinetic_energy_eV) {
  if (!(kinetic_energy_eV > 0.0) || !std::isfinite(kinetic_energy_eV)) {
    throw DomainError("kinetic energy must be positive and finite");
  }
  const double t = kinetic_energy_eV / constants::electron_rest_energy_eV;
  return std::sqrt(t * (t + 2.0)) / (1.0 + t);
}

std::vector<WeightedPoint> gaussian_transverse_density(double waist,
                                                       int points_per_axis) {
  if (!(waist > 0.0) || points_per_axis < 1) {
    throw DomainError("gaussian density needs waist > 0 and >= 1 point");
  }
  std::vector<WeightedPoint> points;
  if (points_per_axis == 1) {
    points.push_back({0.0, 0.0, 1.0});
    return points;
  }
  const double span = 2.0 * waist;
  const double step = 2.0 * span / (points_per_axis - 1);
  double total = 0.0;
  for (int j = 0; j < points_per_axis; ++j) {
    for (int i = 0; i < points_per_axis; ++i) {
      const double dx = -span + i * step;
      const double dy = -span + j * step;
      const double w = std::exp(-2.0 * (dx * dx + dy * dy) / (waist * waist));
      points.push_back({dx, dy, w});
      total += w;
    }
  }
  for (auto& p : points) p.weight /= total;
  return points;
}

}  // namespace fewg
