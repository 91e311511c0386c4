#pragma once

#include <complex>

#include "fewg/beam.hpp"

namespace fewg {

/// Apodization profile w(s) on s = z / L in [0, 1], scaled to unit mean so
/// every window transforms to 1 at zero phase mismatch.
double window_profile(WindowKind kind, double s);

/// (1/L) * integral_0^L exp(i delta z) w(z/L) dz.
std::complex<double> window_transform(WindowKind kind, double delta, double length);

/// |window_transform|^2, evaluated without the carrier phase.
double window_transform_abs2(WindowKind kind, double delta, double length);

/// Mean of w^2 over the window. Band-integrated coupling scales with this
/// factor relative to a rectangular window of the same length.
double window_energy_factor(WindowKind kind);

double sinc(double x);

}  // namespace fewg
