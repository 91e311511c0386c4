#include "fewg/window.hpp"

#include <cmath>

#include "fewg/constants.hpp"

namespace fewg {

namespace {

constexpr double a0 = 0.42;
constexpr double a1 = 0.5;
constexpr double a2 = 0.08;

// Real envelope of the transform; the carrier phase is exp(i x).
double envelope(WindowKind kind, double x) {
  if (kind == WindowKind::Rectangular) return sinc(x);
  const double pi = constants::pi;
  const double s = a0 * sinc(x) + 0.5 * a1 * (sinc(x - pi) + sinc(x + pi)) +
                   0.5 * a2 * (sinc(x - 2.0 * pi) + sinc(x + 2.0 * pi));
  return s / a0;
}

}  // namespace

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double window_profile(WindowKind kind, double s) {
  if (s < 0.0 || s > 1.0) return 0.0;
  if (kind == WindowKind::Rectangular) return 1.0;
  const double t = 2.0 * constants::pi * s;
  return (a0 - a1 * std::cos(t) + a2 * std::cos(2.0 * t)) / a0;
}

std::complex<double> window_transform(WindowKind kind, double delta, double length) {
  const double x = 0.5 * delta * length;
  return std::polar(1.0, x) * envelope(kind, x);
}

double window_transform_abs2(WindowKind kind, double delta, double length) {
  const double e = envelope(kind, 0.5 * delta * length);
  return e * e;
}

double window_energy_factor(WindowKind kind) {
  if (kind == WindowKind::Rectangular) return 1.0;
  return (a0 * a0 + 0.5 * a1 * a1 + 0.5 * a2 * a2) / (a0 * a0);
}

}  // namespace fewg
