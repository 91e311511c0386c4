#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fewg/beam.hpp"
#include "fewg/geometry.hpp"

namespace fewg {

/// Closed-form dispersive kernel: the Gaussian integral over detuning D of
/// exp(i D a / v + i beta2 D^2 b / v_g), with a = z - (v/v_g)(R(z) - r_pulse)
/// and b = r_par - R(z). beta2 is the quadratic dispersion coefficient in s.
/// Throws SingularPoint when b = 0 and DomainError when beta2 = 0.
std::complex<double> stationary_phase_kernel(double z, double r_par, double r_pulse,
                                             double beta2, double v, double v_g,
                                             const Routing& routing = Routing());

/// Mode envelope u_z(R0, z) sampled along the trajectory; synthesis uses
/// its conjugate.
struct Envelope {
  std::vector<double> z;
  std::vector<std::complex<double>> u;

  double length() const { return z.back() - z.front(); }
  std::complex<double> at(double z) const;
};

/// Window profile times a constant amplitude on `points` samples of [0, L].
Envelope window_envelope(WindowKind kind, double length, int points = 1024,
                         double amplitude = 1.0);

enum class WaveformMethod { Auto, Kernel, Delta };

struct WaveformOptions {
  WaveformMethod method = WaveformMethod::Auto;
  /// Delta path when kernel width / envelope feature scale is below this.
  double switch_ratio = 0.05;
  int grid_points = 2048;
  /// Pulse-frame grid spans [lo, hi] times the walk-off span.
  double grid_lo = -0.2;
  double grid_hi = 1.2;
};

struct WaveformResult {
  std::vector<double> r_pulse;
  std::vector<std::complex<double>> phi;
  double omega_m = 0.0;
  /// Full width at half maximum of |phi| divided by v_g.
  double duration = 0.0;
  /// L |1/v_g - 1/v|.
  double walkoff_duration = 0.0;
  double beta2 = 0.0;
  double v = 0.0;
  double v_g = 0.0;
  /// Integral of |phi|^2 before normalization.
  double raw_energy = 0.0;
  /// max(|phi| at the two grid ends) / peak.
  double edge_ratio = 0.0;
  WaveformMethod method = WaveformMethod::Kernel;
  /// Kernel width over envelope feature scale.
  double kernel_ratio = 0.0;
  Routing routing;
};

/// Emitted wavepacket in the pulse frame, observed at the waveguide output
/// r_par = R(L). Throws DegeneratePhaseMatching in the delta path when a
/// root has |R'(z) - v_g/v| < 1e-6.
WaveformResult synthesize_waveform(const Envelope& envelope, const Routing& routing,
                                   double v, double v_g, double beta2, double omega_m,
                                   const WaveformOptions& options = {});

/// <a, b> / (|a| |b|). With `align`, b is shifted so that the centroids of
/// |phi|^2 coincide; b is resampled onto a's grid. Throws GridMismatch when
/// the grids do not overlap.
std::complex<double> waveform_overlap(const WaveformResult& a, const WaveformResult& b,
                                      bool align = false);

std::string to_string(WaveformMethod method);
WaveformMethod waveform_method_from_string(const std::string& name);

}  // namespace fewg
