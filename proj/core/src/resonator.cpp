#include "fewg/resonator.hpp"

#include <algorithm>
#include <cmath>

#include "fewg/constants.hpp"
#include "fewg/errors.hpp"

namespace fewg {

namespace {

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const std::size_t k = static_cast<std::size_t>(it - x.begin());
  const double t = (at - x[k - 1]) / (x[k] - x[k - 1]);
  return y[k - 1] + t * (y[k] - y[k - 1]);
}

}  // namespace

void ResonatorParams::validate() const {
  if (!(fsr > 0.0)) throw ConfigError("resonator.fsr must be > 0");
  if (!(finesse > 1.0)) throw ConfigError("resonator.finesse must be > 1");
}

double ResonatorParams::fsr_omega() const { return 2.0 * constants::pi * fsr; }

double ResonatorParams::linewidth() const { return fsr_omega() / finesse; }

double susceptibility(double omega, double omega0, const ResonatorParams& params) {
  const double x = 2.0 * (omega - omega0) / params.linewidth();
  return 2.0 / constants::pi * params.finesse / (1.0 + x * x);
}

int comb_lines_per_side(const ResonatorParams& params) {
  return std::max(5, static_cast<int>(std::ceil(1e4 / (constants::pi * params.finesse) + 0.5)));
}

double comb_truncation_bound(const ResonatorParams& params) {
  // Lines j > K away contribute below (2/pi) F (1/(2F))^2 / (j - 1/2)^2 each;
  // both tails together stay under 1 / (pi F (K - 1/2)). Relative to the
  // FSR-averaged comb, which is 1.
  const int K = comb_lines_per_side(params);
  return 1.0 / (constants::pi * params.finesse * (K - 0.5));
}

double comb_susceptibility(double omega, const ResonatorParams& params) {
  const double step = params.fsr_omega();
  const double x = (omega - params.anchor_omega) / step;
  const long nearest = std::lround(x);
  const int K = comb_lines_per_side(params);
  double s = 0.0;
  for (long m = nearest - K; m <= nearest + K; ++m) {
    s += susceptibility(omega, params.anchor_omega + static_cast<double>(m) * step, params);
  }
  return s;
}

double comb_susceptibility_exact(double omega, const ResonatorParams& params) {
  const double x = (omega - params.anchor_omega) / params.fsr_omega();
  const double b = constants::pi / params.finesse;
  return std::sinh(b) / (std::cosh(b) - std::cos(2.0 * constants::pi * x));
}

ResonatorResult resonator_spectrum(const CouplingSpectrum& open, const ResonatorParams& params,
                                   const ResonatorOptions& options) {
  params.validate();
  if (open.omega.size() < 2) throw DomainError("open spectrum needs >= 2 samples");
  ResonatorResult r;
  r.params = params;
  r.lines_per_side = comb_lines_per_side(params);
  r.truncation_bound = comb_truncation_bound(params);
  r.round_trip_time = 1.0 / params.fsr;
  r.zlp_coherence_time = 2.0 * constants::pi * constants::hbar_eV_s / options.zlp_fwhm_eV;
  r.comb_resolvable = 2.0 * constants::pi * constants::hbar_eV_s * params.fsr > options.zlp_fwhm_eV;

  const double kappa = params.linewidth();
  const double want = kappa / options.points_per_linewidth;
  double widest = 0.0;
  for (std::size_t k = 0; k + 1 < open.omega.size(); ++k) {
    widest = std::max(widest, open.omega[k + 1] - open.omega[k]);
  }

  // Smoothness on the FSR scale: change across one FSR against the peak.
  double peak = 0.0;
  for (std::size_t k = 0; k < open.omega.size(); ++k) peak = std::max(peak, open.total(k));
  for (std::size_t k = 0; k + 1 < open.omega.size() && peak > 0.0; ++k) {
    const double dw = open.omega[k + 1] - open.omega[k];
    const double change = std::abs(open.total(k + 1) - open.total(k)) / peak;
    if (change * params.fsr_omega() / dw > 0.5) r.open_smooth = false;
  }

  CouplingSpectrum& s = r.spectrum;
  s.families = open.families;
  s.beam = open.beam;
  // Tolerance absorbs rounding of spacings taken at large absolute omega.
  if (widest <= want * (1.0 + 1e-6)) {
    s.omega = open.omega;
    s.density = open.density;
    s.background = open.background;
  } else {
    const double span = open.omega.back() - open.omega.front();
    const double count = std::ceil(span / want) + 1.0;
    if (count > static_cast<double>(options.max_points)) {
      throw UnderResolvedComb("comb needs " + std::to_string(static_cast<long long>(count)) +
                              " samples for " + std::to_string(options.points_per_linewidth) +
                              " per linewidth; cap is " + std::to_string(options.max_points));
    }
    r.refined = true;
    const std::size_t n = static_cast<std::size_t>(count);
    s.omega.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      s.omega[k] = open.omega.front() + span * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    s.density.assign(open.density.size(), std::vector<double>(n));
    s.background.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t f = 0; f < open.density.size(); ++f) {
        s.density[f][k] = interpolate(open.omega, open.density[f], s.omega[k]);
      }
      s.background[k] =
          open.background.empty() ? 0.0 : interpolate(open.omega, open.background, s.omega[k]);
    }
  }
  if (s.background.empty()) s.background.assign(s.omega.size(), 0.0);
  for (std::size_t k = 0; k < s.omega.size(); ++k) {
    const double chi = comb_susceptibility(s.omega[k], params);
    for (auto& d : s.density) d[k] *= chi;
  }
  return r;
}

double modes_in_band(double n_g, double n_eff) {
  const double d = std::abs(n_g - n_eff);
  if (d < 1e-9) throw DegenerateDispersion("n_g = n_eff: resonance count diverges");
  return 1.0 / d;
}

}  // namespace fewg
