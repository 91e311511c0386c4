#include "fewg/ideality.hpp"

#include <algorithm>
#include <cmath>

#include "fewg/constants.hpp"
#include "fewg/errors.hpp"

namespace fewg {

namespace {

double sigma_of(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

std::vector<double> to_energy(const std::vector<double>& omega) {
  std::vector<double> e(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) e[k] = eV_from_omega(omega[k]);
  return e;
}

std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double h = 0.5 * (x[k + 1] - x[k]);
    w[k] += h;
    w[k + 1] += h;
  }
  return w;
}

// Location of the maximum of the convolved density on a fine energy grid.
double convolved_peak(const std::vector<double>& e, const std::vector<double>& d,
                      double fwhm) {
  const double lo = e.front() - fwhm;
  const double hi = e.back() + fwhm;
  const int n = std::max(64, static_cast<int>(std::ceil((hi - lo) / (fwhm / 400.0))));
  std::vector<double> grid(n + 1);
  for (int i = 0; i <= n; ++i) grid[i] = lo + (hi - lo) * i / n;
  const auto c = zlp_convolve(e, d, fwhm, grid);
  return grid[std::max_element(c.begin(), c.end()) - c.begin()];
}

void check_target_edges(const std::vector<double>& d, const std::string& target) {
  const double peak = *std::max_element(d.begin(), d.end());
  if (peak <= 0.0) throw DomainError("target family " + target + " has no coupling");
  if (d.front() > 1e-3 * peak || d.back() > 1e-3 * peak) {
    throw BandTruncated(target + " band reaches the edge of the frequency grid");
  }
}

}  // namespace

double IdealityReport::strength(const std::string& family) const {
  for (const auto& [name, s] : family_strengths) {
    if (name == family) return s;
  }
  throw DomainError("no family '" + family + "' in report");
}

double zlp_profile(double energy_eV, double fwhm_eV) {
  const double s = sigma_of(fwhm_eV);
  return std::exp(-0.5 * energy_eV * energy_eV / (s * s)) / (s * std::sqrt(2.0 * constants::pi));
}

std::vector<double> zlp_convolve(const std::vector<double>& energy_eV,
                                 const std::vector<double>& density, double fwhm_eV,
                                 const std::vector<double>& out_eV) {
  if (energy_eV.size() != density.size()) throw DomainError("zlp_convolve: size mismatch");
  if (!(fwhm_eV > 0.0)) throw DomainError("ZLP FWHM must be > 0");
  const auto w = trapezoid_weights(energy_eV);
  const double reach = 8.0 * sigma_of(fwhm_eV);
  std::vector<double> out(out_eV.size(), 0.0);
  for (std::size_t i = 0; i < out_eV.size(); ++i) {
    const auto a = std::lower_bound(energy_eV.begin(), energy_eV.end(), out_eV[i] - reach);
    const auto b = std::upper_bound(energy_eV.begin(), energy_eV.end(), out_eV[i] + reach);
    double s = 0.0;
    for (auto it = a; it != b; ++it) {
      const std::size_t k = static_cast<std::size_t>(it - energy_eV.begin());
      s += w[k] * density[k] * zlp_profile(out_eV[i] - energy_eV[k], fwhm_eV);
    }
    out[i] = s;
  }
  return out;
}

double ideality_full(const CouplingSpectrum& spectrum, const std::string& target) {
  const auto& d = spectrum.family_density(target);
  check_target_edges(d, target);
  double total = trapezoid(spectrum.omega, spectrum.background);
  for (const auto& f : spectrum.density) total += trapezoid(spectrum.omega, f);
  return trapezoid(spectrum.omega, d) / total;
}

double ideality_filtered(const CouplingSpectrum& spectrum, const IdealityOptions& options,
                         std::vector<std::string>* overlap_warnings,
                         double* filtered_peak_eV) {
  const auto& d = spectrum.family_density(options.target);
  check_target_edges(d, options.target);
  if (!(options.window_fwhm > 0.0)) throw DomainError("filter window must be > 0");
  const std::vector<double> e = to_energy(spectrum.omega);
  const double fwhm = options.zlp_fwhm_eV;
  const double peak = convolved_peak(e, d, fwhm);
  const double half = options.window_fwhm * fwhm;
  const double a = peak - half;
  const double b = peak + half;
  if (filtered_peak_eV) *filtered_peak_eV = peak;

  // Window mass of the ZLP centred on each node, integrated analytically.
  const double s = sigma_of(fwhm) * std::sqrt(2.0);
  const auto w = trapezoid_weights(e);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double p = 0.5 * (std::erf((b - e[k]) / s) - std::erf((a - e[k]) / s));
    num += w[k] * d[k] * p;
    den += w[k] * spectrum.total(k) * p;
  }

  if (overlap_warnings) {
    overlap_warnings->clear();
    const double target_strength = trapezoid(spectrum.omega, d);
    for (std::size_t f = 0; f < spectrum.families.size(); ++f) {
      if (spectrum.families[f] == options.target) continue;
      const double sf = trapezoid(spectrum.omega, spectrum.density[f]);
      if (!(sf > options.overlap_min_fraction * target_strength)) continue;
      const double pf = convolved_peak(e, spectrum.density[f], fwhm);
      if (pf >= a && pf <= b) overlap_warnings->push_back(spectrum.families[f]);
    }
  }
  return num / den;
}

IdealityReport ideality_report(const CouplingSpectrum& spectrum, const IdealityOptions& options) {
  IdealityReport r;
  r.target = options.target;
  r.zlp_fwhm_eV = options.zlp_fwhm_eV;
  r.window_half_width_eV = options.window_fwhm * options.zlp_fwhm_eV;
  r.beam = spectrum.beam;
  r.I = ideality_full(spectrum, options.target);
  r.I_star = ideality_filtered(spectrum, options, &r.overlap_warnings, &r.filtered_peak_eV);
  r.background_strength = trapezoid(spectrum.omega, spectrum.background);
  r.total_strength = r.background_strength;
  for (std::size_t f = 0; f < spectrum.families.size(); ++f) {
    const auto& d = spectrum.density[f];
    const double sf = trapezoid(spectrum.omega, d);
    r.family_strengths.emplace_back(spectrum.families[f], sf);
    r.total_strength += sf;
    const double peak = *std::max_element(d.begin(), d.end());
    if (spectrum.families[f] != options.target && peak > 0.0 &&
        (d.front() > 1e-3 * peak || d.back() > 1e-3 * peak)) {
      r.truncated_families.push_back(spectrum.families[f]);
    }
  }
  return r;
}

CouplingSpectrum spectrum_for_beam(const std::vector<FamilyDispersion>& families,
                                   const BeamParams& beam, const SpectrumRecipe& recipe) {
  const auto models = coupling_models(families, beam);
  const auto omega = coupling_omega_grid(models, beam, recipe.lambda_min, recipe.lambda_max,
                                         recipe.points, recipe.refine);
  std::function<double(double)> bg;
  if (recipe.background) bg = [&](double w) { return recipe.background(beam, w); };
  return coupling_spectrum(models, beam, omega, bg);
}

TradeoffCurve gap_tradeoff(const std::vector<FamilyDispersion>& families,
                           const BeamParams& beam_template, const std::vector<double>& gaps,
                           const SpectrumRecipe& recipe, const IdealityOptions& options) {
  if (gaps.empty()) throw ConfigError("gaps must be non-empty");
  TradeoffCurve curve;
  for (double gap : gaps) {
    if (gap < 50e-9 - 1e-15 || gap > 1e-6 + 1e-15) {
      throw ConfigError("gaps must lie in [50 nm, 1 um]");
    }
    BeamParams beam = beam_template;
    beam.gap = gap;
    const auto spectrum = spectrum_for_beam(families, beam, recipe);
    TradeoffPoint p;
    p.gap = gap;
    p.report = ideality_report(spectrum, options);
    p.target_strength = p.report.strength(options.target);
    if (!curve.points.empty()) {
      const auto& prev = curve.points.back();
      const bool wider = gap > prev.gap;
      if (wider ? p.target_strength >= prev.target_strength
                : p.target_strength <= prev.target_strength) {
        curve.strength_decreasing = false;
      }
      if (wider ? p.report.I < prev.report.I : p.report.I > prev.report.I) {
        curve.ideality_increasing = false;
      }
    }
    curve.points.push_back(std::move(p));
  }
  return curve;
}

double gap_for_strength(const std::vector<FamilyDispersion>& families,
                        const BeamParams& beam_template, double strength,
                        const SpectrumRecipe& recipe, const std::string& target,
                        double gap_lo, double gap_hi, double rel_tol) {
  if (!(strength > 0.0)) throw DomainError("target strength must be > 0");
  auto excess = [&](double gap) {
    BeamParams beam = beam_template;
    beam.gap = gap;
    const auto s = spectrum_for_beam(families, beam, recipe);
    return std::log(trapezoid(s.omega, s.family_density(target)) / strength);
  };
  if (excess(gap_lo) < 0.0 || excess(gap_hi) > 0.0) {
    throw DomainError("target strength not reachable inside the gap interval");
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (gap_lo + gap_hi);
    const double f = excess(mid);
    if (std::abs(f) < rel_tol) return mid;
    (f > 0.0 ? gap_lo : gap_hi) = mid;
  }
  return 0.5 * (gap_lo + gap_hi);
}

}  // namespace fewg
