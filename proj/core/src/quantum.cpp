#include "fewg/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fewg/errors.hpp"

namespace fewg {

namespace {

double poisson(int n, double mean) {
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
}

}  // namespace

double SidebandDistribution::mean_quanta(const std::string& family) const {
  for (const auto& [name, g] : families) {
    if (name == family) return g;
  }
  throw DomainError("no family '" + family + "' in distribution");
}

int default_n_max(double G) {
  return static_cast<int>(std::ceil(G + 10.0 * std::sqrt(G) + 10.0));
}

SidebandDistribution sideband_probabilities(
    const std::vector<std::pair<std::string, double>>& G_list, int n_max) {
  SidebandDistribution d;
  d.families = G_list;
  for (const auto& [name, g] : G_list) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("G for " + name + " must be >= 0");
    d.G += g;
  }
  d.n_max = n_max < 0 ? default_n_max(d.G) : n_max;
  d.P.resize(d.n_max + 1);
  for (int n = 0; n <= d.n_max; ++n) d.P[n] = poisson(n, d.G);
  return d;
}

double joint_probability(const SidebandDistribution& dist, const std::vector<int>& counts) {
  if (counts.size() != dist.families.size()) throw DomainError("one count per family required");
  double p = 1.0;
  for (std::size_t m = 0; m < counts.size(); ++m) {
    if (counts[m] < 0) return 0.0;
    p *= poisson(counts[m], dist.families[m].second);
  }
  return p;
}

std::vector<std::pair<double, double>> loss_energy_distribution(
    const SidebandDistribution& dist, const std::vector<double>& photon_energy_eV) {
  if (photon_energy_eV.size() != dist.families.size()) {
    throw DomainError("one photon energy per family required");
  }
  // Convolve family by family; energies are keyed on a 1e-9 eV lattice so
  // coincident patterns merge.
  std::map<long long, double> acc{{0, 1.0}};
  for (std::size_t m = 0; m < photon_energy_eV.size(); ++m) {
    const double g = dist.families[m].second;
    if (g == 0.0) continue;
    const int n_m = default_n_max(g);
    std::map<long long, double> next;
    for (const auto& [key, p] : acc) {
      for (int n = 0; n <= n_m; ++n) {
        const double q = p * poisson(n, g);
        if (q < 1e-18) continue;
        next[key + std::llround(n * photon_energy_eV[m] * 1e9)] += q;
      }
    }
    acc.swap(next);
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(acc.size());
  for (const auto& [key, p] : acc) out.emplace_back(key * 1e-9, p);
  return out;
}

SynthEels synth_eels_spectrum(const SidebandDistribution& dist,
                              const std::vector<double>& photon_energy_eV,
                              double zlp_fwhm_eV, int points) {
  if (!(zlp_fwhm_eV > 0.0)) throw DomainError("ZLP FWHM must be > 0");
  for (double e : photon_energy_eV) {
    if (e < 0.49 || e > 1.6) throw DomainError("photon energies must lie in 0.49-1.6 eV");
  }
  const auto losses = loss_energy_distribution(dist, photon_energy_eV);
  double max_loss = 0.0;
  for (const auto& [e, p] : losses) max_loss = std::max(max_loss, e);
  const double pad = 4.0 * zlp_fwhm_eV;
  SynthEels s;
  s.zlp_fwhm_eV = zlp_fwhm_eV;
  const int n = std::max(points, 2);
  s.energy_eV.resize(n);
  s.intensity.assign(n, 0.0);
  const double lo = -max_loss - pad;
  const double hi = pad;
  for (int i = 0; i < n; ++i) s.energy_eV[i] = lo + (hi - lo) * i / (n - 1);
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    for (const auto& [e, p] : losses) v += p * zlp_profile(s.energy_eV[i] + e, zlp_fwhm_eV);
    s.intensity[i] = v;
  }
  double total = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    total += 0.5 * (s.intensity[i] + s.intensity[i + 1]) * (s.energy_eV[i + 1] - s.energy_eV[i]);
  }
  for (double& v : s.intensity) v /= total;
  return s;
}

HeraldMetrics herald_metrics(double G, double I, double I_star) {
  if (!(G >= 0.0)) throw DomainError("G must be >= 0");
  return {poisson(1, G), I, I_star};
}

HeraldMetrics herald_metrics(const CouplingSpectrum& spectrum, const IdealityOptions& options) {
  const IdealityReport r = ideality_report(spectrum, options);
  return herald_metrics(r.total_strength, r.I, r.I_star);
}

}  // namespace fewg
