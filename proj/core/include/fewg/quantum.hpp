#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fewg/ideality.hpp"

namespace fewg {

/// Loss-count statistics after the vacuum interaction. Each family m is an
/// independent Poisson process of mean G_m, so the total count is Poisson in
/// G = sum G_m and each n splits multinomially with weights G_m / G.
struct SidebandDistribution {
  std::vector<std::pair<std::string, double>> families;
  double G = 0.0;
  int n_max = 0;
  /// P[n] for n = 0..n_max.
  std::vector<double> P;

  double mean_quanta(const std::string& family) const;
};

/// Smallest n_max satisfying n_max >= G + 10 sqrt(G) + 10.
int default_n_max(double G);

/// n_max < 0 selects default_n_max(G).
SidebandDistribution sideband_probabilities(
    const std::vector<std::pair<std::string, double>>& G_list, int n_max = -1);

/// Joint probability of counts[m] quanta in family m.
double joint_probability(const SidebandDistribution& dist, const std::vector<int>& counts);

/// Sparse distribution of total energy loss (eV) over all count patterns.
std::vector<std::pair<double, double>> loss_energy_distribution(
    const SidebandDistribution& dist, const std::vector<double>& photon_energy_eV);

struct SynthEels {
  /// Energy change of the electron, eV (losses negative).
  std::vector<double> energy_eV;
  std::vector<double> intensity;
  double zlp_fwhm_eV = 0.0;
};

/// Gaussian comb at -sum n_m E_m weighted by the joint distribution. A
/// grid with points < 2 is chosen automatically to cover all losses.
SynthEels synth_eels_spectrum(const SidebandDistribution& dist,
                              const std::vector<double>& photon_energy_eV,
                              double zlp_fwhm_eV, int points = 4001);

struct HeraldMetrics {
  double P_herald_1 = 0.0;
  double purity_full = 0.0;
  double purity_filtered = 0.0;
};

HeraldMetrics herald_metrics(double G, double I, double I_star);
HeraldMetrics herald_metrics(const CouplingSpectrum& spectrum, const IdealityOptions& options);

}  // namespace fewg
