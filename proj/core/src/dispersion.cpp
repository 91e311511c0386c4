#include "fewg/dispersion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "detail/interpolators.hpp"
#include "fewg/constants.hpp"
#include "fewg/errors.hpp"

namespace fewg {

namespace {

// Derivative at `x` of the quadratic through three points.
double quadratic_slope(const double* x, const double* y, double at) {
  const double d0 = (x[0] - x[1]) * (x[0] - x[2]);
  const double d1 = (x[1] - x[0]) * (x[1] - x[2]);
  const double d2 = (x[2] - x[0]) * (x[2] - x[1]);
  return y[0] * ((at - x[1]) + (at - x[2])) / d0 +
         y[1] * ((at - x[0]) + (at - x[2])) / d1 +
         y[2] * ((at - x[0]) + (at - x[1])) / d2;
}

double quadratic_value(const double* x, const double* y, double at) {
  const double l0 = (at - x[1]) * (at - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
  const double l1 = (at - x[0]) * (at - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
  const double l2 = (at - x[0]) * (at - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
  return y[0] * l0 + y[1] * l1 + y[2] * l2;
}

std::size_t stencil_start(const std::vector<double>& x, double at) {
  const auto it = std::lower_bound(x.begin(), x.end(), at);
  std::size_t k = static_cast<std::size_t>(std::distance(x.begin(), it));
  // Center the three-point stencil on the nearest sample.
  if (k == x.size() || (k > 0 && at - x[k - 1] < x[k] - at)) --k;
  if (k == 0) return 0;
  if (k + 1 >= x.size()) return x.size() - 3;
  return k - 1;
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y,
                   double at) {
  if (x.size() == 1) return y.front();
  if (x.size() < 4) {
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    std::size_t k = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::distance(x.begin(), it)), 1, x.size() - 1);
    const double t = (at - x[k - 1]) / (x[k] - x[k - 1]);
    return y[k - 1] + t * (y[k] - y[k - 1]);
  }
  auto xc = x;
  auto yc = y;
  boost::math::interpolators::makima<std::vector<double>> spline(std::move(xc), std::move(yc));
  return spline(at);
}

}  // namespace

bool FamilyDispersion::covers(double w) const {
  return !omega.empty() && w >= omega.front() && w <= omega.back();
}

double FamilyDispersion::n_eff_at(double w) const {
  if (!covers(w)) throw DomainError(family + " has no solution at the requested omega");
  return interpolate(omega, n_eff, w);
}

double FamilyDispersion::n_g_at(double w) const {
  if (!covers(w)) throw DomainError(family + " has no solution at the requested omega");
  return interpolate(omega, n_g, w);
}

double group_index(const std::vector<double>& omega,
                   const std::vector<double>& n_eff, double at) {
  if (omega.size() < 3 || omega.size() != n_eff.size()) {
    throw InsufficientSamples("group index needs >= 3 frequency samples");
  }
  const std::size_t s = stencil_start(omega, at);
  const double n = quadratic_value(&omega[s], &n_eff[s], at);
  return n + at * quadratic_slope(&omega[s], &n_eff[s], at);
}

double group_index(const FamilyDispersion& family, double omega) {
  return group_index(family.omega, family.n_eff, omega);
}

std::vector<FamilyDispersion> track_families(const std::vector<OmegaSample>& samples,
                                             TrackingReport* report,
                                             double min_overlap) {
  std::vector<std::size_t> order(samples.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].omega < samples[b].omega;
  });

  std::vector<FamilyDispersion> families;
  std::vector<bool> active;
  auto note = [&](const std::string& msg) {
    if (report) report->issues.push_back(msg);
  };
  std::vector<double> failed_omegas;

  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const OmegaSample& s = samples[order[oi]];
    if (s.failed) {
      failed_omegas.push_back(s.omega);
      note("sample at omega=" + std::to_string(s.omega) + " failed: " + s.error);
      continue;
    }
    // Candidate pairs (overlap, |dn|, mode, family).
    struct Pair {
      double overlap;
      double dn;
      std::size_t mode;
      std::size_t fam;
    };
    std::vector<Pair> pairs;
    for (std::size_t m = 0; m < s.modes.size(); ++m) {
      for (std::size_t f = 0; f < families.size(); ++f) {
        if (!active[f] || families[f].polarization != s.modes[m].polarization) continue;
        const double ov = mode_overlap(s.modes[m], families[f].modes.back());
        pairs.push_back({ov, std::abs(s.modes[m].n_eff - families[f].n_eff.back()), m, f});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      if (std::abs(a.overlap - b.overlap) > 1e-9) return a.overlap > b.overlap;
      return a.dn < b.dn;
    });
    std::vector<bool> mode_taken(s.modes.size(), false);
    std::vector<bool> fam_taken(families.size(), false);
    for (const Pair& p : pairs) {
      if (p.overlap < min_overlap) break;
      if (mode_taken[p.mode] || fam_taken[p.fam]) continue;
      mode_taken[p.mode] = true;
      fam_taken[p.fam] = true;
      FamilyDispersion& f = families[p.fam];
      for (double g : failed_omegas) {
        if (g > f.omega.back() && g < s.omega) f.gaps.push_back(g);
      }
      f.omega.push_back(s.omega);
      f.n_eff.push_back(s.modes[p.mode].n_eff);
      f.modes.push_back(s.modes[p.mode]);
    }
    for (std::size_t f = 0; f < families.size(); ++f) {
      if (active[f] && !fam_taken[f]) active[f] = false;  // left the solved set
    }
    for (std::size_t m = 0; m < s.modes.size(); ++m) {
      if (mode_taken[m]) continue;
      double best = 0.0;
      for (const Pair& p : pairs) {
        if (p.mode == m) best = std::max(best, p.overlap);
      }
      if (best >= 0.2) {
        note("AmbiguousTracking: " + s.modes[m].family + " at omega=" +
             std::to_string(s.omega) + " best overlap " + std::to_string(best) +
             " < " + std::to_string(min_overlap) + "; started a new family");
      }
      FamilyDispersion f;
      f.family = s.modes[m].family;
      f.polarization = s.modes[m].polarization;
      f.omega.push_back(s.omega);
      f.n_eff.push_back(s.modes[m].n_eff);
      f.modes.push_back(s.modes[m]);
      families.push_back(std::move(f));
      active.push_back(true);
    }
  }

  // Unique labels: later duplicates get a suffix.
  std::vector<std::string> base(families.size());
  for (std::size_t a = 0; a < families.size(); ++a) {
    base[a] = families[a].family;
    const auto dup = std::count(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(a), base[a]);
    if (dup > 0) families[a].family += "_" + std::to_string(dup + 1);
  }

  for (auto& f : families) {
    f.n_g.assign(f.omega.size(), std::numeric_limits<double>::quiet_NaN());
    if (f.omega.size() >= 3) {
      for (std::size_t k = 0; k < f.omega.size(); ++k) {
        f.n_g[k] = group_index(f.omega, f.n_eff, f.omega[k]);
      }
    } else {
      note("InsufficientSamples: " + f.family + " has " +
           std::to_string(f.omega.size()) + " samples; group index undefined");
    }
    for (std::size_t k = 0; k < f.modes.size(); ++k) {
      f.modes[k].family = f.family;
      f.modes[k].n_g = f.n_g[k];
    }
    for (double g : f.gaps) {
      note("gap in " + f.family + " at omega=" + std::to_string(g) + " interpolated");
    }
  }
  std::stable_sort(families.begin(), families.end(),
                   [](const FamilyDispersion& a, const FamilyDispersion& b) {
                     return a.n_eff.front() > b.n_eff.front();
                   });
  return families;
}

std::vector<OmegaSample> sweep_modes(const std::vector<double>& omegas,
                                     const OmegaSolver& solver, int jobs) {
  std::vector<OmegaSample> out(omegas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < omegas.size(); k = next++) {
      out[k].omega = omegas[k];
      try {
        out[k].modes = solver(omegas[k]);
      } catch (const NoGuidedMode&) {
        out[k].modes.clear();  // legitimately empty below cutoff
      } catch (const Error& e) {
        out[k].failed = true;
        out[k].error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(omegas.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

std::vector<OmegaSample> sweep_modes(const WaveguideGeometry& geometry,
                                     const MaterialLibrary& materials,
                                     const std::vector<double>& omegas,
                                     const GridSpec& grid,
                                     const SolveOptions& options, int jobs) {
  return sweep_modes(
      omegas,
      [&](double w) { return solve_modes(geometry, materials, w, grid, options); },
      jobs);
}

std::vector<double> omega_grid_for_band(double lambda_min, double lambda_max,
                                        int points) {
  if (points < 2 || !(lambda_min > 0.0) || !(lambda_max > lambda_min)) {
    throw ConfigError("frequency grid needs >= 2 points and 0 < lambda_min < lambda_max");
  }
  const double w_lo = omega_from_wavelength(lambda_max);
  const double w_hi = omega_from_wavelength(lambda_min);
  std::vector<double> w(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    w[static_cast<std::size_t>(k)] = w_lo + (w_hi - w_lo) * k / (points - 1);
  }
  w.back() = w_hi;
  return w;
}

}  // namespace fewg
