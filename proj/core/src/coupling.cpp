#include "fewg/coupling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include <boost/math/tools/roots.hpp>

#include "detail/interpolators.hpp"
#include "fewg/constants.hpp"
#include "fewg/errors.hpp"
#include "fewg/window.hpp"

namespace fewg {

namespace {

using Makima = boost::math::interpolators::makima<std::vector<double>>;

bool cell_is_material(const ModeField& f, double x, double y) {
  const Grid2D& g = f.grid;
  const int i = static_cast<int>(std::floor((x - g.x0) / g.dx));
  const int j = static_cast<int>(std::floor((y - g.y0) / g.dy));
  if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) {
    throw DomainError("beam point lies outside the mode-solver window");
  }
  return std::abs((*f.eps)[g.index(i, j)] - 1.0f) > 1e-6f;
}

}  // namespace

std::vector<WeightedPoint> beam_support(const BeamParams& beam) {
  if (beam.transverse_density.empty()) {
    return {WeightedPoint{beam.lateral_offset, beam.gap, 1.0}};
  }
  std::vector<WeightedPoint> pts;
  pts.reserve(beam.transverse_density.size());
  for (const auto& p : beam.transverse_density) {
    pts.push_back({beam.lateral_offset + p.dx, beam.gap + p.dy, p.weight});
  }
  return pts;
}

double transverse_average(const std::function<double(double, double)>& field,
                          const std::vector<WeightedPoint>& density,
                          const std::function<bool(double, double)>& in_material) {
  double sum = 0.0;
  for (const auto& p : density) {
    if (p.weight == 0.0) continue;
    if (in_material && in_material(p.dx, p.dy)) {
      throw SupportViolation("transverse density overlaps material at (" +
                             std::to_string(p.dx) + ", " + std::to_string(p.dy) + ")");
    }
    sum += p.weight * field(p.dx, p.dy);
  }
  return sum;
}

double beam_uz_abs2(const ModeSolution& mode, const BeamParams& beam) {
  if (!mode.field) throw DomainError("mode has no stored field");
  const ModeField& f = *mode.field;
  return transverse_average(
      [&](double x, double y) { return mode.uz_abs2(x, y); }, beam_support(beam),
      [&](double x, double y) { return cell_is_material(f, x, y); });
}

double coupling_density_closed_form(double omega, double n_eff, double n_g,
                                    double uz_abs2, const BeamParams& beam) {
  const double c = constants::speed_of_light;
  const double v_g = c / n_g;
  const double delta = n_eff * omega / c - omega / beam.velocity();
  const double w2 = window_transform_abs2(beam.window, delta, beam.length);
  return constants::fine_structure_alpha * c * beam.length * beam.length * uz_abs2 * w2 /
         (omega * v_g);
}

double coupling_density(const ModeSolution& mode, const BeamParams& beam) {
  if (!std::isfinite(mode.n_g)) {
    throw InsufficientSamples("mode " + mode.family + " has no group index");
  }
  return coupling_density_closed_form(mode.omega, mode.n_eff, mode.n_g,
                                      beam_uz_abs2(mode, beam), beam);
}

double integrated_strength_closed_form(double omega_pm, double n_g, double uz_abs2,
                                       const BeamParams& beam) {
  const double ratio = 1.0 / (beam.beta * n_g);  // v_g / v
  return 2.0 * constants::pi * constants::fine_structure_alpha *
         constants::speed_of_light * beam.length * uz_abs2 /
         (omega_pm * std::abs(1.0 - ratio));
}

struct FamilyCouplingModel::Splines {
  std::unique_ptr<Makima> n_eff;
  std::unique_ptr<Makima> n_g;
  std::unique_ptr<Makima> uz;
  bool log_uz = false;
};

FamilyCouplingModel::FamilyCouplingModel(const FamilyDispersion& family,
                                         const BeamParams& beam)
    : family_(family.family), polarization_(family.polarization) {
  for (std::size_t k = 0; k < family.omega.size(); ++k) {
    if (!std::isfinite(family.n_g[k])) continue;
    omega_.push_back(family.omega[k]);
    n_eff_.push_back(family.n_eff[k]);
    n_g_.push_back(family.n_g[k]);
    uz2_.push_back(beam_uz_abs2(family.modes[k], beam));
  }
  if (omega_.size() < 3) {
    throw InsufficientSamples(family.family + " has fewer than 3 usable samples");
  }
  auto s = std::make_shared<Splines>();
  if (omega_.size() >= 4) {
    s->n_eff = std::make_unique<Makima>(std::vector<double>(omega_), std::vector<double>(n_eff_));
    s->n_g = std::make_unique<Makima>(std::vector<double>(omega_), std::vector<double>(n_g_));
    const double peak = *std::max_element(uz2_.begin(), uz2_.end());
    const double low = *std::min_element(uz2_.begin(), uz2_.end());
    s->log_uz = peak > 0.0 && low > 1e-12 * peak;
    std::vector<double> u(uz2_);
    if (s->log_uz) {
      for (double& v : u) v = std::log(v);
    }
    s->uz = std::make_unique<Makima>(std::vector<double>(omega_), std::move(u));
  }
  splines_ = std::move(s);
}

bool FamilyCouplingModel::covers(double omega) const {
  return omega >= omega_.front() && omega <= omega_.back();
}

namespace {

double linear(const std::vector<double>& x, const std::vector<double>& y, double at) {
  auto it = std::upper_bound(x.begin(), x.end(), at);
  std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - x.begin()), 1, x.size() - 1);
  const double t = (at - x[k - 1]) / (x[k] - x[k - 1]);
  return y[k - 1] + t * (y[k] - y[k - 1]);
}

}  // namespace

double FamilyCouplingModel::n_eff(double omega) const {
  return splines_->n_eff ? (*splines_->n_eff)(omega) : linear(omega_, n_eff_, omega);
}

double FamilyCouplingModel::n_g(double omega) const {
  return splines_->n_g ? (*splines_->n_g)(omega) : linear(omega_, n_g_, omega);
}

double FamilyCouplingModel::uz_abs2(double omega) const {
  if (!splines_->uz) return std::max(0.0, linear(omega_, uz2_, omega));
  const double v = (*splines_->uz)(omega);
  return splines_->log_uz ? std::exp(v) : std::max(0.0, v);
}

double FamilyCouplingModel::density(double omega, const BeamParams& beam) const {
  if (!covers(omega)) return 0.0;
  return coupling_density_closed_form(omega, n_eff(omega), n_g(omega), uz_abs2(omega), beam);
}

std::optional<double> FamilyCouplingModel::phase_matching_omega(double beta) const {
  const double target = 1.0 / beta;
  // n_eff rises with omega for guided modes; scan samples for a bracket.
  for (std::size_t k = 1; k < omega_.size(); ++k) {
    const double a = n_eff_[k - 1] - target;
    const double b = n_eff_[k] - target;
    if (a == 0.0) return omega_[k - 1];
    if ((a < 0.0) != (b < 0.0) || b == 0.0) {
      std::uintmax_t iters = 100;
      auto f = [&](double w) { return n_eff(w) - target; };
      auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-14 * x; };
      const double fa = f(omega_[k - 1]);
      const double fb = f(omega_[k]);
      if ((fa < 0.0) == (fb < 0.0)) return b == 0.0 ? omega_[k] : omega_[k - 1];
      const auto r = boost::math::tools::toms748_solve(f, omega_[k - 1], omega_[k], fa, fb, tol, iters);
      return 0.5 * (r.first + r.second);
    }
  }
  return std::nullopt;
}

std::vector<FamilyCouplingModel> coupling_models(const std::vector<FamilyDispersion>& families,
                                                 const BeamParams& beam) {
  std::vector<FamilyCouplingModel> out;
  for (const auto& f : families) {
    if (f.omega.size() < 3) continue;
    out.emplace_back(f, beam);
  }
  return out;
}

std::size_t CouplingSpectrum::family_index(const std::string& family) const {
  const auto it = std::find(families.begin(), families.end(), family);
  if (it == families.end()) throw DomainError("no family '" + family + "' in spectrum");
  return static_cast<std::size_t>(it - families.begin());
}

const std::vector<double>& CouplingSpectrum::family_density(const std::string& family) const {
  return density[family_index(family)];
}

double CouplingSpectrum::total(std::size_t k) const {
  double s = background.empty() ? 0.0 : background[k];
  for (const auto& d : density) s += d[k];
  return s;
}

std::vector<double> coupling_omega_grid(const std::vector<FamilyCouplingModel>& models,
                                        const BeamParams& beam, double lambda_min,
                                        double lambda_max, int points, int refine,
                                        double threshold) {
  const std::vector<double> base = omega_grid_for_band(lambda_min, lambda_max, points);
  const double step = base[1] - base[0];
  std::vector<int> factor(base.size() - 1, 1);
  const double c = constants::speed_of_light;

  for (const auto& m : models) {
    std::vector<double> d(base.size());
    double peak = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) {
      d[k] = m.density(base[k], beam);
      peak = std::max(peak, d[k]);
    }
    if (peak <= 0.0) continue;
    for (std::size_t k = 0; k + 1 < base.size(); ++k) {
      if (d[k] > threshold * peak || d[k + 1] > threshold * peak) {
        factor[k] = std::max(factor[k], refine);
      }
    }
    if (const auto w_pm = m.phase_matching_omega(beam.beta)) {
      // Zero-to-zero width of the main lobe in omega.
      const double slope = std::abs(m.n_g(*w_pm) - 1.0 / beam.beta) / c;
      const double lobe = 4.0 * constants::pi / (beam.length * std::max(slope, 1e-30 / c));
      const int need = static_cast<int>(std::ceil(16.0 * step / lobe));
      for (std::size_t k = 0; k + 1 < base.size(); ++k) {
        if (std::abs(0.5 * (base[k] + base[k + 1]) - *w_pm) < 40.0 * lobe + step) {
          factor[k] = std::max({factor[k], refine, std::min(need, 4096)});
        }
      }
    }
  }
  std::vector<double> out;
  out.reserve(base.size() * 2);
  for (std::size_t k = 0; k + 1 < base.size(); ++k) {
    for (int s = 0; s < factor[k]; ++s) {
      out.push_back(base[k] + (base[k + 1] - base[k]) * s / factor[k]);
    }
  }
  out.push_back(base.back());
  return out;
}

CouplingSpectrum coupling_spectrum(const std::vector<FamilyCouplingModel>& models,
                                   const BeamParams& beam,
                                   const std::vector<double>& omega,
                                   const std::function<double(double)>& background) {
  beam.validate();
  CouplingSpectrum s;
  s.omega = omega;
  s.beam = beam;
  for (const auto& m : models) {
    s.families.push_back(m.family());
    std::vector<double> d(omega.size());
    for (std::size_t k = 0; k < omega.size(); ++k) d[k] = m.density(omega[k], beam);
    s.density.push_back(std::move(d));
  }
  s.background.assign(omega.size(), 0.0);
  if (background) {
    for (std::size_t k = 0; k < omega.size(); ++k) s.background[k] = background(omega[k]);
  }
  return s;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y,
                 std::size_t first, std::size_t last) {
  if (x.size() != y.size()) throw DomainError("trapezoid: size mismatch");
  if (x.empty()) return 0.0;
  last = std::min(last, x.size() - 1);
  double s = 0.0;
  for (std::size_t k = first; k < last; ++k) s += 0.5 * (y[k] + y[k + 1]) * (x[k + 1] - x[k]);
  return s;
}

std::pair<std::size_t, std::size_t> band_window(const std::vector<double>& density,
                                                double threshold) {
  const auto peak_it = std::max_element(density.begin(), density.end());
  if (peak_it == density.end() || *peak_it <= 0.0) return {0, 0};
  const double cut = threshold * *peak_it;
  std::size_t first = 0;
  while (density[first] < cut) ++first;
  std::size_t last = density.size() - 1;
  while (density[last] < cut) --last;
  return {first, last};
}

double integrated_strength(const CouplingSpectrum& spectrum, const std::string& family,
                           double threshold) {
  const auto& d = spectrum.family_density(family);
  const auto peak_it = std::max_element(d.begin(), d.end());
  if (peak_it == d.end() || *peak_it <= 0.0) return 0.0;
  const double peak = *peak_it;
  if (d.front() > 1e-3 * peak || d.back() > 1e-3 * peak) {
    throw BandTruncated(family + " band reaches the edge of the frequency grid");
  }
  const auto [first, last] = band_window(d, threshold);
  return trapezoid(spectrum.omega, d, first, last);
}

CouplingMap coupling_map(const std::vector<FamilyCouplingModel>& models,
                         const BeamParams& beam_template,
                         const std::vector<double>& beta_grid,
                         const std::vector<double>& omega_grid,
                         const BackgroundFunction& background, int jobs) {
  if (beta_grid.empty() || omega_grid.empty()) throw ConfigError("map grids must be non-empty");
  if (!std::is_sorted(beta_grid.begin(), beta_grid.end()) ||
      !std::is_sorted(omega_grid.begin(), omega_grid.end())) {
    throw ConfigError("map grids must be ascending");
  }
  CouplingMap map;
  map.beta = beta_grid;
  map.omega = omega_grid;
  const std::size_t cells = beta_grid.size() * omega_grid.size();
  for (const auto& m : models) map.families.push_back(m.family());
  map.per_family.assign(models.size(), std::vector<double>(cells, 0.0));
  map.background.assign(cells, 0.0);
  map.total.assign(cells, 0.0);
  map.failed.assign(cells, 0);
  std::vector<std::string> row_failures(beta_grid.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t ib = next++; ib < beta_grid.size(); ib = next++) {
      BeamParams beam = beam_template;
      beam.beta = beta_grid[ib];
      for (std::size_t iw = 0; iw < omega_grid.size(); ++iw) {
        const std::size_t c = map.at(ib, iw);
        try {
          double t = 0.0;
          for (std::size_t f = 0; f < models.size(); ++f) {
            const double d = models[f].density(omega_grid[iw], beam);
            map.per_family[f][c] = d;
            t += d;
          }
          if (background) {
            map.background[c] = background(beam.beta, omega_grid[iw]);
            t += map.background[c];
          }
          map.total[c] = t;
        } catch (const Error& e) {
          map.failed[c] = 1;
          if (row_failures[ib].empty()) {
            row_failures[ib] = "beta=" + std::to_string(beam.beta) + " omega=" +
                               std::to_string(omega_grid[iw]) + ": " + e.what();
          }
        }
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(beta_grid.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& r : row_failures) {
    if (!r.empty()) map.failures.push_back(r);
  }
  return map;
}

}  // namespace fewg
