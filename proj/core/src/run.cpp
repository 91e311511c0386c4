#include "fewg/run.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <set>

#include "fewg/background.hpp"
#include "fewg/constants.hpp"
#include "fewg/coupling.hpp"
#include "fewg/errors.hpp"
#include "fewg/ideality.hpp"
#include "fewg/quantum.hpp"
#include "fewg/resonator.hpp"
#include "fewg/waveform.hpp"

namespace fewg {

namespace {

using nlohmann::json;
using Row = std::vector<std::string>;

std::string num(double v) { return format_number(v); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

std::string material_version(const Material& m) {
  std::string s = m.id() + "|" + num(m.band_min()) + "|" + num(m.band_max()) + "|" + m.source();
  for (const auto& t : m.terms()) s += "|" + num(t.B) + ":" + num(t.C_um2);
  return sha256_hex(s).substr(0, 16);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json results_config(const RunConfig& config) {
  json j = config_to_json(config);
  j.erase("output");
  j.erase("cache");
  j.erase("jobs");
  return j;
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

// Collects outputs and failures of one run.
class Outputs {
 public:
  Outputs(const RunConfig& config, const MaterialLibrary& materials)
      : dir_(config.output_dir), meta_(run_metadata(config, materials)),
        config_(config_to_json(config)) {
    std::filesystem::create_directories(dir_);
  }

  void csv(const std::string& name, const Metadata& extra, const std::vector<std::string>& columns,
           const std::vector<Row>& rows) {
    Metadata m = meta_;
    m.insert(m.end(), extra.begin(), extra.end());
    write_csv(dir_ / name, m, columns, rows);
    files_.push_back(dir_ / name);
  }

  void json_file(const std::string& name, json body) {
    json meta = json::object();
    for (const auto& [k, v] : meta_) {
      if (k != "config") meta[k] = v;
    }
    body["metadata"] = meta;
    body["config"] = config_;
    write_json(dir_ / name, body);
    files_.push_back(dir_ / name);
  }

  void fail(const std::string& item, const std::string& error) {
    failures_.push_back(item + ": " + error);
  }
  void fail_all(const std::vector<std::string>& items) {
    failures_.insert(failures_.end(), items.begin(), items.end());
  }

  const std::vector<std::string>& failures() const { return failures_; }
  std::vector<std::filesystem::path>& files() { return files_; }

 private:
  std::filesystem::path dir_;
  Metadata meta_;
  json config_;
  std::vector<std::filesystem::path> files_;
  std::vector<std::string> failures_;
};

SpectrumRecipe recipe_for(const RunConfig& config, const MaterialLibrary& materials) {
  SpectrumRecipe r;
  r.lambda_min = config.band.lambda_min;
  r.lambda_max = config.band.lambda_max;
  r.points = config.band.points;
  r.refine = config.band.refine;
  r.background = background_function(config, materials);
  return r;
}

IdealityOptions ideality_options(const RunConfig& config) {
  IdealityOptions o;
  o.target = config.ideality.target;
  o.zlp_fwhm_eV = config.ideality.zlp_fwhm_eV;
  o.window_fwhm = config.ideality.window_fwhm;
  return o;
}

json report_json(const IdealityReport& r) {
  json strengths = json::object();
  for (const auto& [name, s] : r.family_strengths) strengths[name] = s;
  return {{"target", r.target},
          {"beta", r.beam.beta},
          {"gap_m", r.beam.gap},
          {"length_m", r.beam.length},
          {"I", r.I},
          {"I_star", r.I_star},
          {"zlp_fwhm_eV", r.zlp_fwhm_eV},
          {"window_half_width_eV", r.window_half_width_eV},
          {"filtered_peak_eV", r.filtered_peak_eV},
          {"family_strengths", strengths},
          {"background_strength", r.background_strength},
          {"total_strength", r.total_strength},
          {"overlap_warnings", r.overlap_warnings},
          {"truncated_families", r.truncated_families}};
}

// Wide spectrum table: one density column per family, in s and per eV.
void write_spectrum_csv(Outputs& out, const std::string& name, const CouplingSpectrum& s,
                        Metadata extra) {
  std::vector<std::string> cols = {"omega_rad_s", "energy_eV", "total_s", "background_s"};
  for (const auto& f : s.families) cols.push_back("g2_" + f + "_s");
  cols.push_back("total_per_eV");
  std::vector<Row> rows;
  rows.reserve(s.omega.size());
  for (std::size_t k = 0; k < s.omega.size(); ++k) {
    Row r = {num(s.omega[k]), num(eV_from_omega(s.omega[k])), num(s.total(k)),
             num(s.background[k])};
    for (const auto& d : s.density) r.push_back(num(d[k]));
    r.push_back(num(s.total(k) / constants::hbar_eV_s));
    rows.push_back(std::move(r));
  }
  extra.emplace_back("beta", num(s.beam.beta));
  extra.emplace_back("gap_m", num(s.beam.gap));
  extra.emplace_back("length_m", num(s.beam.length));
  out.csv(name, extra, cols, rows);
}

const FamilyCouplingModel& find_model(const std::vector<FamilyCouplingModel>& models,
                                      const std::string& family) {
  for (const auto& m : models) {
    if (m.family() == family) return m;
  }
  throw DomainError("family " + family + " was not found in the solved band");
}

void task_modes(const RunConfig& config, const SolvedFamilies& solved, Outputs& out) {
  std::vector<Row> rows;
  for (const auto& f : solved.families) {
    for (std::size_t k = 0; k < f.omega.size(); ++k) {
      const auto& m = f.modes[k];
      rows.push_back({f.family, to_string(f.polarization), num(f.omega[k]),
                      num(eV_from_omega(f.omega[k])), num(wavelength_from_omega(f.omega[k]) * 1e9),
                      num(f.n_eff[k]), num(f.n_g[k]), num(beam_uz_abs2(m, config.beam)),
                      num(m.tail_ratio), num(m.polarization_fraction)});
    }
  }
  out.csv("modes.csv", {{"uz_abs2_units", "m^-2, averaged over the beam support"}},
          {"family", "polarization", "omega_rad_s", "energy_eV", "wavelength_nm", "n_eff", "n_g",
           "uz_abs2_beam", "tail_ratio", "polarization_fraction"},
          rows);
  json fam = json::array();
  for (const auto& f : solved.families) {
    fam.push_back({{"family", f.family},
                   {"polarization", to_string(f.polarization)},
                   {"omega_min", f.omega.front()},
                   {"omega_max", f.omega.back()},
                   {"samples", f.omega.size()},
                   {"gaps", f.gaps}});
  }
  out.json_file("modes.json", {{"families", fam}, {"tracking_issues", solved.issues}});
}

void task_map(const RunConfig& config, const MaterialLibrary& materials,
              const std::vector<FamilyCouplingModel>& models, Outputs& out) {
  const auto betas = linspace(config.map.beta_min, config.map.beta_max, config.map.beta_steps);
  const auto omegas = omega_grid_for_band(config.band.lambda_min, config.band.lambda_max,
                                          config.map.omega_points);
  BackgroundFunction bg;
  if (config.background != BackgroundModel::None) {
    const auto f = background_function(config, materials);
    bg = [&, f](double beta, double omega) {
      BeamParams b = config.beam;
      b.beta = beta;
      return f(b, omega);
    };
  }
  const auto map = coupling_map(models, config.beam, betas, omegas, bg, config.jobs);
  std::vector<Row> rows;
  rows.reserve(map.total.size() * (map.families.size() + 2));
  for (std::size_t ib = 0; ib < map.beta.size(); ++ib) {
    for (std::size_t iw = 0; iw < map.omega.size(); ++iw) {
      const std::size_t c = map.at(ib, iw);
      if (map.failed[c]) continue;
      const std::string b = num(map.beta[ib]);
      const std::string w = num(map.omega[iw]);
      const std::string e = num(eV_from_omega(map.omega[iw]));
      auto add = [&](const std::string& fam, double d) {
        rows.push_back({b, w, e, fam, num(d), num(d / constants::hbar_eV_s)});
      };
      for (std::size_t f = 0; f < map.families.size(); ++f) add(map.families[f], map.per_family[f][c]);
      add("background", map.background[c]);
      add("total", map.total[c]);
    }
  }
  out.csv("map.csv",
          {{"layout", "long"},
           {"density_units", "density_s per rad/s; density_per_eV = density_s / hbar"},
           {"hbar_eV_s", num(constants::hbar_eV_s)},
           {"beta_steps", std::to_string(map.beta.size())},
           {"omega_points", std::to_string(map.omega.size())}},
          {"beta", "omega_rad_s", "omega_eV", "family", "density_s", "density_per_eV"}, rows);
  out.fail_all(map.failures);

  // Phase-matching curves, the band centres of the map.
  json bands = json::array();
  for (const auto& m : models) {
    json pts = json::array();
    for (double b : betas) {
      if (const auto w = m.phase_matching_omega(b)) {
        pts.push_back({{"beta", b}, {"omega_rad_s", *w}, {"energy_eV", eV_from_omega(*w)}});
      }
    }
    bands.push_back({{"family", m.family()},
                     {"polarization", to_string(m.polarization())},
                     {"phase_matching", pts}});
  }
  out.json_file("bands.json", {{"bands", bands}});
}

void task_ideality(const RunConfig& config, const MaterialLibrary& materials,
                   const std::vector<FamilyDispersion>& families, Outputs& out) {
  const auto recipe = recipe_for(config, materials);
  const auto options = ideality_options(config);
  std::vector<Row> rows;
  json reports = json::array();
  for (double beta : config.ideality.betas) {
    BeamParams beam = config.beam;
    beam.beta = beta;
    try {
      const auto spectrum = spectrum_for_beam(families, beam, recipe);
      const auto r = ideality_report(spectrum, options);
      rows.push_back({num(beta), num(r.I), num(r.I_star), num(r.strength(options.target)),
                      num(r.total_strength), num(r.background_strength), num(r.filtered_peak_eV),
                      join(r.overlap_warnings, ";")});
      reports.push_back(report_json(r));
    } catch (const Error& e) {
      out.fail("beta=" + num(beta), e.what());
    }
  }
  out.csv("ideality.csv", {{"target", options.target}, {"gap_m", num(config.beam.gap)},
                           {"length_m", num(config.beam.length)}},
          {"beta", "I", "I_star", "target_strength", "total_strength", "background_strength",
           "filtered_peak_eV", "overlap_warnings"},
          rows);
  out.json_file("ideality.json", {{"reports", reports}});
}

void task_tradeoff(const RunConfig& config, const MaterialLibrary& materials,
                   const std::vector<FamilyDispersion>& families, Outputs& out) {
  const auto recipe = recipe_for(config, materials);
  const auto options = ideality_options(config);
  std::vector<Row> rows;
  json reports = json::array();
  std::vector<std::pair<double, IdealityReport>> done;
  for (double gap : config.tradeoff.gaps) {
    try {
      const auto curve = gap_tradeoff(families, config.beam, {gap}, recipe, options);
      const auto& p = curve.points.front();
      rows.push_back({num(gap * 1e9), num(p.target_strength), num(p.report.I),
                      num(p.report.I_star), num(p.report.total_strength),
                      num(p.report.background_strength)});
      reports.push_back(report_json(p.report));
      done.emplace_back(gap, p.report);
    } catch (const Error& e) {
      out.fail("gap_nm=" + num(gap * 1e9), e.what());
    }
  }
  bool strength_decreasing = true;
  bool ideality_increasing = true;
  for (std::size_t i = 1; i < done.size(); ++i) {
    const bool wider = done[i].first > done[i - 1].first;
    const double s0 = done[i - 1].second.strength(options.target);
    const double s1 = done[i].second.strength(options.target);
    if (wider ? s1 >= s0 : s1 <= s0) strength_decreasing = false;
    if (wider ? done[i].second.I < done[i - 1].second.I : done[i].second.I > done[i - 1].second.I) {
      ideality_increasing = false;
    }
  }
  out.csv("tradeoff.csv", {{"target", options.target}, {"beta", num(config.beam.beta)},
                           {"length_m", num(config.beam.length)}},
          {"gap_nm", "target_strength", "I", "I_star", "total_strength", "background_strength"},
          rows);
  out.json_file("tradeoff.json", {{"reports", reports},
                                  {"strength_decreasing", strength_decreasing},
                                  {"ideality_increasing", ideality_increasing}});
}

void task_spectrum(const RunConfig& config, const MaterialLibrary& materials,
                   const std::vector<FamilyDispersion>& families, Outputs& out) {
  const auto spectrum = spectrum_for_beam(families, config.beam, recipe_for(config, materials));
  write_spectrum_csv(out, "spectrum.csv", spectrum, {});
  const auto options = ideality_options(config);

  json body = json::object();
  try {
    body["ideality"] = report_json(ideality_report(spectrum, options));
    const auto h = herald_metrics(spectrum, options);
    body["herald"] = {{"P_herald_1", h.P_herald_1},
                      {"purity_full", h.purity_full},
                      {"purity_filtered", h.purity_filtered}};
  } catch (const Error& e) {
    out.fail("ideality", e.what());
  }

  // Integrated quanta per family at the photon energy of its peak.
  std::vector<std::pair<std::string, double>> G_list;
  std::vector<double> energies;
  for (std::size_t f = 0; f < spectrum.families.size(); ++f) {
    const auto& d = spectrum.density[f];
    const double G = trapezoid(spectrum.omega, d);
    if (!(G > 0.0)) continue;
    const auto k = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
    G_list.emplace_back(spectrum.families[f], G);
    energies.push_back(eV_from_omega(spectrum.omega[k]));
  }
  if (!G_list.empty()) {
    const auto dist = sideband_probabilities(G_list);
    json fams = json::array();
    for (std::size_t i = 0; i < G_list.size(); ++i) {
      fams.push_back({{"family", G_list[i].first}, {"G", G_list[i].second},
                      {"photon_energy_eV", energies[i]}});
    }
    body["sidebands"] = {{"G", dist.G}, {"n_max", dist.n_max}, {"P", dist.P}, {"families", fams}};
    try {
      const auto eels = synth_eels_spectrum(dist, energies, options.zlp_fwhm_eV);
      std::vector<Row> rows;
      for (std::size_t k = 0; k < eels.energy_eV.size(); ++k) {
        rows.push_back({num(eels.energy_eV[k]), num(eels.intensity[k])});
      }
      out.csv("eels.csv", {{"zlp_fwhm_eV", num(eels.zlp_fwhm_eV)}},
              {"energy_eV", "intensity_per_eV"}, rows);
    } catch (const Error& e) {
      out.fail("eels", e.what());
    }
  }

  if (config.thin_film.enabled) {
    try {
      const double film = thin_film_emission(config.thin_film.film, materials, config.beam,
                                             config.band.lambda_min, config.band.lambda_max);
      double guide = 0.0;
      for (const auto& d : spectrum.density) guide += trapezoid(spectrum.omega, d);
      const auto c = thin_film_comparison(film, guide);
      body["thin_film"] = {{"film_strength", c.film_strength},
                           {"waveguide_strength", c.waveguide_strength},
                           {"ratio", c.ratio},
                           {"caveat", c.caveat}};
    } catch (const Error& e) {
      out.fail("thin_film", e.what());
    }
  }
  out.json_file("spectrum.json", body);
}

void task_waveform(const RunConfig& config, const std::vector<FamilyCouplingModel>& models,
                   Outputs& out) {
  const auto& m = find_model(models, config.waveform.family);
  const auto wm = m.phase_matching_omega(config.beam.beta);
  if (!wm) {
    throw DomainError(config.waveform.family + " is not phase matched at beta " +
                      num(config.beam.beta));
  }
  const double c = constants::speed_of_light;
  const double v = config.beam.velocity();
  const double n_g = m.n_g(*wm);
  const double v_g = c / n_g;
  double beta2 = config.waveform.beta2;
  if (std::isnan(beta2)) {
    const double h = 1e-3 * *wm;
    const double lo = std::max(m.omega_min(), *wm - h);
    const double hi = std::min(m.omega_max(), *wm + h);
    beta2 = 0.5 * (m.n_g(hi) - m.n_g(lo)) / (hi - lo) / c * v_g;
  }
  const auto env = window_envelope(config.beam.window, config.beam.length,
                                   config.waveform.envelope_points,
                                   std::sqrt(m.uz_abs2(*wm)));
  WaveformOptions opt;
  opt.method = config.waveform.method;
  opt.switch_ratio = config.waveform.switch_ratio;
  opt.grid_points = config.waveform.grid_points;
  const auto r = synthesize_waveform(env, config.geometry.routing, v, v_g, beta2, *wm, opt);
  std::vector<Row> rows;
  for (std::size_t k = 0; k < r.r_pulse.size(); ++k) {
    rows.push_back({num(r.r_pulse[k]), num(r.phi[k].real()), num(r.phi[k].imag()),
                    num(std::abs(r.phi[k]))});
  }
  out.csv("waveform.csv", {{"family", m.family()}, {"method", to_string(r.method)},
                           {"omega_m_rad_s", num(r.omega_m)}, {"beta2_s", num(r.beta2)}},
          {"r_par_pulse_frame_m", "re", "im", "abs"}, rows);
  out.json_file("waveform.json", {{"family", m.family()},
                                  {"method", to_string(r.method)},
                                  {"omega_m_rad_s", r.omega_m},
                                  {"energy_eV", eV_from_omega(r.omega_m)},
                                  {"beta2_s", r.beta2},
                                  {"v_m_s", r.v},
                                  {"v_g_m_s", r.v_g},
                                  {"duration_s", r.duration},
                                  {"walkoff_duration_s", r.walkoff_duration},
                                  {"kernel_ratio", r.kernel_ratio},
                                  {"edge_ratio", r.edge_ratio},
                                  {"raw_energy", r.raw_energy}});
}

void task_resonator(const RunConfig& config, const MaterialLibrary& materials,
                    const std::vector<FamilyDispersion>& families,
                    const std::vector<FamilyCouplingModel>& models, Outputs& out) {
  const auto open = spectrum_for_beam(families, config.beam, recipe_for(config, materials));
  const auto& target = find_model(models, config.ideality.target);
  const auto wm = target.phase_matching_omega(config.beam.beta);
  ResonatorParams p;
  p.fsr = config.resonator.fsr;
  p.finesse = config.resonator.finesse;
  if (!std::isnan(config.resonator.anchor_eV)) {
    p.anchor_omega = omega_from_eV(config.resonator.anchor_eV);
  } else if (wm) {
    p.anchor_omega = *wm;
  }
  ResonatorOptions o;
  o.max_points = config.resonator.max_points;
  o.zlp_fwhm_eV = config.ideality.zlp_fwhm_eV;
  const auto r = resonator_spectrum(open, p, o);
  write_spectrum_csv(out, "resonator.csv", r.spectrum,
                     {{"fsr_Hz", num(p.fsr)}, {"finesse", num(p.finesse)},
                      {"anchor_omega_rad_s", num(p.anchor_omega)}});
  json quanta = json::array();
  for (std::size_t f = 0; f < open.families.size(); ++f) {
    quanta.push_back({{"family", open.families[f]},
                      {"open", trapezoid(open.omega, open.density[f])},
                      {"resonator", trapezoid(r.spectrum.omega, r.spectrum.density[f])}});
  }
  json body = {{"fsr_Hz", p.fsr},
               {"finesse", p.finesse},
               {"anchor_omega_rad_s", p.anchor_omega},
               {"linewidth_rad_s", p.linewidth()},
               {"peak_enhancement", 2.0 * p.finesse / constants::pi},
               {"lines_per_side", r.lines_per_side},
               {"truncation_bound", r.truncation_bound},
               {"refined", r.refined},
               {"open_smooth", r.open_smooth},
               {"round_trip_time_s", r.round_trip_time},
               {"zlp_coherence_time_s", r.zlp_coherence_time},
               {"comb_resolvable", r.comb_resolvable},
               {"quanta", quanta}};
  if (wm) {
    body["modes_in_band"] = modes_in_band(target.n_g(*wm), target.n_eff(*wm));
  }
  out.json_file("resonator.json", body);
}

}  // namespace

SolvedFamilies solve_families(const RunConfig& config, const MaterialLibrary& materials,
                              ModeCache* cache) {
  const auto omegas = omega_grid_for_band(config.band.lambda_min, config.band.lambda_max,
                                          config.solver.omega_points);
  const auto grid = config.grid_spec();
  const auto options = config.solve_options();
  OmegaSolver solver = [&](double omega) {
    auto solve = [&] { return solve_modes(config.geometry, materials, omega, grid, options); };
    if (!cache) return solve();
    const auto key = mode_cache_key(config.geometry, materials, omega, grid, options);
    return cache->get_or_solve(key, [&] {
      try {
        return solve();
      } catch (const NoGuidedMode&) {
        return std::vector<ModeSolution>{};
      }
    });
  };
  const auto samples = sweep_modes(omegas, solver, config.jobs);
  SolvedFamilies out;
  for (const auto& s : samples) {
    if (s.failed) out.failures.push_back("omega=" + num(s.omega) + ": " + s.error);
  }
  TrackingReport report;
  out.families = track_families(samples, &report);
  out.issues = report.issues;
  return out;
}

std::function<double(const BeamParams&, double)> background_function(
    const RunConfig& config, const MaterialLibrary& materials) {
  if (config.background == BackgroundModel::None) return {};
  const Material substrate = materials.get(config.geometry.substrate_material);
  const BackgroundModel model = config.background;
  return [substrate, model](const BeamParams& beam, double omega) {
    return background_spectrum(model, substrate, beam, {omega}).front();
  };
}

std::string config_hash(const RunConfig& config) {
  return sha256_hex(results_config(config).dump());
}

Metadata run_metadata(const RunConfig& config, const MaterialLibrary& materials) {
  Metadata m;
  m.emplace_back("tool", "fewg");
  m.emplace_back("tool_version", FEWG_VERSION);
  m.emplace_back("solver_version", std::to_string(solver_version));
  m.emplace_back("task", to_string(config.task));
  m.emplace_back("config_hash", config_hash(config));
  std::set<std::string> ids = {config.geometry.core_material, config.geometry.substrate_material,
                               config.geometry.top_cladding_material};
  if (config.thin_film.enabled) {
    ids.insert(config.thin_film.film.film_material);
    ids.insert(config.thin_film.film.substrate_material);
  }
  for (const auto& id : ids) {
    if (materials.contains(id)) m.emplace_back("material_" + id, material_version(materials.get(id)));
  }
  m.emplace_back("generated_at", utc_timestamp());
  m.emplace_back("config", config_to_json(config).dump());
  return m;
}

RunResult run(const RunConfig& config) {
  config.validate();
  const MaterialLibrary materials = config.materials();
  for (const auto& id : {config.geometry.core_material, config.geometry.substrate_material,
                         config.geometry.top_cladding_material}) {
    if (!materials.contains(id)) throw ConfigError("geometry material '" + id + "' is not defined");
  }
  Outputs out(config, materials);
  std::unique_ptr<ModeCache> cache;
  if (!config.cache_dir.empty()) cache = std::make_unique<ModeCache>(config.cache_dir);

  RunResult result;
  try {
    const auto solved = solve_families(config, materials, cache.get());
    out.fail_all(solved.failures);
    if (solved.families.empty()) throw NoGuidedMode("no guided family in the band");
    const auto models = coupling_models(solved.families, config.beam);
    switch (config.task) {
      case Task::Modes: task_modes(config, solved, out); break;
      case Task::Map: task_map(config, materials, models, out); break;
      case Task::Ideality: task_ideality(config, materials, solved.families, out); break;
      case Task::Tradeoff: task_tradeoff(config, materials, solved.families, out); break;
      case Task::Spectrum: task_spectrum(config, materials, solved.families, out); break;
      case Task::Waveform: task_waveform(config, models, out); break;
      case Task::Resonator: task_resonator(config, materials, solved.families, models, out); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    out.fail(to_string(config.task), e.what());
  }

  const std::filesystem::path manifest = std::filesystem::path(config.output_dir) / "failures.json";
  if (!out.failures().empty()) {
    out.json_file("failures.json", {{"failures", out.failures()}});
    result.exit_code = ExitPartialFailure;
  } else {
    std::filesystem::remove(manifest);
  }
  result.failures = out.failures();
  result.outputs = out.files();
  if (cache) {
    result.cache_hits = cache->hits();
    result.cache_misses = cache->misses();
  }
  return result;
}

}  // namespace fewg
