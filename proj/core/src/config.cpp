#include "fewg/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "fewg/constants.hpp"
#include "fewg/errors.hpp"
#include "fewg/io.hpp"

namespace fewg {

namespace {

using nlohmann::json;

// Reads one JSON object, tracking which keys were consumed so that typos
// surface as errors naming the full field path.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(name("") + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback) {
    if (!mark(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(name(key) + " must be a number");
    return v.get<double>();
  }
  int integer(const std::string& key, int fallback) {
    if (!mark(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(name(key) + " must be an integer");
    return v.get<int>();
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!mark(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(name(key) + " must be true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!mark(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(name(key) + " must be a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    if (!mark(key)) return out;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(name(key) + " must be an array of numbers");
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(name(key) + " must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& key) {
    std::vector<std::string> out;
    if (!mark(key)) return out;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(name(key) + " must be an array of strings");
    for (const auto& x : v) {
      if (!x.is_string()) throw ConfigError(name(key) + " must be an array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }
  Section child(const std::string& key) {
    static const json empty = json::object();
    return mark(key) ? Section(j_.at(key), name(key)) : Section(empty, name(key));
  }
  std::string name(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ConfigError(name(k) + " is not a recognised field");
    }
  }

 private:
  bool mark(const std::string& key) {
    if (!j_.contains(key)) return false;
    used_.insert(key);
    return true;
  }
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

const std::vector<std::pair<Task, const char*>> kTasks = {
    {Task::Modes, "modes"},         {Task::Map, "map"},
    {Task::Ideality, "ideality"},   {Task::Tradeoff, "tradeoff"},
    {Task::Waveform, "waveform"},   {Task::Resonator, "resonator"},
    {Task::Spectrum, "spectrum"},
};

// Unit conversions leave rounding noise; 12 digits keep the file readable
// and reload to the same SI value within 1e-12.
double human(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace

std::string to_string(Task task) {
  for (const auto& [t, n] : kTasks) {
    if (t == task) return n;
  }
  return "spectrum";
}

Task task_from_string(const std::string& name) {
  for (const auto& [t, n] : kTasks) {
    if (name == n) return t;
  }
  throw ConfigError("task must be one of modes, map, ideality, tradeoff, waveform, "
                    "resonator, spectrum; got '" + name + "'");
}

RunConfig config_from_json(const json& root, const std::filesystem::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  Section top(root, "");
  require(top.has("task"), "task is required");
  c.task = task_from_string(top.string("task", ""));

  {
    Section s = top.child("materials");
    c.material_files = s.strings("files");
    s.finish();
  }
  {
    Section s = top.child("geometry");
    auto& g = c.geometry;
    g.core_width = s.number("core_width_nm", g.core_width * 1e9) * 1e-9;
    g.core_thickness = s.number("core_thickness_nm", g.core_thickness * 1e9) * 1e-9;
    g.core_material = s.string("core_material", g.core_material);
    g.substrate_material = s.string("substrate_material", g.substrate_material);
    g.top_cladding_material = s.string("top_cladding_material", g.top_cladding_material);
    const std::string layout = s.string("layout", "embedded");
    if (layout == "embedded") {
      g.layout = CoreLayout::Embedded;
    } else if (layout == "ridge") {
      g.layout = CoreLayout::Ridge;
    } else {
      throw ConfigError("geometry.layout must be 'embedded' or 'ridge'");
    }
    if (s.has("routing")) {
      Section r = s.child("routing");
      auto z = r.numbers("z_um");
      auto R = r.numbers("r_um");
      r.finish();
      for (auto& v : z) v *= 1e-6;
      for (auto& v : R) v *= 1e-6;
      g.routing = Routing(std::move(z), std::move(R));
    }
    s.finish();
  }
  {
    Section s = top.child("beam");
    auto& b = c.beam;
    require(!(s.has("beta") && s.has("kinetic_energy_keV")),
            "beam.beta and beam.kinetic_energy_keV are mutually exclusive");
    if (s.has("kinetic_energy_keV")) {
      const double kev = s.number("kinetic_energy_keV", 0.0);
      require(kev > 0.0, "beam.kinetic_energy_keV must be > 0");
      b.beta = kinetic_energy_to_beta(kev * 1e3);
    } else {
      b.beta = s.number("beta", b.beta);
    }
    b.gap = s.number("gap_nm", b.gap * 1e9) * 1e-9;
    b.length = s.number("length_um", b.length * 1e6) * 1e-6;
    b.window = window_from_string(s.string("window", to_string(b.window)));
    b.lateral_offset = s.number("lateral_offset_nm", 0.0) * 1e-9;
    if (s.has("transverse")) {
      Section t = s.child("transverse");
      c.transverse_waist = t.number("waist_nm", 0.0) * 1e-9;
      c.transverse_points = t.integer("points", 5);
      t.finish();
      require(c.transverse_waist > 0.0, "beam.transverse.waist_nm must be > 0");
      require(c.transverse_points >= 1, "beam.transverse.points must be >= 1");
      b.transverse_density = gaussian_transverse_density(c.transverse_waist, c.transverse_points);
    }
    s.finish();
  }
  {
    Section s = top.child("solver");
    auto& v = c.solver;
    v.grid_step = s.number("grid_nm", v.grid_step * 1e9) * 1e-9;
    v.margin = s.number("margin_um", v.margin * 1e6) * 1e-6;
    v.window_width = s.number("window_width_um", 0.0) * 1e-6;
    v.window_height = s.number("window_height_um", 0.0) * 1e-6;
    v.modes_per_polarization = s.integer("modes_per_polarization", v.modes_per_polarization);
    const auto pols = s.strings("polarizations");
    if (!pols.empty()) {
      v.quasi_te = v.quasi_tm = false;
      for (const auto& p : pols) {
        if (p == "TE") {
          v.quasi_te = true;
        } else if (p == "TM") {
          v.quasi_tm = true;
        } else {
          throw ConfigError("solver.polarizations entries must be 'TE' or 'TM'");
        }
      }
    }
    v.max_tail_ratio = s.number("max_tail_ratio", v.max_tail_ratio);
    v.omega_points = s.integer("omega_points", v.omega_points);
    s.finish();
  }
  {
    Section s = top.child("band");
    auto& v = c.band;
    v.lambda_min = s.number("lambda_min_nm", v.lambda_min * 1e9) * 1e-9;
    v.lambda_max = s.number("lambda_max_nm", v.lambda_max * 1e9) * 1e-9;
    v.points = s.integer("points", v.points);
    v.refine = s.integer("refine", v.refine);
    s.finish();
  }
  {
    Section s = top.child("map");
    auto& v = c.map;
    v.beta_min = s.number("beta_min", v.beta_min);
    v.beta_max = s.number("beta_max", v.beta_max);
    v.beta_steps = s.integer("beta_steps", v.beta_steps);
    v.omega_points = s.integer("omega_points", v.omega_points);
    s.finish();
  }
  {
    Section s = top.child("ideality");
    auto& v = c.ideality;
    v.target = s.string("target", v.target);
    v.zlp_fwhm_eV = s.number("zlp_fwhm_eV", v.zlp_fwhm_eV);
    v.window_fwhm = s.number("window_fwhm", v.window_fwhm);
    v.betas = s.numbers("betas");
    s.finish();
  }
  {
    Section s = top.child("tradeoff");
    c.tradeoff.gaps = s.numbers("gaps_nm");
    for (auto& g : c.tradeoff.gaps) g *= 1e-9;
    s.finish();
  }
  {
    Section s = top.child("waveform");
    auto& v = c.waveform;
    v.family = s.string("family", v.family);
    if (s.has("beta2_s")) {
      v.beta2 = s.number("beta2_s", 0.0);
    }
    v.method = waveform_method_from_string(s.string("method", to_string(v.method)));
    v.grid_points = s.integer("grid_points", v.grid_points);
    v.envelope_points = s.integer("envelope_points", v.envelope_points);
    v.switch_ratio = s.number("switch_ratio", v.switch_ratio);
    s.finish();
  }
  {
    Section s = top.child("resonator");
    auto& v = c.resonator;
    v.fsr = s.number("fsr_GHz", v.fsr * 1e-9) * 1e9;
    v.finesse = s.number("finesse", v.finesse);
    if (s.has("anchor_eV")) v.anchor_eV = s.number("anchor_eV", 0.0);
    v.max_points = static_cast<std::size_t>(s.number("max_points", static_cast<double>(v.max_points)));
    s.finish();
  }
  {
    Section s = top.child("background");
    c.background = background_model_from_string(s.string("model", to_string(c.background)));
    s.finish();
  }
  {
    Section s = top.child("thin_film");
    auto& v = c.thin_film;
    v.enabled = s.boolean("enabled", v.enabled);
    v.film.film_material = s.string("film_material", v.film.film_material);
    v.film.substrate_material = s.string("substrate_material", v.film.substrate_material);
    v.film.thickness = s.number("thickness_nm", v.film.thickness * 1e9) * 1e-9;
    s.finish();
  }
  {
    Section s = top.child("output");
    c.output_dir = s.string("dir", c.output_dir);
    s.finish();
  }
  {
    Section s = top.child("cache");
    c.cache_dir = s.string("dir", c.cache_dir);
    s.finish();
  }
  c.jobs = top.integer("jobs", c.jobs);
  top.finish();
  c.validate();
  return c;
}

void RunConfig::validate() const {
  geometry.validate();
  beam.validate();
  for (const auto& f : material_files) {
    const auto p = std::filesystem::path(f).is_absolute() ? std::filesystem::path(f) : base_dir / f;
    require(std::filesystem::exists(p), "materials.files entry '" + f + "' does not exist");
  }
  require(solver.grid_step > 0.0, "solver.grid_nm must be > 0");
  require(solver.margin >= 0.0, "solver.margin_um must be >= 0");
  require(solver.modes_per_polarization >= 1, "solver.modes_per_polarization must be >= 1");
  require(solver.quasi_te || solver.quasi_tm, "solver.polarizations must not be empty");
  require(solver.max_tail_ratio > 0.0, "solver.max_tail_ratio must be > 0");
  require(solver.omega_points >= 4, "solver.omega_points must be >= 4");
  require(band.lambda_min > 0.0 && band.lambda_max > band.lambda_min,
          "band.lambda_min_nm must be > 0 and below band.lambda_max_nm");
  require(band.points >= 2, "band.points must be >= 2");
  require(band.refine >= 1, "band.refine must be >= 1");
  require(map.beta_steps >= 1, "map.beta_steps must be >= 1 (beta grid is empty)");
  require(map.beta_min > 0.0 && map.beta_max < 1.0 && map.beta_min <= map.beta_max,
          "map.beta_min and map.beta_max must satisfy 0 < min <= max < 1");
  require(map.omega_points >= 2, "map.omega_points must be >= 2");
  require(ideality.zlp_fwhm_eV > 0.0, "ideality.zlp_fwhm_eV must be > 0");
  require(ideality.window_fwhm > 0.0, "ideality.window_fwhm must be > 0");
  for (double b : ideality.betas) {
    require(b > 0.0 && b < 1.0, "ideality.betas entries must be in (0, 1)");
  }
  require(task != Task::Ideality || !ideality.betas.empty(),
          "ideality.betas must be non-empty for the ideality task");
  require(task != Task::Tradeoff || !tradeoff.gaps.empty(),
          "tradeoff.gaps_nm must be non-empty for the tradeoff task");
  for (double g : tradeoff.gaps) {
    require(g >= 50e-9 - 1e-15 && g <= 1e-6 + 1e-15, "tradeoff.gaps_nm entries must be in [50, 1000]");
  }
  require(waveform.grid_points >= 16, "waveform.grid_points must be >= 16");
  require(waveform.envelope_points >= 512, "waveform.envelope_points must be >= 512");
  require(waveform.switch_ratio > 0.0, "waveform.switch_ratio must be > 0");
  require(resonator.fsr > 0.0, "resonator.fsr_GHz must be > 0");
  require(resonator.finesse > 1.0, "resonator.finesse must be > 1");
  require(thin_film.film.thickness >= 0.0, "thin_film.thickness_nm must be >= 0");
  require(!output_dir.empty(), "output.dir must not be empty");
  require(jobs >= 1, "jobs must be >= 1");
}

GridSpec RunConfig::grid_spec() const {
  GridSpec g;
  g.dx = g.dy = solver.grid_step;
  g.margin = solver.margin;
  g.width = solver.window_width;
  g.height = solver.window_height;
  return g;
}

SolveOptions RunConfig::solve_options() const {
  SolveOptions o;
  o.n_modes = solver.modes_per_polarization;
  o.quasi_te = solver.quasi_te;
  o.quasi_tm = solver.quasi_tm;
  o.max_tail_ratio = solver.max_tail_ratio;
  return o;
}

MaterialLibrary RunConfig::materials() const {
  MaterialLibrary lib;
  for (const auto& f : material_files) {
    const auto p = std::filesystem::path(f).is_absolute() ? std::filesystem::path(f) : base_dir / f;
    lib.load_file(p);
  }
  return lib;
}

RunConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = read_json(path);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  RunConfig c = config_from_json(j, path.parent_path());
  if (const char* env = std::getenv("FEWG_CACHE_DIR"); env && *env) c.cache_dir = env;
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["task"] = to_string(c.task);
  j["materials"] = {{"files", c.material_files}};
  const auto& g = c.geometry;
  j["geometry"] = {{"core_width_nm", human(g.core_width * 1e9)},
                   {"core_thickness_nm", human(g.core_thickness * 1e9)},
                   {"core_material", g.core_material},
                   {"substrate_material", g.substrate_material},
                   {"top_cladding_material", g.top_cladding_material},
                   {"layout", g.layout == CoreLayout::Embedded ? "embedded" : "ridge"}};
  if (!g.routing.is_straight()) {
    std::vector<double> z;
    std::vector<double> r;
    for (double v : g.routing.z_samples()) z.push_back(human(v * 1e6));
    for (double v : g.routing.r_samples()) r.push_back(human(v * 1e6));
    j["geometry"]["routing"] = {{"z_um", z}, {"r_um", r}};
  }
  const auto& b = c.beam;
  j["beam"] = {{"beta", b.beta},
               {"gap_nm", human(b.gap * 1e9)},
               {"length_um", human(b.length * 1e6)},
               {"window", to_string(b.window)},
               {"lateral_offset_nm", human(b.lateral_offset * 1e9)}};
  if (c.transverse_waist > 0.0) {
    j["beam"]["transverse"] = {{"waist_nm", human(c.transverse_waist * 1e9)},
                               {"points", c.transverse_points}};
  }
  const auto& s = c.solver;
  std::vector<std::string> pols;
  if (s.quasi_te) pols.push_back("TE");
  if (s.quasi_tm) pols.push_back("TM");
  j["solver"] = {{"grid_nm", human(s.grid_step * 1e9)},
                 {"margin_um", human(s.margin * 1e6)},
                 {"window_width_um", human(s.window_width * 1e6)},
                 {"window_height_um", human(s.window_height * 1e6)},
                 {"modes_per_polarization", s.modes_per_polarization},
                 {"polarizations", pols},
                 {"max_tail_ratio", s.max_tail_ratio},
                 {"omega_points", s.omega_points}};
  j["band"] = {{"lambda_min_nm", human(c.band.lambda_min * 1e9)},
               {"lambda_max_nm", human(c.band.lambda_max * 1e9)},
               {"points", c.band.points},
               {"refine", c.band.refine}};
  j["map"] = {{"beta_min", c.map.beta_min},
              {"beta_max", c.map.beta_max},
              {"beta_steps", c.map.beta_steps},
              {"omega_points", c.map.omega_points}};
  j["ideality"] = {{"target", c.ideality.target},
                   {"zlp_fwhm_eV", c.ideality.zlp_fwhm_eV},
                   {"window_fwhm", c.ideality.window_fwhm},
                   {"betas", c.ideality.betas}};
  std::vector<double> gaps;
  for (double v : c.tradeoff.gaps) gaps.push_back(human(v * 1e9));
  j["tradeoff"] = {{"gaps_nm", gaps}};
  j["waveform"] = {{"family", c.waveform.family},
                   {"method", to_string(c.waveform.method)},
                   {"grid_points", c.waveform.grid_points},
                   {"envelope_points", c.waveform.envelope_points},
                   {"switch_ratio", c.waveform.switch_ratio}};
  if (!std::isnan(c.waveform.beta2)) j["waveform"]["beta2_s"] = c.waveform.beta2;
  j["resonator"] = {{"fsr_GHz", human(c.resonator.fsr * 1e-9)},
                    {"finesse", c.resonator.finesse},
                    {"max_points", static_cast<double>(c.resonator.max_points)}};
  if (!std::isnan(c.resonator.anchor_eV)) j["resonator"]["anchor_eV"] = c.resonator.anchor_eV;
  j["background"] = {{"model", to_string(c.background)}};
  j["thin_film"] = {{"enabled", c.thin_film.enabled},
                    {"film_material", c.thin_film.film.film_material},
                    {"substrate_material", c.thin_film.film.substrate_material},
                    {"thickness_nm", human(c.thin_film.film.thickness * 1e9)}};
  j["output"] = {{"dir", c.output_dir}};
  j["cache"] = {{"dir", c.cache_dir}};
  j["jobs"] = c.jobs;
  return j;
}

}  // namespace fewg
