#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fewg/background.hpp"
#include "fewg/beam.hpp"
#include "fewg/geometry.hpp"
#include "fewg/material.hpp"
#include "fewg/permittivity.hpp"
#include "fewg/modesolver.hpp"
#include "fewg/waveform.hpp"

namespace fewg {

enum class Task { Modes, Map, Ideality, Tradeoff, Waveform, Resonator, Spectrum };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

struct SolverConfig {
  double grid_step = 25e-9;
  double margin = 2e-6;
  /// Explicit window size; zero means core plus margin on every side.
  double window_width = 0.0;
  double window_height = 0.0;
  int modes_per_polarization = 4;
  bool quasi_te = true;
  bool quasi_tm = true;
  double max_tail_ratio = 1e-2;
  /// Frequencies of the dispersion sweep across the band.
  int omega_points = 96;
};

struct BandConfig {
  double lambda_min = studied_band_min_m;
  double lambda_max = studied_band_max_m;
  /// Base points of the coupling-spectrum grid before refinement.
  int points = 600;
  int refine = 4;
};

struct MapConfig {
  double beta_min = 0.45;
  double beta_max = 0.85;
  int beta_steps = 81;
  int omega_points = 400;
};

struct IdealityConfig {
  std::string target = "TM00";
  double zlp_fwhm_eV = 0.5;
  double window_fwhm = 1.0;
  std::vector<double> betas;
};

struct TradeoffConfig {
  std::vector<double> gaps;
};

struct WaveformConfig {
  std::string family = "TM00";
  /// Quadratic dispersion coefficient in s; NaN derives it from n_g(omega).
  double beta2 = std::numeric_limits<double>::quiet_NaN();
  WaveformMethod method = WaveformMethod::Auto;
  int grid_points = 2048;
  int envelope_points = 1024;
  double switch_ratio = 0.05;
};

struct ResonatorConfig {
  double fsr = 100e9;
  double finesse = 100.0;
  /// Photon energy of one comb line; NaN anchors at the target's phase matching.
  double anchor_eV = std::numeric_limits<double>::quiet_NaN();
  std::size_t max_points = 4'000'000;
};

struct ThinFilmConfig {
  bool enabled = false;
  ThinFilm film;
};

struct RunConfig {
  Task task = Task::Spectrum;
  std::vector<std::string> material_files;
  WaveguideGeometry geometry;
  BeamParams beam;
  /// Kept so the effective config reproduces the user's beam form.
  double transverse_waist = 0.0;
  int transverse_points = 0;
  SolverConfig solver;
  BandConfig band;
  MapConfig map;
  IdealityConfig ideality;
  TradeoffConfig tradeoff;
  WaveformConfig waveform;
  ResonatorConfig resonator;
  BackgroundModel background = BackgroundModel::PlanarInterface;
  ThinFilmConfig thin_film;
  std::string output_dir = "out";
  std::string cache_dir;
  int jobs = 1;
  /// Directory relative file paths resolve against.
  std::filesystem::path base_dir;

  void validate() const;
  GridSpec grid_spec() const;
  SolveOptions solve_options() const;
  /// Built-in materials plus every material file.
  MaterialLibrary materials() const;
};

/// Throws ConfigError naming the offending field.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
/// Effective config in the file format; reloads to an equivalent RunConfig.
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace fewg
