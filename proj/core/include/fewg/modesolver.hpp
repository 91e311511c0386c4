#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fewg/geometry.hpp"
#include "fewg/material.hpp"
#include "fewg/permittivity.hpp"

namespace fewg {

enum class Polarization {
  QuasiTE,  // dominant E_x (parallel to the substrate surface)
  QuasiTM,  // dominant E_y (normal to the substrate surface)
};

std::string to_string(Polarization pol);

/// Normalized mode profile on the solver grid. The vector profile is
/// u = (et, 0, i ez) for quasi-TE and (0, et, i ez) for quasi-TM, normalized
/// so that sum(eps * (et^2 + ez^2)) dx dy = 1.
struct ModeField {
  Grid2D grid;
  Polarization polarization = Polarization::QuasiTM;
  std::vector<float> et;
  std::vector<float> ez;
  std::shared_ptr<const std::vector<float>> eps;

  /// Bilinear interpolation between cell centers; clamps at the window edge.
  double et_at(double x, double y) const;
  double ez_at(double x, double y) const;
};

struct ModeSolution {
  std::string family;
  Polarization polarization = Polarization::QuasiTM;
  int nodes_x = 0;
  int nodes_y = 0;
  double omega = 0.0;
  double n_eff = 0.0;
  /// Filled in by dispersion analysis; NaN straight out of the solver.
  double n_g = 0.0;
  double polarization_fraction = 1.0;
  /// Largest |et| on the outermost cell ring relative to the peak.
  double tail_ratio = 0.0;
  /// max |Im lambda| / |lambda| reported by the eigensolver.
  double eig_imag_ratio = 0.0;
  std::shared_ptr<const ModeField> field;

  double beta() const;
  /// |u_z|^2 at a point, m^-2.
  double uz_abs2(double x, double y) const;
};

struct SolveOptions {
  int n_modes = 4;
  bool quasi_te = true;
  bool quasi_tm = true;
  /// Eigenpairs whose field reaches the window edge above this ratio are
  /// treated as box modes and dropped.
  double max_tail_ratio = 1e-2;
  double tolerance = 1e-12;
};

/// Guided modes sorted by descending n_eff. Throws NoGuidedMode when none
/// exist and ConvergenceFailure when the eigensolver fails.
std::vector<ModeSolution> solve_modes(const WaveguideGeometry& geometry,
                                      const MaterialLibrary& materials,
                                      double omega, const GridSpec& grid,
                                      const SolveOptions& options = {});

/// Same, on an explicit permittivity map (used for layered test structures).
std::vector<ModeSolution> solve_modes_on_map(const PermittivityMap& map,
                                             double omega, const GridSpec& grid,
                                             const SolveOptions& options = {});

/// |<eps a, b>| over the full vector profile. Grids must match.
double mode_overlap(const ModeSolution& a, const ModeSolution& b);

/// Number of eigensolver runs since process start.
std::uint64_t eigensolve_count();

}  // namespace fewg
