#pragma once

#include <cstdint>
#include <vector>

#include "fewg/geometry.hpp"
#include "fewg/material.hpp"

namespace fewg {

enum class BoundaryCondition {
  ZeroField,  // field vanishes one cell beyond the window
  ZeroSlope,  // mirror boundary; used to reduce the solver to 1D slabs
};

/// Cross-section sampling for the mode solver. Zero window dimensions mean
/// "core plus `margin` of cladding on every side".
struct GridSpec {
  double dx = 10e-9;
  double dy = 10e-9;
  double width = 0.0;
  double height = 0.0;
  /// Space above the core top surface; zero centers the core vertically.
  double top_space = 0.0;
  double margin = 2e-6;
  bool enforce_margin = true;
  BoundaryCondition bc_x = BoundaryCondition::ZeroField;
  BoundaryCondition bc_y = BoundaryCondition::ZeroField;
};

/// Uniform cell-centered grid; cell (i, j) has center (x(i), y(j)).
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  double x0 = 0.0;  // left face
  double y0 = 0.0;  // bottom face

  double x(int i) const { return x0 + (i + 0.5) * dx; }
  double y(int j) const { return y0 + (j + 0.5) * dy; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(i);
  }
  std::size_t size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  double x_max() const { return x0 + nx * dx; }
  double y_max() const { return y0 + ny * dy; }
};

enum class Region : std::uint8_t { TopCladding = 0, Substrate = 1, Core = 2 };

/// Piecewise-constant relative permittivity on the solver grid. Material
/// boundaries are snapped to the nearest cell face.
struct PermittivityMap {
  Grid2D grid;
  std::vector<double> eps;
  std::vector<Region> region;
  double eps_core = 1.0;
  double eps_substrate = 1.0;
  double eps_top = 1.0;
  /// Snapped core extent (faces).
  double core_x_min = 0.0;
  double core_x_max = 0.0;
  double core_y_min = 0.0;
  double core_y_max = 0.0;

  double max_cladding_index() const;
  double core_index() const;
  bool is_material(double x, double y) const;
};

Grid2D layout_grid(const WaveguideGeometry& geometry, const GridSpec& spec);

PermittivityMap permittivity_profile(const WaveguideGeometry& geometry,
                                     const MaterialLibrary& materials,
                                     double omega, const GridSpec& spec);

}  // namespace fewg
