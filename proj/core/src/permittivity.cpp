#include "fewg/permittivity.hpp"

#include <algorithm>
#include <cmath>

#include "fewg/errors.hpp"

namespace fewg {

namespace {

struct Snapped {
  Grid2D grid;
  int core_i0 = 0;  // first core column
  int core_i1 = 0;  // one past the last core column
  int core_j0 = 0;
  int core_j1 = 0;
};

int round_cells(double length, double step) {
  return static_cast<int>(std::lround(length / step));
}

Snapped snap(const WaveguideGeometry& geometry, const GridSpec& spec) {
  geometry.validate();
  if (!(spec.dx > 0.0) || !(spec.dy > 0.0)) {
    throw ConfigError("grid spacing must be > 0");
  }
  const double width =
      spec.width > 0.0 ? spec.width : geometry.core_width + 2.0 * spec.margin;
  const double height = spec.height > 0.0
                            ? spec.height
                            : geometry.core_thickness + 2.0 * spec.margin;
  const double top_space = spec.top_space > 0.0
                               ? spec.top_space
                               : 0.5 * (height - geometry.core_thickness);

  Snapped s;
  int nx = round_cells(width, spec.dx);
  if (nx % 2 != 0) ++nx;  // keep x = 0 on a cell face
  const int half_core = std::max(1, round_cells(0.5 * geometry.core_width, spec.dx));
  const int ny = round_cells(height, spec.dy);
  const int n_top = round_cells(top_space, spec.dy);
  const int n_core = std::max(1, round_cells(geometry.core_thickness, spec.dy));

  if (2 * half_core > nx || n_top < 0 || n_top + n_core > ny) {
    throw ConfigError("grid window does not contain the waveguide core");
  }
  s.grid.nx = nx;
  s.grid.ny = ny;
  s.grid.dx = spec.dx;
  s.grid.dy = spec.dy;
  s.grid.x0 = -0.5 * nx * spec.dx;
  s.grid.y0 = -static_cast<double>(ny - n_top) * spec.dy;
  s.core_i0 = nx / 2 - half_core;
  s.core_i1 = nx / 2 + half_core;
  s.core_j1 = ny - n_top;
  s.core_j0 = s.core_j1 - n_core;

  if (spec.enforce_margin) {
    const double tol = 0.5 * std::max(spec.dx, spec.dy);
    const double side = s.core_i0 * spec.dx;
    const double top = n_top * spec.dy;
    const double bottom = s.core_j0 * spec.dy;
    if (side + tol < spec.margin || top + tol < spec.margin ||
        bottom + tol < spec.margin) {
      throw ConfigError("grid window must leave >= " +
                        std::to_string(spec.margin * 1e6) +
                        " um of cladding around the core");
    }
  }
  return s;
}

}  // namespace

double PermittivityMap::max_cladding_index() const {
  return std::sqrt(std::max(eps_substrate, eps_top));
}

double PermittivityMap::core_index() const { return std::sqrt(eps_core); }

bool PermittivityMap::is_material(double x, double y) const {
  // Points outside the window continue the outermost cell row or column.
  const int i = std::clamp(static_cast<int>(std::floor((x - grid.x0) / grid.dx)),
                           0, grid.nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor((y - grid.y0) / grid.dy)),
                           0, grid.ny - 1);
  return eps[grid.index(i, j)] != 1.0;
}

Grid2D layout_grid(const WaveguideGeometry& geometry, const GridSpec& spec) {
  return snap(geometry, spec).grid;
}

PermittivityMap permittivity_profile(const WaveguideGeometry& geometry,
                                     const MaterialLibrary& materials,
                                     double omega, const GridSpec& spec) {
  const Snapped s = snap(geometry, spec);
  PermittivityMap map;
  map.grid = s.grid;
  map.eps_core = materials.get(geometry.core_material).permittivity(omega);
  map.eps_substrate = materials.get(geometry.substrate_material).permittivity(omega);
  map.eps_top = materials.get(geometry.top_cladding_material).permittivity(omega);
  map.core_x_min = s.grid.x0 + s.core_i0 * s.grid.dx;
  map.core_x_max = s.grid.x0 + s.core_i1 * s.grid.dx;
  map.core_y_min = s.grid.y0 + s.core_j0 * s.grid.dy;
  map.core_y_max = s.grid.y0 + s.core_j1 * s.grid.dy;

  const int substrate_top_row =
      geometry.layout == CoreLayout::Embedded ? s.core_j1 : s.core_j0;
  map.eps.resize(s.grid.size());
  map.region.resize(s.grid.size());
  for (int j = 0; j < s.grid.ny; ++j) {
    for (int i = 0; i < s.grid.nx; ++i) {
      Region r = Region::TopCladding;
      if (i >= s.core_i0 && i < s.core_i1 && j >= s.core_j0 && j < s.core_j1) {
        r = Region::Core;
      } else if (j < substrate_top_row) {
        r = Region::Substrate;
      }
      const std::size_t k = s.grid.index(i, j);
      map.region[k] = r;
      map.eps[k] = r == Region::Core        ? map.eps_core
                   : r == Region::Substrate ? map.eps_substrate
                                            : map.eps_top;
    }
  }
  return map;
}

}  // namespace fewg
