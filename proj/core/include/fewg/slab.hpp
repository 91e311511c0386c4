#pragma once

#include <vector>

namespace fewg {

enum class SlabPolarization {
  TE,  // electric field parallel to the layers
  TM,  // magnetic field parallel to the layers
};

struct SlabLayer {
  double eps = 1.0;
  double thickness = 0.0;
};

/// Planar stack: lower half-space, finite layers listed bottom to top, upper
/// half-space. All permittivities are real (lossless).
struct SlabStack {
  double eps_lower = 1.0;
  std::vector<SlabLayer> layers;
  double eps_upper = 1.0;

  double max_cladding_eps() const;
  double max_eps() const;
};

/// Characteristic function of the stack at effective index n_eff (wavenumber
/// k0). Guided modes are its roots for n_eff above both claddings. The
/// function is entire in n_eff, so every sign change brackets a mode.
double slab_characteristic(const SlabStack& stack, SlabPolarization pol,
                           double k0, double n_eff);

/// Guided effective indices, descending. `scan_points` controls the bracket
/// search resolution.
std::vector<double> slab_modes(const SlabStack& stack, SlabPolarization pol,
                               double k0, int scan_points = 4000);

}  // namespace fewg
