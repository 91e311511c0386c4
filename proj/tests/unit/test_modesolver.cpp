#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fewg/constants.hpp"
#include "fewg/dispersion.hpp"
#include "fewg/errors.hpp"
#include "fewg/modesolver.hpp"
#include "fewg/permittivity.hpp"
#include "fewg/slab.hpp"
#include "layered.hpp"
#include "solved.hpp"

using namespace fewg;
using test_support::layered_map;
using test_support::slab_grid_spec;

namespace {

SlabStack slab(double n_core, double thickness, double n_clad = 1.444) {
  SlabStack s;
  s.eps_lower = s.eps_upper = n_clad * n_clad;
  s.layers = {{n_core * n_core, thickness}};
  return s;
}

double fd_slab_neff(const SlabStack& stack, double h, double omega, Polarization pol,
                    double cladding = 2e-6) {
  SolveOptions opt;
  opt.n_modes = 1;
  opt.quasi_te = pol == Polarization::QuasiTE;
  opt.quasi_tm = pol == Polarization::QuasiTM;
  return solve_modes_on_map(layered_map(stack, h, cladding), omega, slab_grid_spec(h), opt)
      .front()
      .n_eff;
}

ModeSolution fd_slab_mode(const SlabStack& stack, double h, double omega, Polarization pol,
                          double cladding) {
  SolveOptions opt;
  opt.n_modes = 1;
  opt.quasi_te = pol == Polarization::QuasiTE;
  opt.quasi_tm = pol == Polarization::QuasiTM;
  return solve_modes_on_map(layered_map(stack, h, cladding), omega, slab_grid_spec(h), opt)
      .front();
}

const FamilyDispersion& family(const SolvedFamilies& s, const std::string& name) {
  for (const auto& f : s.families) {
    if (f.family == name) return f;
  }
  throw DomainError("missing family " + name);
}

}  // namespace

TEST(ModeSolverSlab, SecondOrderConvergence) {
  const double omega = omega_from_wavelength(1.3e-6);
  const double k0 = omega / constants::speed_of_light;
  const auto stack = slab(2.0, 650e-9);
  const double oracle = slab_modes(stack, SlabPolarization::TE, k0).front();
  std::vector<double> err;
  for (double h : {50e-9, 25e-9, 12.5e-9, 6.25e-9}) {
    err.push_back(std::abs(fd_slab_neff(stack, h, omega, Polarization::QuasiTE) - oracle));
  }
  const double order = std::log2(err[1] / err[2]);
  EXPECT_GE(order, 1.5);
  EXPECT_LE(order, 2.5);
  EXPECT_LT(err[3], err[0]);
}

TEST(ModeSolver, HomogeneousMediumHasNoGuidedMode) {
  MaterialLibrary lib;
  WaveguideGeometry g;
  g.core_material = g.substrate_material = g.top_cladding_material = "SiO2";
  GridSpec spec;
  spec.dx = spec.dy = 50e-9;
  EXPECT_THROW(solve_modes(g, lib, omega_from_wavelength(1.55e-6), spec), NoGuidedMode);
}

TEST(ModeSolver, RectangularGuideInvariants) {
  MaterialLibrary lib;
  WaveguideGeometry g;
  GridSpec spec;
  spec.dx = spec.dy = 25e-9;
  const double omega = omega_from_wavelength(1.55e-6);
  const auto modes = solve_modes(g, lib, omega, spec);
  ASSERT_GE(modes.size(), 2u);
  const double n_sub = lib.get("SiO2").refractive_index(omega);
  const double n_core = lib.get("Si3N4").refractive_index(omega);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    EXPECT_GT(m.n_eff, n_sub);
    EXPECT_LT(m.n_eff, n_core);
    if (i > 0) EXPECT_LE(m.n_eff, modes[i - 1].n_eff);
    EXPECT_LT(m.eig_imag_ratio, 1e-10);
    // Discrete normalization of the stored vector profile.
    const auto& f = *m.field;
    double norm = 0.0;
    for (std::size_t p = 0; p < f.et.size(); ++p) {
      norm += (*f.eps)[p] * (double(f.et[p]) * f.et[p] + double(f.ez[p]) * f.ez[p]);
    }
    EXPECT_NEAR(norm * f.grid.dx * f.grid.dy, 1.0, 1e-6) << m.family;
  }
  // Fundamental modes have negligible field at the window edge.
  for (const auto& m : modes) {
    if (m.family == "TM00" || m.family == "TE00") EXPECT_LT(m.tail_ratio, 1e-3) << m.family;
  }
  for (std::size_t a = 0; a < modes.size(); ++a) {
    for (std::size_t b = a + 1; b < modes.size(); ++b) {
      if (modes[a].polarization != modes[b].polarization) continue;
      EXPECT_LT(mode_overlap(modes[a], modes[b]), 1e-3)
          << modes[a].family << " vs " << modes[b].family;
    }
  }
}

// A wide core keeps the lateral curvature of the tail small; at 800 nm width
// the vertical decay is about 10% steeper than the planar rate.
TEST(ModeSolver, EvanescentTailAboveSurface) {
  MaterialLibrary lib;
  WaveguideGeometry g;
  g.core_width = 2.1e-6;
  GridSpec spec;
  spec.dx = spec.dy = 25e-9;
  const double omega = omega_from_wavelength(1.55e-6);
  const auto modes = solve_modes(g, lib, omega, spec);
  const auto it = std::find_if(modes.begin(), modes.end(),
                               [](const ModeSolution& m) { return m.family == "TM00"; });
  ASSERT_NE(it, modes.end());
  const double k0 = omega / constants::speed_of_light;
  const double expected = -std::sqrt(std::pow(it->beta(), 2) - k0 * k0);
  const double y1 = 100e-9;
  const double y2 = 400e-9;
  const double slope =
      0.5 * (std::log(it->uz_abs2(0.0, y2)) - std::log(it->uz_abs2(0.0, y1))) / (y2 - y1);
  EXPECT_NEAR(slope / expected, 1.0, 0.05);
}

TEST(GroupIndex, ExactOnQuadratic) {
  const std::vector<double> w = {1.0e15, 1.1e15, 1.25e15, 1.3e15, 1.5e15};
  auto n = [](double x) { return 1.6 + 2e-16 * (x - 1.2e15) + 3e-31 * std::pow(x - 1.2e15, 2); };
  std::vector<double> ne;
  for (double x : w) ne.push_back(n(x));
  for (double at : {1.1e15, 1.25e15, 1.3e15}) {
    const double d = 2e-16 + 6e-31 * (at - 1.2e15);
    EXPECT_NEAR(group_index(w, ne, at), n(at) + at * d, 1e-10);
  }
}

TEST(GroupIndex, NeedsThreeSamples) {
  EXPECT_THROW(group_index({1.0e15, 1.1e15}, {1.5, 1.51}, 1.05e15), InsufficientSamples);
}

TEST(GroupIndex, BulkLimitForDispersionlessSlab) {
  const double w0 = omega_from_wavelength(1.3e-6);
  std::vector<double> gap;
  for (double t : {0.4e-6, 1.2e-6, 3.6e-6}) {
    const auto stack = slab(1.8, t, 1.5);
    std::vector<double> w;
    std::vector<double> ne;
    for (double s : {0.98, 1.0, 1.02}) {
      w.push_back(s * w0);
      ne.push_back(fd_slab_neff(stack, 10e-9, s * w0, Polarization::QuasiTE));
    }
    gap.push_back(group_index(w, ne, w0) - ne[1]);
  }
  EXPECT_GT(gap[0], gap[1]);
  EXPECT_GT(gap[1], gap[2]);
  EXPECT_LT(gap[2], 0.1 * gap[0]);
}

TEST(Tracking, LabelsFollowPolarizationThroughCrossing) {
  // Thin high-index TE guide against a thick low-index TM guide, both on a
  // 5.5 um column so the fields share one grid.
  const auto thin = slab(2.0, 300e-9);
  const auto thick = slab(1.7, 1.5e-6);
  std::vector<OmegaSample> samples;
  std::vector<double> diff;
  for (int k = 0; k < 12; ++k) {
    const double lambda = 2.4e-6 - k * 1.5e-6 / 11;
    OmegaSample s;
    s.omega = omega_from_wavelength(lambda);
    auto te = fd_slab_mode(thin, 10e-9, s.omega, Polarization::QuasiTE, 2.6e-6);
    auto tm = fd_slab_mode(thick, 10e-9, s.omega, Polarization::QuasiTM, 2.0e-6);
    diff.push_back(te.n_eff - tm.n_eff);
    s.modes = {te, tm};
    std::sort(s.modes.begin(), s.modes.end(),
              [](const ModeSolution& a, const ModeSolution& b) { return a.n_eff > b.n_eff; });
    samples.push_back(std::move(s));
  }
  ASSERT_LT(diff.front(), 0.0);
  ASSERT_GT(diff.back(), 0.0);
  const auto fams = track_families(samples);
  ASSERT_EQ(fams.size(), 2u);
  for (const auto& f : fams) {
    EXPECT_EQ(f.omega.size(), samples.size());
    for (const auto& m : f.modes) EXPECT_EQ(m.polarization, f.polarization);
  }
}

TEST(Tracking, SingleModeAndMissingSample) {
  const auto stack = slab(1.6, 400e-9);
  std::vector<OmegaSample> samples;
  for (int k = 0; k < 8; ++k) {
    OmegaSample s;
    s.omega = omega_from_wavelength(2.0e-6 - k * 0.1e-6);
    s.modes = {fd_slab_mode(stack, 10e-9, s.omega, Polarization::QuasiTE, 2e-6)};
    samples.push_back(std::move(s));
  }
  samples[4].failed = true;
  samples[4].error = "synthetic";
  samples[4].modes.clear();
  TrackingReport report;
  const auto fams = track_families(samples, &report);
  ASSERT_EQ(fams.size(), 1u);
  ASSERT_EQ(fams[0].gaps.size(), 1u);
  EXPECT_DOUBLE_EQ(fams[0].gaps[0], samples[4].omega);
  EXPECT_FALSE(report.issues.empty());
  for (std::size_t k = 1; k < fams[0].n_eff.size(); ++k) {
    EXPECT_LT(std::abs(fams[0].n_eff[k] - fams[0].n_eff[k - 1]), 0.01);
  }
}

TEST(SolvedGuide, TM00PhaseMatchesAtPointSixFive) {
  const auto solved = test_support::cached_families(test_support::guide_config());
  const auto& tm = family(solved, "TM00");
  EXPECT_LT(tm.n_eff.front(), 1.0 / 0.65);
  EXPECT_GT(tm.n_eff.back(), 1.0 / 0.65);
  for (std::size_t k = 0; k < tm.omega.size(); ++k) {
    EXPECT_GT(tm.n_g[k], tm.n_eff[k]);
    if (k > 0) EXPECT_LT(std::abs(tm.n_eff[k] - tm.n_eff[k - 1]), 0.02);
  }
}
