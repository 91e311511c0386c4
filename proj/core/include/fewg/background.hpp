#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fewg/beam.hpp"
#include "fewg/material.hpp"

namespace fewg {

enum class BackgroundModel { None, FrankTamm, PlanarInterface };

BackgroundModel background_model_from_string(const std::string& name);
std::string to_string(BackgroundModel model);

/// (alpha L / c)(1 - 1/(beta n)^2) above threshold, exactly 0 otherwise.
/// Emission of an electron travelling inside a transparent medium, in s.
double frank_tamm_density(double n, double beta, double length);

/// Fresnel coefficients at the vacuum side of a stack, for in-plane
/// wavenumber k_par. Vertical wavenumbers take the branch with Im >= 0.
std::complex<double> fresnel_rs(double eps, double k0, double k_par);
std::complex<double> fresnel_rp(double eps, double k0, double k_par);
/// Vacuum / film (thickness t) / substrate.
std::complex<double> film_rs(std::complex<double> eps_film, double eps_sub,
                             double t, double k0, double k_par);
std::complex<double> film_rp(std::complex<double> eps_film, double eps_sub,
                             double t, double k0, double k_par);

/// Loss density of an electron moving at height `gap` above a semi-infinite
/// lossless substrate of index n. Non-zero only above the Cherenkov
/// threshold beta n > 1. Throws QuadratureFailure if the adaptive rule does
/// not reach 1e-6 relative accuracy.
double planar_interface_density(double n, double omega, double beta, double gap,
                                double length);

struct ThinFilm {
  std::string film_material = "Si3N4";
  std::string substrate_material = "SiO2";
  double thickness = 650e-9;
};

/// Loss density above a lossless film on a substrate: substrate radiation
/// above threshold plus emission into the film's guided slab modes.
double thin_film_density(const ThinFilm& film, const MaterialLibrary& materials,
                         double omega, const BeamParams& beam);

/// Band integral of thin_film_density between two vacuum wavelengths.
double thin_film_emission(const ThinFilm& film, const MaterialLibrary& materials,
                          const BeamParams& beam, double lambda_min, double lambda_max);

struct ThinFilmComparison {
  double film_strength = 0.0;
  double waveguide_strength = 0.0;
  double ratio = 0.0;
  std::string caveat;
};

ThinFilmComparison thin_film_comparison(double film_strength, double waveguide_strength);

/// Background density along an omega grid for the substrate material.
std::vector<double> background_spectrum(BackgroundModel model, const Material& substrate,
                                        const BeamParams& beam,
                                        const std::vector<double>& omega);

}  // namespace fewg
