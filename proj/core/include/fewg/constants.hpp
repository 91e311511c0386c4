#pragma once

#include <numbers>

namespace fewg::constants {

// CODATA 2018. The vacuum permittivity is derived from the fine-structure
// constant so that alpha = e^2 / (4 pi eps0 hbar c) holds to rounding.
inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0;            // m/s
inline constexpr double hbar = 1.054571817e-34;                  // J s
inline constexpr double elementary_charge = 1.602176634e-19;     // C
inline constexpr double fine_structure_alpha = 7.2973525693e-3;  // -
inline constexpr double electron_rest_energy_eV = 510998.95;     // eV
inline constexpr double vacuum_permittivity =
    elementary_charge * elementary_charge /
    (4.0 * pi * fine_structure_alpha * hbar * speed_of_light);   // F/m

/// hbar in eV s; converts angular frequency to photon energy.
inline constexpr double hbar_eV_s = hbar / elementary_charge;

}  // namespace fewg::constants

namespace fewg {

inline constexpr double omega_from_eV(double energy_eV) {
  return energy_eV / constants::hbar_eV_s;
}
inline constexpr double eV_from_omega(double omega) {
  return omega * constants::hbar_eV_s;
}
inline constexpr double omega_from_wavelength(double lambda_m) {
  return 2.0 * constants::pi * constants::speed_of_light / lambda_m;
}
inline constexpr double wavelength_from_omega(double omega) {
  return 2.0 * constants::pi * constants::speed_of_light / omega;
}

}  // namespace fewg
