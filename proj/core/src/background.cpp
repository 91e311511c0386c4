#include "fewg/background.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fewg/constants.hpp"
#include "fewg/errors.hpp"
#include "fewg/slab.hpp"

namespace fewg {

namespace {

using cplx = std::complex<double>;

cplx vertical_k(cplx eps, double k0, double k_par) {
  cplx k = std::sqrt(eps * (k0 * k0) - cplx(k_par * k_par, 0.0));
  if (k.imag() < 0.0 || (k.imag() == 0.0 && k.real() < 0.0)) k = -k;
  return k;
}

cplx airy(cplx r12, cplx r23, cplx k2, double t) {
  const cplx ph = std::exp(cplx(0.0, 2.0) * k2 * t);
  return (r12 + r23 * ph) / (1.0 + r12 * r23 * ph);
}

// Kernel of the loss integral at lateral wavenumber q, without prefactor.
struct Kernel {
  double omega;
  double beta;
  double gap;

  double k0() const { return omega / constants::speed_of_light; }
  double kz() const { return omega / (beta * constants::speed_of_light); }
  double kappa(double q) const {
    const double g = std::sqrt(1.0 - beta * beta);
    const double a = kz() * g;  // omega / (v gamma)
    return std::sqrt(q * q + a * a);
  }
  double k_par(double q) const { return std::sqrt(q * q + kz() * kz()); }
  // e^{-2 kappa d} / (kappa k_par^2) * Im[r_p kappa^2 + r_s beta^2 q^2]
  double value(double q, cplx rs, cplx rp) const {
    const double kap = kappa(q);
    const double kp = k_par(q);
    const double im = (rp * (kap * kap) + rs * (beta * beta * q * q)).imag();
    return std::exp(-2.0 * kap * gap) / (kap * kp * kp) * im;
  }
  double prefactor(double length) const {
    const double v = beta * constants::speed_of_light;
    return constants::fine_structure_alpha * constants::speed_of_light * length /
           (constants::pi * v * v);
  }
};

// 2 * integral_0^qmax f(q) dq with q = qmax sin(theta) to smooth the
// square-root edge of the radiation cone.
double radiation_integral(const std::function<double(double)>& f, double q_max) {
  if (!(q_max > 0.0)) return 0.0;
  auto g = [&](double th) { return f(q_max * std::sin(th)) * q_max * std::cos(th); };
  double err = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      g, 0.0, 0.5 * constants::pi, 20, 1e-10, &err);
  if (!std::isfinite(val) || err > 1e-6 * std::abs(val) + 1e-300) {
    throw QuadratureFailure("loss integral did not converge (estimate " +
                            std::to_string(val) + ", error " + std::to_string(err) + ")");
  }
  return 2.0 * val;
}

}  // namespace

BackgroundModel background_model_from_string(const std::string& name) {
  if (name == "none") return BackgroundModel::None;
  if (name == "bulk-frank-tamm" || name == "frank-tamm") return BackgroundModel::FrankTamm;
  if (name == "planar-interface") return BackgroundModel::PlanarInterface;
  throw ConfigError("background.model must be none, bulk-frank-tamm or planar-interface");
}

std::string to_string(BackgroundModel model) {
  switch (model) {
    case BackgroundModel::None: return "none";
    case BackgroundModel::FrankTamm: return "bulk-frank-tamm";
    case BackgroundModel::PlanarInterface: return "planar-interface";
  }
  return "none";
}

double frank_tamm_density(double n, double beta, double length) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  const double bn = beta * n;
  if (!(bn > 1.0)) return 0.0;
  return constants::fine_structure_alpha * length / constants::speed_of_light *
         (1.0 - 1.0 / (bn * bn));
}

std::complex<double> fresnel_rs(double eps, double k0, double k_par) {
  const cplx k1 = vertical_k(1.0, k0, k_par);
  const cplx k2 = vertical_k(eps, k0, k_par);
  return (k1 - k2) / (k1 + k2);
}

std::complex<double> fresnel_rp(double eps, double k0, double k_par) {
  const cplx k1 = vertical_k(1.0, k0, k_par);
  const cplx k2 = vertical_k(eps, k0, k_par);
  return (eps * k1 - k2) / (eps * k1 + k2);
}

std::complex<double> film_rs(std::complex<double> eps_film, double eps_sub, double t,
                             double k0, double k_par) {
  const cplx k1 = vertical_k(1.0, k0, k_par);
  const cplx k2 = vertical_k(eps_film, k0, k_par);
  const cplx k3 = vertical_k(eps_sub, k0, k_par);
  return airy((k1 - k2) / (k1 + k2), (k2 - k3) / (k2 + k3), k2, t);
}

std::complex<double> film_rp(std::complex<double> eps_film, double eps_sub, double t,
                             double k0, double k_par) {
  const cplx k1 = vertical_k(1.0, k0, k_par);
  const cplx k2 = vertical_k(eps_film, k0, k_par);
  const cplx k3 = vertical_k(eps_sub, k0, k_par);
  const cplx r12 = (eps_film * k1 - k2) / (eps_film * k1 + k2);
  const cplx r23 = (eps_sub * k2 - eps_film * k3) / (eps_sub * k2 + eps_film * k3);
  return airy(r12, r23, k2, t);
}

double planar_interface_density(double n, double omega, double beta, double gap,
                                double length) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  if (!(gap > 0.0)) throw DomainError("gap must be > 0");
  const Kernel k{omega, beta, gap};
  const double k0 = k.k0();
  const double bn = beta * n;
  if (!(bn > 1.0)) return 0.0;
  const double eps = n * n;
  // Vertical wavenumbers from q directly: k1 = i kappa in vacuum and
  // k2 = sqrt(q_max^2 - q^2) in the substrate. Avoids cancellation near the
  // threshold where q_max -> 0.
  const double q_max = k0 * std::sqrt((bn - 1.0) * (bn + 1.0)) / beta;
  auto f = [&](double q) {
    const cplx k1(0.0, k.kappa(q));
    const cplx k2(std::sqrt(std::max(0.0, (q_max - q) * (q_max + q))), 0.0);
    return k.value(q, (k1 - k2) / (k1 + k2), (eps * k1 - k2) / (eps * k1 + k2));
  };
  return k.prefactor(length) * radiation_integral(f, q_max);
}

double thin_film_density(const ThinFilm& film, const MaterialLibrary& materials,
                         double omega, const BeamParams& beam) {
  beam.validate();
  if (!(film.thickness >= 0.0)) throw DomainError("film thickness must be >= 0");
  const double eps_f = materials.get(film.film_material).permittivity(omega);
  const double eps_s = materials.get(film.substrate_material).permittivity(omega);
  const Kernel k{omega, beam.beta, beam.gap};
  const double k0 = k.k0();
  const double t = film.thickness;

  // Substrate radiation continuum.
  double integral = 0.0;
  const double q2 = eps_s * k0 * k0 - k.kz() * k.kz();
  if (q2 > 0.0) {
    auto f = [&](double q) {
      const double kp = k.k_par(q);
      return k.value(q, film_rs(eps_f, eps_s, t, k0, kp), film_rp(eps_f, eps_s, t, k0, kp));
    };
    integral += radiation_integral(f, std::sqrt(q2));
  }

  // Guided slab modes: Im r = pi Res delta(k_par - k_p).
  if (t > 0.0) {
    SlabStack stack;
    stack.eps_lower = eps_s;
    stack.eps_upper = 1.0;
    stack.layers = {{eps_f, t}};
    for (SlabPolarization pol : {SlabPolarization::TE, SlabPolarization::TM}) {
      for (double n_mode : slab_modes(stack, pol, k0, 1000)) {
        const double kp = n_mode * k0;
        const double qp2 = kp * kp - k.kz() * k.kz();
        if (!(qp2 > 0.0)) continue;
        const double qp = std::sqrt(qp2);
        auto r = [&](double x) {
          return pol == SlabPolarization::TE ? film_rs(eps_f, eps_s, t, k0, x)
                                             : film_rp(eps_f, eps_s, t, k0, x);
        };
        // Residue from the reciprocal, which is analytic through the pole.
        const double h = 1e-6 * kp;
        const cplx slope = (1.0 / r(kp + h) - 1.0 / r(kp - h)) / (2.0 * h);
        const double residue = (1.0 / slope).real();
        const double kap = k.kappa(qp);
        const double w = pol == SlabPolarization::TM ? kap * kap : beam.beta * beam.beta * qp2;
        integral += 2.0 * constants::pi * residue * std::exp(-2.0 * kap * beam.gap) /
                    (kap * kp * kp) * w * kp / qp;
      }
    }
  }
  return k.prefactor(beam.length) * integral;
}

double thin_film_emission(const ThinFilm& film, const MaterialLibrary& materials,
                          const BeamParams& beam, double lambda_min, double lambda_max) {
  const double w_lo = omega_from_wavelength(lambda_max);
  const double w_hi = omega_from_wavelength(lambda_min);

  // Breakpoints where a slab mode or the substrate crosses n = 1 / beta; the
  // density has integrable square-root edges there.
  auto above = [&](double w) {
    const double k0 = w / constants::speed_of_light;
    const double eps_f = materials.get(film.film_material).permittivity(w);
    const double eps_s = materials.get(film.substrate_material).permittivity(w);
    int count = std::sqrt(eps_s) * beam.beta > 1.0 ? 1 : 0;
    if (film.thickness > 0.0) {
      SlabStack stack;
      stack.eps_lower = eps_s;
      stack.layers = {{eps_f, film.thickness}};
      for (SlabPolarization pol : {SlabPolarization::TE, SlabPolarization::TM}) {
        for (double n : slab_modes(stack, pol, k0, 1000)) count += n * beam.beta > 1.0;
      }
    }
    return count;
  };
  std::vector<double> breaks{w_lo};
  const int scan = 400;
  int prev = above(w_lo);
  double prev_w = w_lo;
  for (int s = 1; s <= scan; ++s) {
    const double w = w_lo + (w_hi - w_lo) * s / scan;
    const int c = above(w);
    if (c != prev) {
      double a = prev_w;
      double b = w;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + b);
        (above(m) == prev ? a : b) = m;
      }
      breaks.push_back(0.5 * (a + b));
    }
    prev = c;
    prev_w = w;
  }
  breaks.push_back(w_hi);

  boost::math::quadrature::tanh_sinh<double> ts(12);
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    if (!(breaks[s + 1] > breaks[s])) continue;
    auto f = [&](double w) { return thin_film_density(film, materials, w, beam); };
    double err = 0.0;
    total += ts.integrate(f, breaks[s], breaks[s + 1], 1e-8, &err);
  }
  return total;
}

ThinFilmComparison thin_film_comparison(double film_strength, double waveguide_strength) {
  ThinFilmComparison c;
  c.film_strength = film_strength;
  c.waveguide_strength = waveguide_strength;
  if (!(waveguide_strength > 0.0)) throw DomainError("waveguide strength must be > 0");
  c.ratio = film_strength / waveguide_strength;
  c.caveat =
      "film emission from Fresnel-pole slab modes plus substrate radiation; "
      "waveguide strength from semi-vectorial modes; material data and model "
      "differences dominate the uncertainty";
  return c;
}

std::vector<double> background_spectrum(BackgroundModel model, const Material& substrate,
                                        const BeamParams& beam,
                                        const std::vector<double>& omega) {
  std::vector<double> out(omega.size(), 0.0);
  for (std::size_t k = 0; k < omega.size(); ++k) {
    const double n = substrate.refractive_index(omega[k]);
    switch (model) {
      case BackgroundModel::None: break;
      case BackgroundModel::FrankTamm:
        out[k] = frank_tamm_density(n, beam.beta, beam.length);
        break;
      case BackgroundModel::PlanarInterface:
        out[k] = planar_interface_density(n, omega[k], beam.beta, beam.gap, beam.length);
        break;
    }
  }
  return out;
}

}  // namespace fewg
