#include "fewg/slab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/tools/roots.hpp>

#include "fewg/errors.hpp"

namespace fewg {

double SlabStack::max_cladding_eps() const { return std::max(eps_lower, eps_upper); }

double SlabStack::max_eps() const {
  double m = max_cladding_eps();
  for (const auto& l : layers) m = std::max(m, l.eps);
  return m;
}

double slab_characteristic(const SlabStack& stack, SlabPolarization pol,
                           double k0, double n_eff) {
  const double beta2 = n_eff * n_eff * k0 * k0;
  auto weight = [pol](double eps) { return pol == SlabPolarization::TM ? eps : 1.0; };

  // State (psi, flux) with flux = psi' / p, p = 1 (TE) or eps (TM); both are
  // continuous across interfaces.
  const double g_lower = std::sqrt(std::max(0.0, beta2 - stack.eps_lower * k0 * k0));
  double psi = 1.0;
  double flux = g_lower / weight(stack.eps_lower);
  for (const auto& layer : stack.layers) {
    const double p = weight(layer.eps);
    const double kk = layer.eps * k0 * k0 - beta2;
    const double d = layer.thickness;
    double a, b, c;  // [psi; flux] <- [a, b; c, a] [psi; flux]
    if (kk > 0.0) {
      const double k = std::sqrt(kk);
      a = std::cos(k * d);
      b = p * (k * d == 0.0 ? d : std::sin(k * d) / k);
      c = -(k / p) * std::sin(k * d);
    } else if (kk < 0.0) {
      const double g = std::sqrt(-kk);
      a = std::cosh(g * d);
      b = p * (g * d == 0.0 ? d : std::sinh(g * d) / g);
      c = (g / p) * std::sinh(g * d);
    } else {
      a = 1.0;
      b = p * d;
      c = 0.0;
    }
    const double np = a * psi + b * flux;
    const double nf = c * psi + a * flux;
    // Keep magnitudes bounded; only the sign and roots matter.
    const double scale = std::max(std::abs(np), std::abs(nf) / k0);
    psi = np / (scale > 0.0 ? scale : 1.0);
    flux = nf / (scale > 0.0 ? scale : 1.0);
  }
  const double g_upper = std::sqrt(std::max(0.0, beta2 - stack.eps_upper * k0 * k0));
  return (flux + g_upper / weight(stack.eps_upper) * psi) / k0;
}

std::vector<double> slab_modes(const SlabStack& stack, SlabPolarization pol,
                               double k0, int scan_points) {
  if (scan_points < 10) throw DomainError("slab_modes needs >= 10 scan points");
  const double n_lo = std::sqrt(stack.max_cladding_eps());
  const double n_hi = std::sqrt(stack.max_eps());
  std::vector<double> roots;
  if (!(n_hi > n_lo)) return roots;

  auto f = [&](double n) { return slab_characteristic(stack, pol, k0, n); };
  const double span = n_hi - n_lo;
  const double edge = 1e-12 * n_hi;
  double prev_n = n_hi - edge;
  double prev_f = f(prev_n);
  for (int k = 1; k <= scan_points; ++k) {
    const double n = n_hi - edge - (span - 2.0 * edge) * k / scan_points;
    const double fn = f(n);
    if (prev_f == 0.0) {
      roots.push_back(prev_n);
    } else if (std::signbit(prev_f) != std::signbit(fn) && fn != 0.0) {
      std::uintmax_t iters = 200;
      auto tol = [](double a, double b) {
        return std::abs(a - b) <= 1e-15 * std::max(std::abs(a), std::abs(b));
      };
      const auto r = boost::math::tools::toms748_solve(f, n, prev_n, fn, prev_f, tol, iters);
      roots.push_back(0.5 * (r.first + r.second));
    }
    prev_n = n;
    prev_f = fn;
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

}  // namespace fewg
