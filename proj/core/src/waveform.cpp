#include "fewg/waveform.hpp"

#include <algorithm>
#include <cmath>

#include "fewg/constants.hpp"
#include "fewg/errors.hpp"
#include "fewg/window.hpp"

namespace fewg {

namespace {

using cplx = std::complex<double>;

double trapezoid_abs2(const std::vector<double>& x, const std::vector<cplx>& y) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    s += 0.5 * (std::norm(y[k]) + std::norm(y[k + 1])) * (x[k + 1] - x[k]);
  }
  return s;
}

// Pulse-frame coordinate reached by emission at z: R(z) - (v_g / v) z.
double pulse_coordinate(const Routing& routing, double z, double v, double v_g) {
  return routing.value(z) - v_g / v * z;
}

double feature_scale(const Envelope& env) {
  double peak = 0.0;
  double slope = 0.0;
  for (std::size_t k = 0; k < env.z.size(); ++k) {
    peak = std::max(peak, std::abs(env.u[k]));
    if (k + 1 < env.z.size()) {
      slope = std::max(slope, std::abs(env.u[k + 1] - env.u[k]) / (env.z[k + 1] - env.z[k]));
    }
  }
  const double L = env.length();
  return slope > 0.0 ? std::min(L, peak / slope) : L;
}

std::vector<cplx> delta_path(const Envelope& env, const Routing& routing, double v,
                             double v_g, const std::vector<double>& grid) {
  const std::size_t n = std::max<std::size_t>(4 * env.z.size(), 2048);
  const double z0 = env.z.front();
  const double z1 = env.z.back();
  std::vector<double> zs(n);
  std::vector<double> rs(n);
  for (std::size_t k = 0; k < n; ++k) {
    zs[k] = z0 + (z1 - z0) * static_cast<double>(k) / static_cast<double>(n - 1);
    rs[k] = pulse_coordinate(routing, zs[k], v, v_g);
  }
  // A stationary point of the pulse coordinate inside the support is a
  // caustic of the delta map.
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(env.at(zs[k])) == 0.0) continue;
    const double d = routing.derivative(zs[k]) - v_g / v;
    if (std::abs(d) < 1e-6 || d * prev < 0.0) {
      throw DegeneratePhaseMatching("R'(z) = v_g / v near z = " + std::to_string(zs[k]) +
                                    " m (infinite phase-matching bandwidth)");
    }
    prev = d;
  }
  auto contribution = [&](double z) {
    const double jac = std::abs(routing.derivative(z) - v_g / v);
    if (jac < 1e-6) {
      throw DegeneratePhaseMatching("R'(z) = v_g / v at z = " + std::to_string(z) +
                                    " m (infinite phase-matching bandwidth)");
    }
    return std::conj(env.at(z)) / jac;
  };
  std::vector<cplx> phi(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double target = grid[j];
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double ga = rs[k] - target;
      const double gb = rs[k + 1] - target;
      if (ga == 0.0) {
        phi[j] += contribution(zs[k]);
      } else if (ga * gb < 0.0) {
        double a = zs[k];
        double b = zs[k + 1];
        const bool rising = gb > 0.0;
        for (int it = 0; it < 100 && b - a > 1e-15 * (z1 - z0); ++it) {
          const double m = 0.5 * (a + b);
          const bool above = pulse_coordinate(routing, m, v, v_g) > target;
          (above == rising ? b : a) = m;
        }
        phi[j] += contribution(0.5 * (a + b));
      }
      if (k + 2 == n && gb == 0.0) phi[j] += contribution(zs[k + 1]);
    }
  }
  return phi;
}

// Kernel path in the detuning domain: G(D) is the z-quadrature of the
// conjugated envelope against exp(i D (z/v - R/v_g) + i beta2 D^2 (r - R)/v_g),
// and phi is its Fourier sum on a zero-padded periodic pulse-frame domain.
std::vector<cplx> kernel_path(const Envelope& env, const Routing& routing, double v,
                              double v_g, double beta2, const std::vector<double>& grid) {
  const std::size_t n = grid.size();
  const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
  const std::size_t m = 4 * n;
  const double period = static_cast<double>(m) * h;
  const double dD = 2.0 * constants::pi * v_g / period;
  const long half = static_cast<long>(m / 2);
  const double d_max = dD * static_cast<double>(half);

  const double z0 = env.z.front();
  const double z1 = env.z.back();
  const double r_obs = routing.value(z1);
  // Largest phase rate in z over the detuning range sets the z sampling.
  double walk = 0.0;
  double slope = 0.0;
  for (std::size_t k = 0; k < env.z.size(); ++k) {
    const double d = routing.derivative(env.z[k]);
    walk = std::max(walk, std::abs(1.0 / v - d / v_g));
    slope = std::max(slope, std::abs(d));
  }
  const double rate = d_max * walk + std::abs(beta2) * d_max * d_max * slope / v_g;
  const double cycles = rate * (z1 - z0) / (2.0 * constants::pi);
  const std::size_t nz = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(12.0 * cycles)), 4 * env.z.size(), 400000);

  std::vector<cplx> G(m, 0.0);
  for (std::size_t iz = 0; iz < nz; ++iz) {
    const double z = z0 + (z1 - z0) * static_cast<double>(iz) / static_cast<double>(nz - 1);
    const double w = (iz == 0 || iz + 1 == nz ? 0.5 : 1.0) * (z1 - z0) / static_cast<double>(nz - 1);
    const double R = routing.value(z);
    const double a = dD * (z / v - R / v_g);
    const double g = beta2 * dD * dD * (r_obs - R) / v_g;
    // phase(k) = k a + k^2 g, stepped by recurrence from k = -half.
    const double k0 = -static_cast<double>(half);
    cplx val = std::conj(env.at(z)) * w * std::polar(1.0, k0 * a + k0 * k0 * g);
    cplx step = std::polar(1.0, a + g * (2.0 * k0 + 1.0));
    const cplx rot = std::polar(1.0, 2.0 * g);
    for (std::size_t k = 0; k < m; ++k) {
      G[k] += val;
      val *= step;
      step *= rot;
    }
  }

  std::vector<cplx> phi(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double th = dD * grid[j] / v_g;
    const double k0 = -static_cast<double>(half);
    cplx e = std::polar(1.0, k0 * th);
    const cplx step = std::polar(1.0, th);
    cplx s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      s += G[k] * e;
      e *= step;
    }
    phi[j] = s * dD / (2.0 * constants::pi);
  }
  return phi;
}

}  // namespace

std::complex<double> stationary_phase_kernel(double z, double r_par, double r_pulse,
                                             double beta2, double v, double v_g,
                                             const Routing& routing) {
  if (beta2 == 0.0) throw DomainError("beta2 = 0: use the delta-kernel path");
  const double R = routing.value(z);
  const double b = r_par - R;
  if (b == 0.0) throw SingularPoint("kernel is singular at r_par = R(z)");
  const double a = z - v / v_g * (R - r_pulse);
  const double c = beta2 * b;
  const double mag = std::sqrt(constants::pi * v_g / std::abs(c));
  const double phase = (c > 0.0 ? 0.25 : -0.25) * constants::pi - a * a * v_g / (4.0 * v * v * c);
  return std::polar(mag, phase);
}

std::complex<double> Envelope::at(double zq) const {
  if (z.empty() || zq < z.front() || zq > z.back()) return 0.0;
  const auto it = std::upper_bound(z.begin(), z.end(), zq);
  if (it == z.end()) return u.back();
  const std::size_t k = static_cast<std::size_t>(it - z.begin());
  if (k == 0) return u.front();
  const double t = (zq - z[k - 1]) / (z[k] - z[k - 1]);
  return u[k - 1] + t * (u[k] - u[k - 1]);
}

Envelope window_envelope(WindowKind kind, double length, int points, double amplitude) {
  if (points < 2) throw DomainError("envelope needs >= 2 samples");
  Envelope e;
  for (int k = 0; k < points; ++k) {
    const double s = static_cast<double>(k) / (points - 1);
    e.z.push_back(s * length);
    e.u.emplace_back(amplitude * window_profile(kind, s), 0.0);
  }
  return e;
}

WaveformResult synthesize_waveform(const Envelope& envelope, const Routing& routing,
                                   double v, double v_g, double beta2, double omega_m,
                                   const WaveformOptions& options) {
  if (envelope.z.size() < 512) throw DomainError("envelope needs >= 512 samples");
  if (envelope.z.size() != envelope.u.size()) throw DomainError("envelope size mismatch");
  if (!std::is_sorted(envelope.z.begin(), envelope.z.end())) {
    throw DomainError("envelope samples must be ascending in z");
  }
  if (!(v > 0.0) || !(v_g > 0.0)) throw DomainError("velocities must be > 0");
  if (options.grid_points < 16) throw DomainError("pulse-frame grid needs >= 16 points");

  WaveformResult r;
  r.omega_m = omega_m;
  r.beta2 = beta2;
  r.v = v;
  r.v_g = v_g;
  r.routing = routing;
  const double L = envelope.length();
  r.walkoff_duration = L * std::abs(1.0 / v_g - 1.0 / v);

  double lo = pulse_coordinate(routing, envelope.z.front(), v, v_g);
  double hi = lo;
  for (double z : envelope.z) {
    const double p = pulse_coordinate(routing, z, v, v_g);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  const double span = hi - lo;
  if (!(span > 0.0)) throw DegeneratePhaseMatching("pulse-frame span is zero");
  r.r_pulse.resize(options.grid_points);
  for (int j = 0; j < options.grid_points; ++j) {
    const double s = options.grid_lo + (options.grid_hi - options.grid_lo) * j / (options.grid_points - 1);
    r.r_pulse[j] = lo + s * span;
  }

  const double b_max = std::abs(routing.value(envelope.z.back()) - routing.value(envelope.z.front()));
  const double width = std::sqrt(4.0 * std::abs(beta2) * b_max * v * v / v_g);
  r.kernel_ratio = width / feature_scale(envelope);
  r.method = options.method;
  if (r.method == WaveformMethod::Auto) {
    r.method = r.kernel_ratio < options.switch_ratio ? WaveformMethod::Delta : WaveformMethod::Kernel;
  }
  r.phi = r.method == WaveformMethod::Delta
              ? delta_path(envelope, routing, v, v_g, r.r_pulse)
              : kernel_path(envelope, routing, v, v_g, beta2, r.r_pulse);

  r.raw_energy = trapezoid_abs2(r.r_pulse, r.phi);
  if (!(r.raw_energy > 0.0)) throw DomainError("waveform has zero energy");
  const double norm = std::sqrt(r.raw_energy);
  for (auto& p : r.phi) p /= norm;

  double peak = 0.0;
  for (const auto& p : r.phi) peak = std::max(peak, std::abs(p));
  r.edge_ratio = std::max(std::abs(r.phi.front()), std::abs(r.phi.back())) / peak;
  const double half_max = 0.5 * peak;
  std::size_t first = 0;
  while (std::abs(r.phi[first]) < half_max) ++first;
  std::size_t last = r.phi.size() - 1;
  while (std::abs(r.phi[last]) < half_max) --last;
  auto cross = [&](std::size_t inside, std::size_t outside) {
    const double a = std::abs(r.phi[outside]);
    const double b = std::abs(r.phi[inside]);
    const double t = b == a ? 0.0 : (half_max - a) / (b - a);
    return r.r_pulse[outside] + t * (r.r_pulse[inside] - r.r_pulse[outside]);
  };
  const double left = first == 0 ? r.r_pulse.front() : cross(first, first - 1);
  const double right = last + 1 == r.phi.size() ? r.r_pulse.back() : cross(last, last + 1);
  r.duration = (right - left) / v_g;
  return r;
}

std::complex<double> waveform_overlap(const WaveformResult& a, const WaveformResult& b,
                                      bool align) {
  if (a.r_pulse.size() < 2 || b.r_pulse.size() < 2) throw GridMismatch("empty waveform grid");
  auto centroid = [](const WaveformResult& w) {
    double s = 0.0;
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < w.r_pulse.size(); ++k) {
      const double h = w.r_pulse[k + 1] - w.r_pulse[k];
      const double pa = std::norm(w.phi[k]);
      const double pb = std::norm(w.phi[k + 1]);
      s += 0.5 * (pa + pb) * h;
      m += 0.5 * (pa * w.r_pulse[k] + pb * w.r_pulse[k + 1]) * h;
    }
    return m / s;
  };
  const double shift = align ? centroid(a) - centroid(b) : 0.0;
  const double b_lo = b.r_pulse.front() + shift;
  const double b_hi = b.r_pulse.back() + shift;
  if (b_hi < a.r_pulse.front() || b_lo > a.r_pulse.back()) {
    throw GridMismatch("waveform grids do not overlap");
  }
  std::vector<cplx> bs(a.r_pulse.size(), 0.0);
  for (std::size_t k = 0; k < a.r_pulse.size(); ++k) {
    const double x = a.r_pulse[k] - shift;
    if (x < b.r_pulse.front() || x > b.r_pulse.back()) continue;
    auto it = std::upper_bound(b.r_pulse.begin(), b.r_pulse.end(), x);
    std::size_t i = static_cast<std::size_t>(it - b.r_pulse.begin());
    if (i >= b.r_pulse.size()) i = b.r_pulse.size() - 1;
    if (i == 0) i = 1;
    const double t = (x - b.r_pulse[i - 1]) / (b.r_pulse[i] - b.r_pulse[i - 1]);
    bs[k] = b.phi[i - 1] + t * (b.phi[i] - b.phi[i - 1]);
  }
  cplx ip = 0.0;
  for (std::size_t k = 0; k + 1 < a.r_pulse.size(); ++k) {
    const double h = a.r_pulse[k + 1] - a.r_pulse[k];
    ip += 0.5 * h * (std::conj(a.phi[k]) * bs[k] + std::conj(a.phi[k + 1]) * bs[k + 1]);
  }
  const double na = trapezoid_abs2(a.r_pulse, a.phi);
  const double nb = trapezoid_abs2(a.r_pulse, bs);
  if (!(na > 0.0) || !(nb > 0.0)) throw GridMismatch("resampled waveform is empty");
  return ip / std::sqrt(na * nb);
}

std::string to_string(WaveformMethod method) {
  switch (method) {
    case WaveformMethod::Auto: return "auto";
    case WaveformMethod::Kernel: return "kernel";
    case WaveformMethod::Delta: return "delta";
  }
  return "auto";
}

WaveformMethod waveform_method_from_string(const std::string& name) {
  if (name == "auto") return WaveformMethod::Auto;
  if (name == "kernel") return WaveformMethod::Kernel;
  if (name == "delta") return WaveformMethod::Delta;
  throw ConfigError("waveform.method must be auto, kernel or delta");
}

}  // namespace fewg
