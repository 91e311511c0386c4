#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "fewg/constants.hpp"
#include "fewg/errors.hpp"
#include "fewg/waveform.hpp"

using namespace fewg;
using cplx = std::complex<double>;

namespace {

constexpr double v = 0.65 * constants::speed_of_light;
constexpr double v_g = 0.5 * constants::speed_of_light;
constexpr double L = 100e-6;

Envelope sampled(double (*fn)(double), int points = 1024) {
  Envelope e;
  for (int k = 0; k < points; ++k) {
    e.z.push_back(L * k / (points - 1));
    e.u.emplace_back(fn(e.z.back() / L), 0.0);
  }
  return e;
}

double hann(double s) { return std::pow(std::sin(constants::pi * s), 2); }

double ramp(double s) { return std::pow(s, 4) * hann(s); }

// Trapezoid of exp(i s^2 + i Q s - eps s^2) over s; converges to the
// Gaussian-phase integral as eps -> 0.
cplx damped_chirp(double Q, double eps) {
  const double S = std::sqrt(30.0 / eps);
  const int n = static_cast<int>(S * 2.0 / 2e-3);
  const double h = 2.0 * S / n;
  cplx sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double s = -S + k * h;
    sum += (k == 0 || k == n ? 0.5 : 1.0) * std::exp(cplx(-eps * s * s, s * s + Q * s));
  }
  return sum * h;
}

double max_abs(const WaveformResult& w) {
  double m = 0.0;
  for (const auto& p : w.phi) m = std::max(m, std::abs(p));
  return m;
}

double abs_at(const WaveformResult& w, double r) {
  const auto it = std::lower_bound(w.r_pulse.begin(), w.r_pulse.end(), r);
  const std::size_t k = std::clamp<std::size_t>(it - w.r_pulse.begin(), 1, w.r_pulse.size() - 1);
  const double t = (r - w.r_pulse[k - 1]) / (w.r_pulse[k] - w.r_pulse[k - 1]);
  return std::abs(w.phi[k - 1] + t * (w.phi[k] - w.phi[k - 1]));
}

}  // namespace

TEST(Kernel, MatchesDetuningIntegral) {
  // K = integral dD exp(i D a / v + i beta2 D^2 b / v_g). With p = beta2 b / v_g
  // and D = s / sqrt(p), K = p^-1/2 integral exp(i s^2 + i Q s) ds, Q = a / (v sqrt p).
  const double beta2 = 1e-25;
  const double z = 40e-6;
  const double r_par = 60e-6;
  const double p = beta2 * (r_par - z) / v_g;
  for (double Q : {0.0, 1.3, -2.1}) {
    const double a = Q * v * std::sqrt(p);
    const double r_pulse = z - (z - a) * v_g / v;
    // Linear extrapolation of the damped integral to eps = 0.
    const cplx I = 2.0 * damped_chirp(Q, 0.005) - damped_chirp(Q, 0.01);
    const cplx oracle = I / std::sqrt(p);
    const cplx K = stationary_phase_kernel(z, r_par, r_pulse, beta2, v, v_g);
    EXPECT_LT(std::abs(K - oracle) / std::abs(oracle), 0.01) << Q;
  }
}

TEST(Kernel, SignOfDispersionConjugates) {
  const cplx a = stationary_phase_kernel(30e-6, 80e-6, 5e-6, 2e-26, v, v_g);
  const cplx b = stationary_phase_kernel(30e-6, 80e-6, 5e-6, -2e-26, v, v_g);
  EXPECT_NEAR(std::abs(b - std::conj(a)) / std::abs(a), 0.0, 1e-12);
}

TEST(Kernel, MagnitudeScalesWithDispersionTimesDistance) {
  const double m1 = std::abs(stationary_phase_kernel(30e-6, 80e-6, 5e-6, 2e-26, v, v_g));
  const double m2 = std::abs(stationary_phase_kernel(30e-6, 80e-6, 5e-6, 8e-26, v, v_g));
  const double m3 = std::abs(stationary_phase_kernel(70e-6, 80e-6, 5e-6, 1e-25, v, v_g));
  EXPECT_NEAR(m1 / m2, 2.0, 1e-12);
  // 2e-26 * 50 um equals 1e-25 * 10 um.
  EXPECT_NEAR(m1 / m3, 1.0, 1e-12);
}

TEST(Kernel, SingularAndUndefinedInputs) {
  EXPECT_THROW(stationary_phase_kernel(30e-6, 30e-6, 0.0, 1e-26, v, v_g), SingularPoint);
  EXPECT_THROW(stationary_phase_kernel(30e-6, 60e-6, 0.0, 0.0, v, v_g), DomainError);
}

TEST(Waveform, RectangularEnvelopeDuration) {
  const auto env = window_envelope(WindowKind::Rectangular, L, 1024);
  WaveformOptions o;
  o.method = WaveformMethod::Delta;
  const auto w = synthesize_waveform(env, Routing(), v, v_g, 0.0, 1.2e15, o);
  const double T = L * std::abs(1.0 / v_g - 1.0 / v);
  EXPECT_NEAR(w.walkoff_duration, T, 1e-12 * T);
  EXPECT_NEAR(w.duration / T, 1.0, 0.05);
  EXPECT_LT(w.edge_ratio, 1e-3);
}

TEST(Waveform, NormalizedToUnitEnergy) {
  const auto w = synthesize_waveform(sampled(hann), Routing(), v, v_g, 0.0, 1.2e15);
  double e = 0.0;
  for (std::size_t k = 0; k + 1 < w.phi.size(); ++k) {
    e += 0.5 * (std::norm(w.phi[k]) + std::norm(w.phi[k + 1])) * (w.r_pulse[k + 1] - w.r_pulse[k]);
  }
  EXPECT_NEAR(e, 1.0, 1e-6);
  EXPECT_EQ(w.method, WaveformMethod::Delta);
}

TEST(Waveform, KernelAgreesWithDeltaAtSmallDispersion) {
  const auto env = sampled(hann);
  WaveformOptions o;
  o.method = WaveformMethod::Kernel;
  const auto k = synthesize_waveform(env, Routing(), v, v_g, 1e-18, 1.2e15, o);
  o.method = WaveformMethod::Delta;
  const auto d = synthesize_waveform(env, Routing(), v, v_g, 1e-18, 1.2e15, o);
  EXPECT_LT(k.kernel_ratio, o.switch_ratio);
  EXPECT_GE(std::abs(waveform_overlap(k, d)), 0.99);
}

TEST(Waveform, SymmetricEnvelopeGivesSymmetricPulse) {
  const auto w = synthesize_waveform(sampled(hann), Routing(), v, v_g, 0.0, 1.2e15);
  const double lo = -(v_g / v) * L;
  const double centre = 0.5 * lo;
  const double peak = max_abs(w);
  for (double x : {0.05, 0.2, 0.35, 0.45}) {
    EXPECT_NEAR(abs_at(w, centre + x * lo), abs_at(w, centre - x * lo), 2e-3 * peak) << x;
  }
}

TEST(Waveform, EnvelopeNodeGivesNull) {
  auto node = [](double s) { return (s - 0.3) * hann(s); };
  Envelope env;
  for (int k = 0; k < 1024; ++k) {
    env.z.push_back(L * k / 1023.0);
    env.u.emplace_back(node(env.z.back() / L), 0.0);
  }
  const auto w = synthesize_waveform(env, Routing(), v, v_g, 0.0, 1.2e15);
  const double r_node = 0.3 * L - (v_g / v) * 0.3 * L;
  EXPECT_LT(abs_at(w, r_node), 2e-3 * max_abs(w));
}

TEST(Waveform, RawEnergyIsJacobianWeightedEnvelopeIntegral) {
  // Delta limit: integral |phi|^2 dr = integral |u|^2 / |R' - v_g/v| dz.
  std::vector<double> zs;
  std::vector<double> rs;
  for (int k = 0; k <= 200; ++k) {
    const double z = L * k / 200.0;
    zs.push_back(z);
    rs.push_back(1.2 * z + 0.05 * L * std::sin(2.0 * constants::pi * z / L));
  }
  const auto env = sampled(hann, 2048);
  WaveformOptions o;
  // Error falls as the square of the pulse-frame spacing; 5.7e-6 at 4096.
  o.grid_points = 16384;
  for (const Routing& routing : {Routing(), Routing(zs, rs)}) {
    const auto w = synthesize_waveform(env, routing, v, v_g, 0.0, 1.2e15, o);
    double oracle = 0.0;
    const int n = 400000;
    for (int k = 0; k <= n; ++k) {
      const double z = L * k / n;
      oracle += (k == 0 || k == n ? 0.5 : 1.0) * std::norm(env.at(z)) /
                std::abs(routing.derivative(z) - v_g / v);
    }
    oracle *= L / n;
    EXPECT_NEAR(w.raw_energy / oracle, 1.0, 1e-6);
  }
}

TEST(Waveform, DegeneratePhaseMatchingReported) {
  WaveformOptions o;
  o.method = WaveformMethod::Delta;
  EXPECT_THROW(synthesize_waveform(sampled(hann), Routing(), v, v, 0.0, 1.2e15, o),
               DegeneratePhaseMatching);
  // Routing whose slope passes through v_g / v mid-guide.
  std::vector<double> zs;
  std::vector<double> rs;
  for (int k = 0; k <= 200; ++k) {
    const double z = L * k / 200.0;
    zs.push_back(z);
    rs.push_back(v_g / v * z + 0.5 * std::pow(z - 0.5 * L, 2) / L);
  }
  EXPECT_THROW(synthesize_waveform(sampled(hann), Routing(zs, rs), v, v_g, 0.0, 1.2e15, o),
               DegeneratePhaseMatching);
}

TEST(Waveform, ShortEnvelopeRejected) {
  EXPECT_THROW(synthesize_waveform(sampled(hann, 100), Routing(), v, v_g, 0.0, 1.2e15),
               DomainError);
}

TEST(WaveformOverlap, SelfAndReversed) {
  const auto a = synthesize_waveform(sampled(ramp), Routing(), v, v_g, 0.0, 1.2e15);
  EXPECT_NEAR(std::abs(waveform_overlap(a, a)), 1.0, 1e-12);
  const auto b = synthesize_waveform(sampled([](double s) { return ramp(1.0 - s); }), Routing(), v,
                                     v_g, 0.0, 1.2e15);
  EXPECT_LT(std::abs(waveform_overlap(a, b, true)), 0.99);
}

TEST(WaveformOverlap, DifferentGroupVelocityAfterAlignment) {
  const auto env = sampled(hann);
  const auto a = synthesize_waveform(env, Routing(), v, v_g, 0.0, 1.2e15);
  const auto b = synthesize_waveform(env, Routing(), v, 0.55 * constants::speed_of_light, 0.0,
                                     1.2e15);
  ASSERT_NE(a.duration, b.duration);
  const double o = std::abs(waveform_overlap(a, b, true));
  EXPECT_LT(o, 0.999);
  EXPECT_GT(o, 0.5);
}

TEST(WaveformOverlap, DisjointGridsRejected) {
  auto a = synthesize_waveform(sampled(hann), Routing(), v, v_g, 0.0, 1.2e15);
  auto b = a;
  for (auto& r : b.r_pulse) r += 1.0;
  EXPECT_THROW(waveform_overlap(a, b), GridMismatch);
}
