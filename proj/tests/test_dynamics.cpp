#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ncqm/dynamics.hpp"
#include "ncqm/experiments.hpp"
#include "ncqm/fft.hpp"
#include "ncqm/symbols.hpp"
#include "oracles.hpp"

using namespace ncqm;

namespace {

StarKernel voros(double theta) {
  StarKernel k;
  k.theta = theta;
  return k;
}

double density_variance(const Eigen::ArrayXd& rho, const GridSpec& g) {
  const Eigen::ArrayXd x = g.x_nodes();
  const double n = rho.sum();
  const double mean = (x * rho).sum() / n;
  return ((x - mean).square() * rho).sum() / n;
}

// One energy tag per Fourier mode, so free evolution is exact mode by mode.
SliceState mode_decomposition(const GridSpec& line, const Eigen::ArrayXcd& v, double mass) {
  const Eigen::ArrayXcd c = fft::forward(v);
  const Eigen::ArrayXd k = line.x_wavenumbers();
  const Eigen::ArrayXd x = line.x_nodes();
  const double peak = c.abs().maxCoeff();
  SliceState s(line, 0.0);
  for (Eigen::Index q = 0; q < c.size(); ++q) {
    if (std::abs(c[q]) < 1e-15 * peak) continue;
    const Eigen::ArrayXcd mode = c[q] * (kI * k[q] * (x - line.x_min)).exp();
    s.add(0.5 * k[q] * k[q] / mass, mode);
  }
  return s;
}

}  // namespace

TEST_CASE("closed-form packet widths") {
  CHECK(packet_width({1.0, 1.0, 0.0}, 0.0) == doctest::Approx(1.0));
  CHECK(packet_width({0.0, 1.0, 0.02}, 0.0) == doctest::Approx(0.1));
  CHECK(packet_width({1.0, 1.0, 0.0}, 1.0) == doctest::Approx(1.1892071).epsilon(1e-7));
}

TEST_CASE("free packet quadrature") {
  SUBCASE("commutative t = 0 variance") {
    const GridSpec g = GridSpec::line(512, -12.0, 12.0, 0.0);
    const auto s = free_packet({1.0, 1.0, 0.0}, 0.0, g);
    CHECK(std::abs(density_variance(s.field.values.abs2(), g) - 0.5) < 1e-6);
    CHECK_FALSE(s.field.edge_warning);
  }
  SUBCASE("first-order regime t = 0 variance") {
    const double sigma = 1.0, th = 0.02;
    const GridSpec g = GridSpec::line(512, -12.0, 12.0, th);
    const auto s = free_packet({sigma, 1.0, th}, 0.0, g);
    CHECK(density_variance(s.field.values.abs2(), g) ==
          doctest::Approx(0.5 * (sigma * sigma + 0.5 * th)).epsilon(0.01));
  }
  SUBCASE("fitted complex width follows the closed form") {
    for (double t : {0.0, 0.5, 1.0, 2.0}) {
      const auto s = packet_width_sample(1.0, 1.0, 0.05, t);
      CHECK(s.fitted == doctest::Approx(s.closed_form).epsilon(1e-8));
    }
  }
}

TEST_CASE("first-order packet") {
  const PacketParams p{1.0, 1.0, 0.05};
  const double lam = 0.5 + 0.25 * p.theta;
  const double f0 = -3.0 / (64.0 * lam * lam);
  const cplx want = 1.0 / (2.0 * std::pow(kPi, 0.75)) * std::sqrt(p.sigma / lam) * (1.0 + p.theta * f0);
  CHECK(std::abs(first_order_packet(p, 0.0, 0.0) - want) < 1e-14);

  const PacketParams p0{1.0, 1.0, 0.0};
  const double lam0 = 0.5;
  CHECK(std::abs(first_order_packet(p0, 0.0, 1.0) -
                 1.0 / (2.0 * std::pow(kPi, 0.75)) * std::sqrt(1.0 / lam0) * std::exp(-1.0 / (4 * lam0))) < 1e-14);

  auto err = [](double th) {
    const PacketParams q{1.0, 1.0, th};
    const GridSpec g = GridSpec::line(256, -8.0, 8.0, th);
    const auto s = free_packet(q, 0.5, g);
    double e = 0.0;
    for (int j = 0; j < g.n_x; ++j) e = std::max(e, std::abs(first_order_packet(q, 0.5, g.x_at(j)) - s.field.values[j]));
    return e / s.field.max_abs();
  };
  const double ratio = err(0.02) / err(0.01);
  MESSAGE("first-order error ratio under theta doubling: " << ratio);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("oscillator spectrum") {
  const auto s2 = oscillator_spectrum({1.0, 2.0, 0.2}, 0);
  CHECK(s2.fixed_point[0] == doctest::Approx(1.0).epsilon(1e-9));
  const auto a = oscillator_spectrum({1.0, 1.0, 0.0}, 5), b = oscillator_spectrum({1.0, 1.0, 0.3}, 5);
  for (int n = 0; n <= 5; ++n) {
    CHECK(std::abs(a.fixed_point[n] - b.fixed_point[n]) < 1e-6);
    CHECK(std::abs(b.gauge_free[n] - (n + 0.5)) < 1e-6);
  }
  for (int n = 0; n < 5; ++n) CHECK(std::abs(b.fixed_point[n + 1] - b.fixed_point[n] - 1.0) < 1e-6);
  CHECK(b.gauge_residual < 1e-8);
  CHECK(b.max_gap < 1e-6);
}

TEST_CASE("Hermite functions are orthonormal") {
  const int n = 2000;
  const double L = 24.0, dx = L / n;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        const double x = -0.5 * L + j * dx;
        s += hermite_function_x(a, x, 1.3, 0.7) * hermite_function_x(b, x, 1.3, 0.7) * dx;
      }
      CHECK(std::abs(s - (a == b ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("oscillator ground density") {
  const auto g0 = oscillator_ground({1.0, 1.0, 0.0}, oscillator_line(0.0, 1.0, 1.0, 256));
  CHECK(std::abs(g0.mean) < 1e-10);
  CHECK(g0.variance == doctest::Approx(0.5).epsilon(1e-9));
  const auto g = oscillator_ground({1.0, 1.0, 0.1}, oscillator_line(0.1, 1.0, 1.0, 512));
  CHECK(std::abs(g.mean - 0.05) < 1e-6);
  CHECK(std::abs(g.variance - 0.55) < 1e-6);
  CHECK_THROWS_AS(oscillator_ground({1.0, 1.0, 0.1}, GridSpec::line(512, -1.0, 1.0, 0.1)), InvalidInput);
}

TEST_CASE("stationary solver") {
  const auto h = Potential::harmonic(1.0, 1.0);
  const auto p = stationary_solve(h, voros(0.1), 1.0, {0.0, 0.9}, oscillator_line(0.1, 1.0, 1.0, 256));
  REQUIRE(p.size() == 1);
  CHECK(std::abs(p[0].energy - 0.5) < 1e-6);
  CHECK(p[0].residual < kStationaryResidual);

  const auto c = stationary_solve(h, voros(0.0), 1.0, {0.0, 3.0}, oscillator_line(0.0, 1.0, 1.0, 256));
  REQUIRE(c.size() == 3);
  for (int n = 0; n < 3; ++n) CHECK(std::abs(c[n].energy - (n + 0.5)) < 1e-8);

  // Steep quartic: the ground level moves continuously with theta.
  const auto quartic = Potential::polynomial({0.0, 0.0, 0.0, 0.0, 5.0});
  std::vector<double> e;
  for (double th : {0.0, 0.01, 0.02}) {
    const GridSpec line = GridSpec::line(256, -4.0, 4.0, th);
    const auto q = stationary_solve(quartic, voros(th), 1.0, {0.0, 1.5}, line);
    REQUIRE_FALSE(q.empty());
    e.push_back(q[0].energy);
  }
  MESSAGE("quartic ground level: " << e[0] << " " << e[1] << " " << e[2]);
  CHECK(std::abs(e[1] - e[0]) < 0.1);
  CHECK(std::abs(e[2] - e[0]) < 0.2);
}

TEST_CASE("free commutative spreading") {
  const GridSpec line = GridSpec::line(256, -20.0, 20.0, 0.0);
  const Eigen::ArrayXd x = line.x_nodes();
  const Eigen::ArrayXcd v = (-(x * x) / 2.0).cast<cplx>().exp();
  const SliceState psi = SliceState::stationary(line, 0.0, v, 0.0);
  const auto traj = evolve(psi, Potential::none(), voros(0.0), 1.0, 0.002, 500, 500);
  const double var = density_variance(traj.slices.back().values().abs2(), line);
  CHECK(var == doctest::Approx(oracle::free_variance(1.0, 1.0, 1.0)).epsilon(0.01));
}

TEST_CASE("evolve matches the free packet quadrature for theta > 0") {
  const double th = 0.05;
  const PacketParams p{1.0, 1.0, th};
  const GridSpec line = GridSpec::line(256, -16.0, 16.0, th);
  const auto start = free_packet(p, 0.0, line);
  const SliceState psi = mode_decomposition(line, start.field.values, p.mass);
  const auto traj = evolve(psi, Potential::none(), voros(th), p.mass, 0.001, 1000, 1000);
  const auto end = free_packet(p, 1.0, line);
  const double err = (traj.slices.back().values() - end.field.values).abs().maxCoeff() / end.field.max_abs();
  CHECK(err < 1e-4);
}

TEST_CASE("harmonic ground density is stationary over a period") {
  const double th = 0.1;
  const GridSpec line = oscillator_line(th, 1.0, 1.0, 256);
  const SliceState psi = oscillator_eigenstate({1.0, 1.0, th}, 0, line);
  const int steps = 32000;  // keeps dt (max|V| + k_max^2/2m) below 0.5
  const auto traj = evolve(psi, Potential::harmonic(1.0, 1.0), voros(th), 1.0, 2.0 * kPi / steps, steps, steps);
  const Eigen::ArrayXd r0 = probability_density(voros(th), traj.slices.front());
  const Eigen::ArrayXd r1 = probability_density(voros(th), traj.slices.back());
  CHECK((r1 - r0).abs().maxCoeff() < 1e-6);
}

TEST_CASE("continuity and norm conservation") {
  const auto inv = dynamics_invariants(0.1, 1.0, 1.0, 2e-4);
  CHECK(inv.continuity < 1e-6);
  CHECK(inv.norm_drift < 1e-6);
}

TEST_CASE("norm conservation on random states (property)") {
  oracle::Gen gen(53);
  const double th = 0.1;
  const GridSpec line = oscillator_line(th, 1.0, 1.0, 256);
  for (int trial = 0; trial < 3; ++trial) {
    const SliceState psi = oracle::random_slice(line, gen, 2, 1.0);
    const double n0 = slice_inner(psi, psi, th).real();
    const auto traj = evolve(psi, Potential::harmonic(1.0, 1.0), voros(th), 1.0, 2e-4, 1000, 1000);
    const double n1 = slice_inner(traj.slices.back(), traj.slices.back(), th).real();
    CHECK(std::abs(n1 / n0 - 1.0) < 1e-6);
  }
}

TEST_CASE("unstable steps are rejected") {
  const GridSpec line = oscillator_line(0.1, 1.0, 1.0, 256);
  const SliceState psi = oscillator_eigenstate({1.0, 1.0, 0.1}, 0, line);
  CHECK(stability_number(Potential::harmonic(1.0, 1.0), line, 1.0, 1.0) > 0.5);
  CHECK_THROWS_AS(evolve(psi, Potential::harmonic(1.0, 1.0), voros(0.1), 1.0, 1.0, 10), InvalidInput);
}

TEST_CASE("transition amplitude: trivial cases") {
  const GridSpec line = oscillator_line(0.1, 1.0, 1.0, 256);
  const OscillatorParams p{1.0, 1.0, 0.1};
  PulseSamples flat;
  for (int i = 0; i <= 400; ++i) {
    flat.t.push_back(i * 0.025);
    flat.v.push_back(0.3);
  }
  CHECK(std::abs(transition_amplitude(flat, 0, 1, 10.0, p, voros(0.1), line).amplitude) < 1e-10);
  CHECK(oscillator_transition(0.0, 1.0, 1.0).rate < 1e-20);
  CHECK(transition_rate(0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(transition_rate(1.0, 0.0), InvalidInput);

  const double r1 = oscillator_transition(0.02, 1.0, 1.0).rate;
  const double r2 = oscillator_transition(0.04, 1.0, 1.0).rate;
  CHECK(r2 / r1 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("transition amplitude agrees with direct integration of the coupled coefficients") {
  const double th = 0.05, V0 = 1e-3;
  const OscillatorParams p{1.0, 1.0, th};
  const GridSpec line = oscillator_line(th, 1.0, 1.0, 256);
  const auto first = transition_amplitude(PulseSamples::gaussian(V0, kPulseWidth, kPulseCenter, kPulseDuration, 4001),
                                          0, 1, kPulseDuration, p, voros(th), line);

  const int levels = 3;
  std::vector<SliceState> s;
  for (int n = 0; n < levels; ++n) s.push_back(oscillator_eigenstate(p, n, line));
  Eigen::MatrixXcd M0(levels, levels), M1(levels, levels);
  for (int n = 0; n < levels; ++n)
    for (int m = 0; m < levels; ++m) {
      M0(n, m) = slice_inner(s[n], s[m], th);
      M1(n, m) = slice_inner(s[n], d_t(s[m]) + kI * d_x(s[m]), th);
    }
  const Potential pulse = Potential::gaussian_pulse(V0, kPulseWidth, kPulseCenter);
  auto rhs = [&](double t, const std::vector<cplx>& c) {
    std::vector<cplx> out(levels, 0.0);
    for (int n = 0; n < levels; ++n)
      for (int m = 0; m < levels; ++m) {
        const cplx coupling = M0(n, m) * pulse.pulse(t) + 0.5 * th * M1(n, m) * pulse.pulse_rate(t);
        out[n] += -kI * std::exp(kI * (p.level(n) - p.level(m)) * t) * coupling * c[m];
      }
    return out;
  };
  const auto c = oracle::rk4(rhs, {1.0, 0.0, 0.0}, 0.0, kPulseDuration, 20000);
  MESSAGE("first order " << first.amplitude << " direct " << c[1]);
  CHECK(std::abs(c[1] - first.amplitude) < 0.01 * std::abs(c[1]));
}
