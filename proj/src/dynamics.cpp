#include "ncqm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ncqm/fft.hpp"
#include "ncqm/operators.hpp"
#include "ncqm/symbols.hpp"

namespace ncqm {

namespace {

constexpr double kLogPrecision = 32.236191301916641;  // ln(1e14)
constexpr int kMaxPacketSamples = 1 << 22;
constexpr int kMaxFixedPointIterations = 60;

double l2_norm(const Eigen::ArrayXcd& v, double dx) { return std::sqrt(v.abs2().sum() * dx); }

// Dense matrix of -d^2/dx^2 (spectral) shifted as (k + shift)^2 in transform space.
Eigen::MatrixXcd spectral_square(int n, double length, double shift) {
  Eigen::ArrayXcd roots(n);
  for (int m = 0; m < n; ++m) roots[m] = std::exp(cplx(0.0, 2.0 * kPi * m / n));
  Eigen::ArrayXd k2(n);
  for (int q = 0; q < n; ++q) {
    const double k = 2.0 * kPi * signed_mode(q, n) / length + shift;
    k2[q] = k * k;
  }
  Eigen::MatrixXcd out(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      cplx acc = 0.0;
      const int d = ((j - l) % n + n) % n;
      for (int q = 0; q < n; ++q) acc += k2[q] * roots[(static_cast<long>(q) * d) % n];
      out(j, l) = acc / double(n);
    }
  return out;
}

void normalize_hermite_phase(Eigen::ArrayXcd& v, const Eigen::ArrayXd& ref, double h) {
  const cplx overlap = (ref.cast<cplx>() * v).sum() * h;
  if (std::abs(overlap) > 0.0) v *= std::conj(overlap) / std::abs(overlap);
}

}  // namespace

void PacketParams::validate() const {
  if (!(sigma >= 0.0) || !(mass > 0.0) || !(theta >= 0.0))
    throw InvalidInput("packet parameters need sigma >= 0, m > 0, theta >= 0");
  if (!(lambda(0.0).real() > 0.0)) throw InvalidInput("packet parameter lambda must have positive real part");
}

void OscillatorParams::validate() const {
  if (!(mass > 0.0) || !(omega > 0.0) || !(theta >= 0.0))
    throw InvalidInput("oscillator parameters need m > 0, omega > 0, theta >= 0");
}

PacketSlice free_packet(const PacketParams& params, double t, const GridSpec& grid) {
  params.validate();
  const cplx lam = params.lambda(t);
  const double quart = params.theta / (16.0 * params.mass * params.mass);
  const double re = lam.real();
  double pmax;
  if (quart > 0.0) pmax = std::sqrt((-re + std::sqrt(re * re + 4.0 * quart * kLogPrecision)) / (2.0 * quart));
  else pmax = std::sqrt(kLogPrecision / re);

  // Step chosen so periodic images of the packet sit far outside the window.
  const double spread = std::sqrt(std::norm(lam) / re) + std::sqrt(params.theta);
  const double reach = std::max(std::abs(grid.x_min), std::abs(grid.x_max)) + 12.0 * spread;
  const double dp = 2.0 * kPi / (2.0 * reach);
  const long half = static_cast<long>(std::ceil(pmax / dp));
  if (2 * half + 1 > kMaxPacketSamples)
    throw InvalidInput("free_packet: momentum quadrature needs " + std::to_string(2 * half + 1) +
                       " samples, above the limit; shrink the window or widen the packet");

  const double pref = std::sqrt(params.sigma) / (2.0 * std::pow(kPi, 1.25));
  const Eigen::ArrayXd x = grid.x_nodes();
  Eigen::ArrayXcd psi = Eigen::ArrayXcd::Zero(x.size());
  for (long q = -half; q <= half; ++q) {
    const double p = q * dp;
    const cplx g = std::exp(-quart * p * p * p * p - lam * p * p);
    for (Eigen::Index j = 0; j < x.size(); ++j) psi[j] += g * std::exp(cplx(0.0, p * x[j]));
  }
  psi *= pref * dp;
  PacketSlice out;
  out.field = Field1D(grid, t, psi);
  out.field.edge_warning = edge_ratio(psi) > kEdgeTolerance;
  out.p_cutoff = half * dp;
  out.p_step = dp;
  out.samples = static_cast<int>(2 * half + 1);
  return out;
}

double packet_width(const PacketParams& params, double t) {
  const double s = params.sigma * params.sigma + 0.5 * params.theta;
  const double r = t / params.mass;
  return std::pow(s * s + r * r, 0.25);
}

double measured_width(const Eigen::ArrayXcd& psi, const GridSpec& grid) {
  const Eigen::ArrayXd x = grid.x_nodes();
  const Eigen::ArrayXd w = psi.abs2();
  const double n = w.sum();
  if (n == 0.0) throw InvalidInput("measured_width: zero field");
  const double mean = (w * x).sum() / n;
  const double var = (w * (x - mean).square()).sum() / n;
  return std::sqrt(2.0 * var);
}

cplx fitted_packet_parameter(const Eigen::ArrayXcd& psi, const GridSpec& grid) {
  const Eigen::ArrayXd x = grid.x_nodes();
  const cplx zeroth = psi.sum();
  if (std::abs(zeroth) == 0.0) throw InvalidInput("fitted_packet_parameter: field integrates to zero");
  return (x.square().cast<cplx>() * psi).sum() / (2.0 * zeroth);
}

cplx first_order_packet(const PacketParams& params, double t, double x) {
  const cplx lam = params.lambda(t);
  const double m2 = params.mass * params.mass;
  const cplx f = (-3.0 / (4.0 * lam * lam) + 3.0 * x * x / (4.0 * std::pow(lam, 3)) -
                  std::pow(x, 4) / (16.0 * std::pow(lam, 4))) /
                 (16.0 * m2);
  return 1.0 / (2.0 * std::pow(kPi, 0.75)) * std::sqrt(params.sigma / lam) * (1.0 + params.theta * f) *
         std::exp(-x * x / (4.0 * lam));
}

double hermite_function_x(int n, double x, double mass, double omega) {
  const double xi = std::sqrt(mass * omega) * x;
  double prev = 0.0;
  double cur = std::pow(mass * omega / kPi, 0.25) * std::exp(-0.5 * xi * xi);
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * xi * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_function_p(int n, double p, double mass, double omega) {
  return hermite_function_x(n, p, 1.0 / mass, omega);
}

SpectrumResult oscillator_spectrum(const OscillatorParams& params, int n_max, int n_p) {
  params.validate();
  if (n_max < 0) throw InvalidInput("oscillator_spectrum: n_max must be >= 0");
  if (!is_power_of_two(n_p) || n_p < 32) throw InvalidInput("oscillator_spectrum: n_p must be a power of two >= 32");
  const double s = std::sqrt(params.mass * params.omega);
  const double P = (std::sqrt(2.0 * n_max + 1.0) + 10.0) * s;
  const double length = 2.0 * P;
  const double h = length / n_p;
  Eigen::ArrayXd p(n_p);
  for (int j = 0; j < n_p; ++j) p[j] = -P + j * h;
  const double mw2 = params.mass * params.mass * params.omega * params.omega;

  // (1/2m) [p^2 - m^2 w^2 (d_p + i c)^2], with c = theta E / 2 acting as a shift of the conjugate variable.
  auto op = [&](double c) {
    Eigen::MatrixXcd L = mw2 * spectral_square(n_p, length, c);
    L.diagonal().array() += p.square().cast<cplx>();
    return Eigen::MatrixXcd(L / (2.0 * params.mass));
  };

  SpectrumResult res;
  for (int n = 0; n <= n_max; ++n) res.analytic.push_back(params.level(n));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> base(op(0.0));
  if (base.info() != Eigen::Success)
    throw ConvergenceFailure("oscillator_spectrum: diagonalization failed", "gauge-removed operator");
  for (int n = 0; n <= n_max; ++n) res.gauge_free.push_back(base.eigenvalues()[n]);

  for (int n = 0; n <= n_max; ++n) {
    double E = res.gauge_free[n];
    std::vector<double> trace{E};
    int it = 0;
    Eigen::VectorXcd vec;
    for (; it < kMaxFixedPointIterations; ++it) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op(0.5 * params.theta * E));
      if (es.info() != Eigen::Success)
        throw ConvergenceFailure("oscillator_spectrum: diagonalization failed", "level " + std::to_string(n));
      const double next = es.eigenvalues()[n];
      vec = es.eigenvectors().col(n);
      trace.push_back(next);
      const bool done = std::abs(next - E) < 1e-13 * std::max(1.0, std::abs(E));
      E = next;
      if (done) break;
    }
    if (it == kMaxFixedPointIterations) {
      std::ostringstream os;
      for (double e : trace) os << e << ' ';
      throw ConvergenceFailure("oscillator_spectrum: fixed point did not settle for level " + std::to_string(n),
                               os.str());
    }
    res.fixed_point.push_back(E);
    res.iterations.push_back(it + 1);

    Eigen::ArrayXcd v = vec.array() / std::sqrt(h);
    for (int j = 0; j < n_p; ++j) v[j] *= std::exp(cplx(0.0, 0.5 * params.theta * E * p[j]));
    Eigen::ArrayXd ref(n_p);
    for (int j = 0; j < n_p; ++j) ref[j] = hermite_function_p(n, p[j], params.mass, params.omega);
    normalize_hermite_phase(v, ref, h);
    res.gauge_residual = std::max(res.gauge_residual, (v - ref.cast<cplx>()).abs().maxCoeff());
  }
  for (int n = 0; n <= n_max; ++n) {
    res.max_gap = std::max({res.max_gap, std::abs(res.gauge_free[n] - res.analytic[n]),
                            std::abs(res.fixed_point[n] - res.analytic[n])});
  }
  return res;
}

Eigen::ArrayXcd energy_gauge(const Eigen::ArrayXcd& v, double energy, const GridSpec& grid, bool inverse,
                             double cutoff) {
  const double a = 0.5 * grid.theta;
  if (a == 0.0) return v;
  Eigen::ArrayXcd c = fft::forward(v);
  if (inverse) fft::prune(c, cutoff);
  const Eigen::ArrayXd k = grid.x_wavenumbers();
  for (Eigen::Index q = 0; q < c.size(); ++q) {
    if (c[q] == 0.0) continue;
    const cplx expo(-0.5 * a * (energy * energy + k[q] * k[q]), -a * energy * k[q]);
    c[q] *= std::exp(inverse ? -expo : expo);
  }
  return fft::inverse(c);
}

GroundState oscillator_ground(const OscillatorParams& params, const GridSpec& grid2d, double t_slice) {
  params.validate();
  grid2d.validate();
  const double E0 = params.level(0);
  const double s2 = params.sigma_theta2();
  const double a = 0.5 * params.theta;
  const double mean = params.theta * E0;
  const double var = 0.5 * s2 * (1.0 + params.theta / (2.0 * s2));
  if (std::sqrt(var) < 4.0 * grid2d.dx())
    throw InvalidInput("oscillator_ground: grid does not resolve the density width");
  // The symbol sits at a E0 and its density at theta E0; both must fit.
  if (grid2d.x_min > std::min(a * E0, mean) - 10.0 * std::sqrt(s2) ||
      grid2d.x_max < std::max(a * E0, mean) + 10.0 * std::sqrt(s2))
    throw InvalidInput("oscillator_ground: box too small for the ground state");

  const Eigen::ArrayXd x = grid2d.x_nodes();
  const Eigen::ArrayXcd profile = (-(x - a * E0).square() / (2.0 * s2)).exp().cast<cplx>();
  SliceState slice = SliceState::stationary(grid2d, t_slice, profile * std::exp(cplx(0.0, -E0 * t_slice)), E0);
  const double nrm = slice_inner(slice, slice, params.theta).real();
  const double factor = 1.0 / std::sqrt(nrm);
  slice = cplx(factor) * slice;

  GroundState g;
  g.norm_factor = factor;
  g.slice = slice;
  g.symbol = sample_field(
      [&](double t, double xx) {
        return factor * std::exp(-(xx - a * E0) * (xx - a * E0) / (2.0 * s2)) * std::exp(cplx(0.0, -E0 * t));
      },
      grid2d);
  StarKernel k;
  k.theta = params.theta;
  const Eigen::ArrayXd rho = probability_density(k, slice);
  g.density = Field1D(grid2d, t_slice, rho.cast<cplx>());
  const double n0 = rho.sum();
  g.mean = (rho * x).sum() / n0;
  g.variance = (rho * (x - g.mean).square()).sum() / n0;
  return g;
}

SliceState oscillator_eigenstate(const OscillatorParams& params, int n, const GridSpec& line, double t0) {
  params.validate();
  const double E = params.level(n);
  const Eigen::ArrayXd x = line.x_nodes();
  Eigen::ArrayXcd chi(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) chi[j] = hermite_function_x(n, x[j], params.mass, params.omega);
  if (edge_ratio(chi) > kEdgeTolerance) throw InvalidInput("oscillator_eigenstate: box too small for level " + std::to_string(n));
  return SliceState::stationary(line, t0, energy_gauge(chi, E, line) * std::exp(cplx(0.0, -E * t0)), E);
}

SliceState oscillator_coherent_state(const OscillatorParams& params, double x0, double p0, int n_max,
                                     const GridSpec& line, double t0) {
  params.validate();
  const Eigen::ArrayXd x = line.x_nodes();
  const double mw = params.mass * params.omega;
  Eigen::ArrayXcd target(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j)
    target[j] = std::pow(mw / kPi, 0.25) * std::exp(cplx(-0.5 * mw * (x[j] - x0) * (x[j] - x0), p0 * x[j]));
  SliceState out(line, t0);
  for (int n = 0; n <= n_max; ++n) {
    Eigen::ArrayXcd chi(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) chi[j] = hermite_function_x(n, x[j], params.mass, params.omega);
    const cplx c = (chi.conjugate() * target).sum() * line.dx();
    if (std::abs(c) < 1e-15) continue;
    const double E = params.level(n);
    out.add(E, c * energy_gauge(chi, E, line) * std::exp(cplx(0.0, -E * t0)));
  }
  return out;
}

std::vector<Eigenpair> stationary_solve(const Potential& v, const StarKernel& kernel, double mass,
                                        const EnergyWindow& window, const GridSpec& line) {
  if (v.time_dependent()) throw InvalidInput("stationary_solve needs a time-independent potential");
  if (kernel.flavor != Flavor::Voros) throw InvalidInput("stationary_solve uses the Voros star product");
  if (!(mass > 0.0)) throw InvalidInput("stationary_solve: mass must be positive");
  if (std::abs(kernel.theta - line.theta) > 1e-15) throw InvalidInput("stationary_solve: theta mismatch");
  const int n = line.n_x;
  const double h = line.dx();

  // Gauge frame: plain multiplication by the commuting profile.
  Eigen::MatrixXcd Hc = spectral_square(n, line.length_x(), 0.0) / (2.0 * mass);
  Hc.diagonal().array() += v.commuting_profile(line).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hc);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("stationary_solve: diagonalization failed", "");

  const auto H = SymbolOperator::make(OpKind::Hamiltonian, kernel.theta, mass, v);
  std::vector<Eigenpair> out;
  for (int q = 0; q < n; ++q) {
    const double E0 = es.eigenvalues()[q];
    if (E0 < window.lo || E0 > window.hi) continue;
    Eigen::ArrayXcd chi = es.eigenvectors().col(q).array() / std::sqrt(h);
    Eigenpair pair;
    double E = E0;
    pair.trace.push_back(E);
    SliceState psi;
    int it = 0;
    for (; it < kMaxFixedPointIterations; ++it) {
      psi = SliceState::stationary(line, 0.0, energy_gauge(chi, E, line), E);
      const cplx num = slice_inner(psi, apply(H, psi), kernel.theta, kernel.cutoff);
      const cplx den = slice_inner(psi, psi, kernel.theta, kernel.cutoff);
      const double next = (num / den).real();
      pair.trace.push_back(next);
      const bool done = std::abs(next - E) < 1e-10 * std::max(1.0, std::abs(E));
      E = next;
      if (done) break;
    }
    psi = SliceState::stationary(line, 0.0, energy_gauge(chi, E, line), E);
    const double den = slice_inner(psi, psi, kernel.theta, kernel.cutoff).real();
    psi = cplx(1.0 / std::sqrt(den)) * psi;
    const Eigen::ArrayXcd r = E * psi.values() - apply(H, psi).values();
    pair.energy = E;
    pair.iterations = it + 1;
    pair.residual = l2_norm(r, h) / l2_norm(psi.values(), h);
    pair.state = psi;
    if (it == kMaxFixedPointIterations || !(pair.residual < kStationaryResidual)) {
      std::ostringstream os;
      os << "residual=" << pair.residual << " trace:";
      for (double e : pair.trace) os << ' ' << e;
      throw ConvergenceFailure("stationary_solve: level near E=" + std::to_string(E0) + " did not converge", os.str());
    }
    out.push_back(std::move(pair));
  }
  return out;
}

double stability_number(const Potential& v, const GridSpec& line, double mass, double dt) {
  const double kmax = kPi / line.dx();
  return dt * (v.max_abs(line) + kmax * kmax / (2.0 * mass));
}

Trajectory evolve(const SliceState& psi0, const Potential& v, const StarKernel& kernel, double mass, double dt,
                  int steps, int stride) {
  if (v.time_dependent()) throw InvalidInput("evolve: time-dependent potentials are handled by transition_amplitude");
  if (kernel.flavor != Flavor::Voros) throw InvalidInput("evolve uses the Voros star product");
  if (!(mass > 0.0) || !(dt > 0.0) || steps < 0 || stride < 1) throw InvalidInput("evolve: bad step parameters");
  if (psi0.parts.empty()) throw InvalidInput("evolve: initial state carries no energy-tagged components");
  for (const auto& p : psi0.parts)
    if (p.degree() != 0) throw InvalidInput("evolve: initial components must be plain slices");
  const GridSpec& g = psi0.spec;
  if (std::abs(kernel.theta - g.theta) > 1e-15) throw InvalidInput("evolve: theta mismatch");
  const double sn = stability_number(v, g, mass, dt);
  if (!(sn < 0.5))
    throw InvalidInput("evolve: dt (max|V| + k_max^2/2m) = " + std::to_string(sn) + " violates the bound 0.5");

  const Eigen::ArrayXd k = g.x_wavenumbers();
  const Eigen::ArrayXcd half_kin = (-kI * (0.25 * dt / mass) * k.square().cast<cplx>()).exp();
  const Eigen::ArrayXcd pot = (-kI * dt * v.commuting_profile(g).cast<cplx>()).exp();

  std::vector<double> energies;
  std::vector<Eigen::ArrayXcd> chis;
  for (const auto& p : psi0.parts) {
    energies.push_back(p.energy);
    chis.push_back(energy_gauge(p.jet[0], p.energy, g, true, kernel.cutoff));
  }

  Trajectory traj;
  traj.dt = dt;
  traj.stride = stride;
  traj.mass = mass;
  traj.potential = v;
  traj.theta = kernel.theta;
  auto store = [&](int step) {
    const double t = psi0.t0 + step * dt;
    SliceState s(g, t);
    for (std::size_t c = 0; c < chis.size(); ++c) s.parts.push_back({energies[c], {energy_gauge(chis[c], energies[c], g)}});
    traj.times.push_back(t);
    traj.slices.push_back(std::move(s));
  };
  store(0);
  for (int step = 1; step <= steps; ++step) {
    for (auto& chi : chis) {
      chi = fft::inverse(Eigen::ArrayXcd(half_kin * fft::forward(chi)));
      chi *= pot;
      chi = fft::inverse(Eigen::ArrayXcd(half_kin * fft::forward(chi)));
    }
    if (step % stride == 0) store(step);
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const StarKernel& kernel) {
  os << "step,t,x,re,im,rho\n";
  for (std::size_t s = 0; s < traj.slices.size(); ++s) {
    const SliceState& sl = traj.slices[s];
    const Eigen::ArrayXcd v = sl.values();
    const Eigen::ArrayXd rho = probability_density(kernel, sl);
    const int step = static_cast<int>(s) * traj.stride;
    for (int j = 0; j < sl.spec.n_x; ++j)
      os << step << ',' << format_number(traj.times[s]) << ',' << format_number(sl.spec.x_at(j)) << ','
         << format_number(v[j].real()) << ',' << format_number(v[j].imag()) << ',' << format_number(rho[j]) << '\n';
  }
}

PulseSamples PulseSamples::gaussian(double amplitude, double width, double center, double t_end, int n) {
  if (n < 5) throw InvalidInput("pulse needs at least 5 samples");
  PulseSamples s;
  for (int i = 0; i < n; ++i) {
    const double t = t_end * i / (n - 1);
    const double u = (t - center) / width;
    s.t.push_back(t);
    s.v.push_back(amplitude * std::exp(-u * u));
  }
  return s;
}

TransitionResult transition_amplitude(const PulseSamples& pulse, int i_level, int f_level, double T,
                                      const OscillatorParams& params, const StarKernel& kernel,
                                      const GridSpec& line) {
  if (!(T > 0.0)) throw InvalidInput("transition_amplitude: T must be positive");
  const std::size_t n = pulse.t.size();
  if (n < 5 || pulse.v.size() != n) throw InvalidInput("transition_amplitude: need >= 5 matching pulse samples");
  const double h = (pulse.t.back() - pulse.t.front()) / (n - 1);
  if (std::abs(pulse.t.front()) > 1e-12 || std::abs(pulse.t.back() - T) > 1e-9 * std::max(1.0, T))
    throw InvalidInput("transition_amplitude: pulse samples must span [0, T]");
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(pulse.t[i] - pulse.t[i - 1] - h) > 1e-9 * h)
      throw InvalidInput("transition_amplitude: pulse samples must be uniformly spaced");

  const SliceState si = oscillator_eigenstate(params, i_level, line);
  const SliceState sf = oscillator_eigenstate(params, f_level, line);
  const double a = 0.5 * kernel.theta;
  const double w = params.level(f_level) - params.level(i_level);
  const cplx m0 = slice_inner(sf, si, kernel.theta, kernel.cutoff);
  const cplx m1 = slice_inner(sf, d_t(si) + kI * d_x(si), kernel.theta, kernel.cutoff);

  std::vector<double> rate(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n)
      rate[i] = (pulse.v[i - 2] - 8.0 * pulse.v[i - 1] + 8.0 * pulse.v[i + 1] - pulse.v[i + 2]) / (12.0 * h);
    else if (i < 2)
      rate[i] = (-25.0 * pulse.v[i] + 48.0 * pulse.v[i + 1] - 36.0 * pulse.v[i + 2] + 16.0 * pulse.v[i + 3] -
                 3.0 * pulse.v[i + 4]) / (12.0 * h);
    else
      rate[i] = (25.0 * pulse.v[i] - 48.0 * pulse.v[i - 1] + 36.0 * pulse.v[i - 2] - 16.0 * pulse.v[i - 3] +
                 3.0 * pulse.v[i - 4]) / (12.0 * h);
  }
  // Composite Simpson when the interval count is even, trapezoid otherwise.
  auto weight = [&](std::size_t i) {
    if ((n - 1) % 2 != 0) return (i == 0 || i == n - 1) ? 0.5 * h : h;
    if (i == 0 || i == n - 1) return h / 3.0;
    return (i % 2 ? 4.0 : 2.0) * h / 3.0;
  };
  cplx iv = 0.0, irate = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx ph = std::exp(cplx(0.0, w * pulse.t[i]));
    iv += weight(i) * pulse.v[i] * ph;
    irate += weight(i) * rate[i] * ph;
    peak = std::max(peak, std::abs(m0 * pulse.v[i] + a * m1 * rate[i]));
  }
  TransitionResult r;
  r.commutative_part = -kI * m0 * iv;
  r.theta_part = -kI * a * m1 * irate;
  r.amplitude = r.commutative_part + r.theta_part;
  r.regime_metric = kernel.theta * peak;
  r.regime_flag = r.regime_metric > 0.1;
  return r;
}

double transition_rate(cplx amplitude, double T) {
  if (!(T > 0.0)) throw InvalidInput("transition_rate: T must be positive");
  return std::norm(amplitude) / T;
}

}  // namespace ncqm
