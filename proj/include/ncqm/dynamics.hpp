#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ncqm/fieldgrid.hpp"
#include "ncqm/potential.hpp"
#include "ncqm/slice.hpp"
#include "ncqm/star.hpp"

namespace ncqm {

struct PacketParams {
  double sigma = 1.0;
  double mass = 1.0;
  double theta = 0.0;

  cplx lambda(double t) const { return {0.5 * sigma * sigma + 0.25 * theta, 0.5 * t / mass}; }
  void validate() const;
};

struct PacketSlice {
  Field1D field;
  double p_cutoff = 0.0;
  double p_step = 0.0;
  int samples = 0;
};

PacketSlice free_packet(const PacketParams& params, double t, const GridSpec& grid);
// [(sigma^2 + theta/2)^2 + (t/m)^2]^{1/4}
double packet_width(const PacketParams& params, double t);
// sqrt(2 var |psi|^2) of a sampled slice.
double measured_width(const Eigen::ArrayXcd& psi, const GridSpec& grid);
// Complex Gaussian parameter read off the second moment of psi itself: int x^2 psi / (2 int psi).
cplx fitted_packet_parameter(const Eigen::ArrayXcd& psi, const GridSpec& grid);
cplx first_order_packet(const PacketParams& params, double t, double x);
inline bool perturbative_packet(const PacketParams& p) { return p.theta <= 0.1 * p.sigma * p.sigma; }

struct OscillatorParams {
  double mass = 1.0;
  double omega = 1.0;
  double theta = 0.0;

  double sigma_theta2() const { return 0.5 * theta + 1.0 / (mass * omega); }
  double level(int n) const { return (n + 0.5) * omega; }
  void validate() const;
};

struct SpectrumResult {
  std::vector<double> analytic;     // (n + 1/2) omega
  std::vector<double> gauge_free;   // eigenvalues of the gauge-removed momentum operator
  std::vector<double> fixed_point;  // self-consistent eigenvalues of the E-dependent operator
  std::vector<int> iterations;
  double max_gap = 0.0;             // largest disagreement among the three paths
  double gauge_residual = 0.0;      // max |e^{i theta E p/2} psi_n(p) - Hermite_n(p)|
};

SpectrumResult oscillator_spectrum(const OscillatorParams& params, int n_max, int n_p = 256);

// Normalized momentum-space Hermite function of the undeformed oscillator.
double hermite_function_p(int n, double p, double mass, double omega);
// Normalized position-space Hermite function of the undeformed oscillator.
double hermite_function_x(int n, double x, double mass, double omega);

// Multiplies every component by u_E(k) = exp(-(theta/4)(E^2+k^2) - i (theta/2) E k) (or divides).
Eigen::ArrayXcd energy_gauge(const Eigen::ArrayXcd& v, double energy, const GridSpec& grid, bool inverse = false,
                             double cutoff = 1e-14);

struct GroundState {
  Field2D symbol;
  Field1D density;
  SliceState slice;
  double norm_factor = 1.0;
  double mean = 0.0;
  double variance = 0.0;
};

GroundState oscillator_ground(const OscillatorParams& params, const GridSpec& grid2d, double t_slice = 0.0);
SliceState oscillator_eigenstate(const OscillatorParams& params, int n, const GridSpec& line, double t0 = 0.0);
// Coherent state built from its energy decomposition over levels n <= n_max.
SliceState oscillator_coherent_state(const OscillatorParams& params, double x0, double p0, int n_max,
                                     const GridSpec& line, double t0 = 0.0);

struct Eigenpair {
  double energy = 0.0;
  SliceState state;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

struct EnergyWindow {
  double lo = 0.0;
  double hi = 1.0;
};

std::vector<Eigenpair> stationary_solve(const Potential& v, const StarKernel& kernel, double mass,
                                        const EnergyWindow& window, const GridSpec& line);
inline constexpr double kStationaryResidual = 1e-6;

struct Trajectory {
  std::vector<double> times;
  std::vector<SliceState> slices;
  double dt = 0.0;
  int stride = 1;
  double mass = 1.0;
  Potential potential;
  double theta = 0.0;
};

Trajectory evolve(const SliceState& psi0, const Potential& v, const StarKernel& kernel, double mass, double dt,
                  int steps, int stride = 1);
double stability_number(const Potential& v, const GridSpec& line, double mass, double dt);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const StarKernel& kernel);

struct PulseSamples {
  std::vector<double> t;
  std::vector<double> v;

  static PulseSamples gaussian(double amplitude, double width, double center, double t_end, int n);
};

struct TransitionResult {
  cplx amplitude = 0.0;
  cplx commutative_part = 0.0;
  cplx theta_part = 0.0;
  double regime_metric = 0.0;  // theta * max |dC_f/dt|
  bool regime_flag = false;
};

TransitionResult transition_amplitude(const PulseSamples& pulse, int i_level, int f_level, double T,
                                      const OscillatorParams& params, const StarKernel& kernel,
                                      const GridSpec& line);
double transition_rate(cplx amplitude, double T);

}  // namespace ncqm
