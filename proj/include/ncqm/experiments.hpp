#pragma once

#include <string>
#include <vector>

#include "ncqm/dynamics.hpp"
#include "ncqm/moments.hpp"
#include "ncqm/report.hpp"

namespace ncqm {

// Runs every experiment named in the config, in order; data files go to output.directory when it is non-empty.
std::vector<ReportRow> run_experiments(const ExperimentConfig& config);
std::vector<ReportRow> run_experiment(const std::string& name, const ExperimentConfig& config);

// Building blocks shared by the experiments, the tests and the acceptance binary.

struct StarLatticeResult {
  double max_relative_error = 0.0;
  int products = 0;
  double seconds = 0.0;
};
// Plane-wave pairs on a 5x5x5x5 lattice of (E, p, E', p') per theta, FourierKernel against the closed form.
StarLatticeResult star_plane_wave_lattice(const std::vector<double>& thetas);

struct PacketWidthSample {
  double theta = 0.0;
  double t = 0.0;
  double closed_form = 0.0;  // d(t)
  double density = 0.0;      // sqrt(2 var |Psi|^2)
  double fitted = 0.0;       // sqrt(2 |lambda_fit|)
};
PacketWidthSample packet_width_sample(double sigma, double mass, double theta, double t);

struct GalileanResiduals {
  double boost_hamiltonian = 0.0;  // |[G,H] - i P_x|
  double boost_momentum = 0.0;     // |[G,P_x] - i m|
  double boost_energy = 0.0;       // |[G,P_t] + i P_x|
  double coordinates = 0.0;        // |[X_L,T_L] + i theta|
  double commuting = 0.0;          // |[T_c,X_c]|
  double boost_forms = 0.0;        // |G - G_expanded|
  double momentum_from_time = 0.0; // |P_x + (T_L - T_R)/theta|
};
// Residuals relative to max|psi| on a band-limited 2-D test state.
GalileanResiduals galilean_residuals(double theta, double mass);

struct DynamicsInvariants {
  double continuity = 0.0;  // max |d_t rho + d_x j| over interior samples
  double norm_drift = 0.0;  // |1 - (psi,psi)| after the run, scaled to 1000 steps
  int steps = 0;
};
// Continuity on a free single-tag packet, norm drift on a harmonic coherent state.
DynamicsInvariants dynamics_invariants(double theta, double mass, double omega, double dt);

enum class EhrenfestState { Ground, Coherent };
// Ehrenfest series for O in {X_L, P_x, T_L} on the harmonic oscillator.
EhrenfestSeries oscillator_ehrenfest(OpKind kind, EhrenfestState state, double theta, double mass, double omega,
                                     double dt, double duration = 0.2);

struct TransitionSample {
  double theta = 0.0;
  cplx amplitude = 0.0;
  double rate = 0.0;
  double regime_metric = 0.0;
};
inline constexpr double kPulseAmplitude = 0.1;
inline constexpr double kPulseWidth = 1.0;
inline constexpr double kPulseDuration = 10.0;
inline constexpr double kPulseCenter = 5.0;
TransitionSample oscillator_transition(double theta, double mass, double omega, double amplitude = kPulseAmplitude);

// Default grids.
GridSpec oscillator_line(double theta, double mass, double omega, int n = 256);

}  // namespace ncqm
