#include "ncqm/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "ncqm/operators.hpp"
#include "ncqm/symbols.hpp"

namespace ncqm {

namespace {

// Smallest power-of-two square box of the given half width that resolves sqrt(theta)/4.
GridSpec resolved_box(double half_width, double theta, int n = 64) {
  for (;; n *= 2) {
    GridSpec g = GridSpec::box(n, half_width, theta);
    if (theta == 0.0 || g.dx() <= std::sqrt(theta) / 4.0) return g;
    if (n > 4096) throw InvalidInput("theta too small for a resolvable box");
  }
}

GridSpec resolved_line(double half_width, double theta, int n) {
  for (;; n *= 2) {
    GridSpec g = GridSpec::line(n, -half_width, half_width, theta);
    if (theta == 0.0 || g.dx() <= std::sqrt(theta) / 4.0) return g;
    if (n > 1 << 16) throw InvalidInput("theta too small for a resolvable line");
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Sink {
  std::filesystem::path dir;
  bool enabled() const { return !dir.empty(); }
  std::ofstream open(const std::string& name) const {
    std::ofstream os(dir / name);
    if (!os) throw InvalidInput("cannot write " + (dir / name).string());
    return os;
  }
};

StarKernel voros(double theta) {
  StarKernel k;
  k.theta = theta;
  return k;
}

// star-check ---------------------------------------------------------------------------------

std::vector<ReportRow> star_check(const ExperimentConfig& c, const Sink& sink) {
  const std::string ex = "star-check";
  std::vector<ReportRow> rows;
  const auto lat = star_plane_wave_lattice({0.0, 0.1, 0.5});
  rows.push_back(compare_row(ex, "plane_wave_lattice_max_rel_error", 0.0, lat.max_relative_error, 1e-10));
  rows.push_back(check_row(ex, "plane_wave_lattice_seconds", lat.seconds, 10.0, lat.seconds < 10.0));

  const cplx f = plane_wave_star_factor(1, 0, 0, 1, 0.2);
  rows.push_back(compare_row(ex, "factor_(1,0,0,1,0.2)_re", reference("star.plane_wave_factor_re"), f.real(), 5e-8));
  rows.push_back(compare_row(ex, "factor_(1,0,0,1,0.2)_im", reference("star.plane_wave_factor_im"), f.imag(), 5e-8));
  const cplx g = plane_wave_star_factor(-1, -2, 1, 2, 0.1);
  rows.push_back(compare_row(ex, "conjugate_pair_factor", reference("star.conjugate_pair_factor"), g.real(), 5e-8));

  const double theta = c.theta;
  auto gauss_on = [](const GridSpec& box, double t0, double x0, double k) {
    return sample_field(
        [=](double t, double x) {
          return std::exp(cplx(-0.5 * ((t - t0) * (t - t0) + (x - x0) * (x - x0)), k * x));
        },
        box);
  };
  const GridSpec box = resolved_box(9.0, theta, c.grid.n_x ? c.grid.n_x : 64);
  const Field2D a = gauss_on(box, 0.3, -0.2, 0.5), b = gauss_on(box, -0.1, 0.4, -0.3), h = gauss_on(box, 0.0, 0.1, 0.2);
  StarKernel fk = voros(theta);
  const Field2D left = star(fk, star(fk, a, b), h);
  const Field2D right = star(fk, a, star(fk, b, h));
  const double assoc = (left.values - right.values).abs().maxCoeff() / left.max_abs();
  rows.push_back(compare_row(ex, "associativity_gaussians", 0.0, assoc, 1e-8));

  // Series promotion gate at the small-theta reference point.
  const double th_series = 0.05;
  const GridSpec sbox = resolved_box(9.0, th_series, 64);
  const Field2D sa = gauss_on(sbox, 0.3, -0.2, 0.5), sb = gauss_on(sbox, -0.1, 0.4, -0.3);
  StarKernel sfk = voros(th_series);
  StarKernel se = sfk;
  se.method = StarMethod::Series;
  se.order = c.solver.K;
  StarDiagnostics diag;
  double xv = 0.0;
  bool ok = true;
  try {
    star(se, sa, sb, &diag);
    xv = cross_validate(sfk, se, sa, sb);
  } catch (const ConvergenceFailure&) {
    ok = false;
    xv = std::nan("");
  }
  rows.push_back(check_row(ex, "fourier_vs_series_K" + std::to_string(se.order) + "(theta=0.05)", xv, 1e-6,
                           ok && xv < 1e-6));
  if (sink.enabled()) sink.open("star_diagnostics.json") << diag.to_json().dump(2) << '\n';
  return rows;
}

// free-packet --------------------------------------------------------------------------------

std::vector<ReportRow> free_packet_experiment(const ExperimentConfig& c, const Sink& sink) {
  const std::string ex = "free-packet";
  std::vector<ReportRow> rows;
  const double m = c.mass, sigma = c.sigma;
  std::ofstream csv;
  if (sink.enabled()) {
    csv = sink.open("packet_widths.csv");
    csv << "theta,t,closed_form,density,fitted\n";
  }
  for (double theta : {0.0, 0.02, 0.05}) {
    for (double t : {0.0, 0.5, 1.0, 2.0}) {
      const auto s = packet_width_sample(sigma, m, theta, t);
      const std::string tag = "(theta=" + fmt(theta) + ",t=" + fmt(t) + ")";
      rows.push_back(compare_row(ex, "density_width" + tag, s.closed_form, s.density, 0.02 * s.closed_form));
      rows.push_back(compare_row(ex, "fitted_width" + tag, s.closed_form, s.fitted, 0.02 * s.closed_form));
      if (csv) csv << format_number(theta) << ',' << format_number(t) << ',' << format_number(s.closed_form) << ','
                   << format_number(s.density) << ',' << format_number(s.fitted) << '\n';
    }
  }
  PacketParams unit{1.0, 1.0, 0.0};
  rows.push_back(compare_row(ex, "closed_form_width(sigma=1,t=1)", reference("packet.width_sigma1_t1"),
                             packet_width(unit, 1.0), 1e-3));
  for (double theta : {0.02, 0.05}) {
    const double s2 = 0.01 * theta;
    const auto s = packet_width_sample(std::sqrt(s2), m, theta, 0.0);
    const double floor = std::sqrt(0.5 * theta);
    rows.push_back(compare_row(ex, "squeezing_floor_density(theta=" + fmt(theta) + ")", floor, s.density, 0.05 * floor));
    rows.push_back(compare_row(ex, "squeezing_floor_closed_form(theta=" + fmt(theta) + ")", floor, s.closed_form,
                               0.05 * floor));
  }
  return rows;
}

// oscillator ---------------------------------------------------------------------------------

std::vector<ReportRow> oscillator_experiment(const ExperimentConfig& c, const Sink& sink) {
  const std::string ex = "oscillator";
  std::vector<ReportRow> rows;
  std::ofstream csv;
  if (sink.enabled()) {
    csv = sink.open("spectrum.csv");
    csv << "n,E\n";
  }
  for (double theta : {0.0, 0.1, 0.3}) {
    OscillatorParams p{c.mass, c.omega, theta};
    const auto s = oscillator_spectrum(p, 5);
    const std::string tag = "(theta=" + fmt(theta) + ")";
    rows.push_back(compare_row(ex, "spectrum_max_gap" + tag, 0.0, s.max_gap, 1e-6));
    rows.push_back(compare_row(ex, "gauge_residual" + tag, 0.0, s.gauge_residual, 1e-8));
    double spacing = 0.0;
    for (int n = 0; n < 5; ++n) spacing = std::max(spacing, std::abs(s.fixed_point[n + 1] - s.fixed_point[n] - c.omega));
    rows.push_back(compare_row(ex, "level_spacing_error" + tag, 0.0, spacing, 1e-6));
    if (csv && theta == 0.1)
      for (int n = 0; n <= 5; ++n) csv << n << ',' << format_number(s.fixed_point[n]) << '\n';
  }

  OscillatorParams p{c.mass, c.omega, c.theta};
  const GridSpec line = oscillator_line(c.theta, c.mass, c.omega, 512);
  const auto g = oscillator_ground(p, line);
  const double E0 = p.level(0);
  const double s2 = p.sigma_theta2();
  const double tilde2 = 0.5 * s2 * (1.0 + c.theta / (2.0 * s2));
  rows.push_back(compare_row(ex, "ground_density_mean", c.theta * E0, g.mean, 1e-6));
  rows.push_back(compare_row(ex, "ground_density_variance", tilde2, g.variance, 1e-6));
  if (sink.enabled()) {
    auto os = sink.open("ground_density.csv");
    os << "t,x,value\n";
    for (int j = 0; j < line.n_x; ++j)
      os << format_number(0.0) << ',' << format_number(line.x_at(j)) << ',' << format_number(g.density.values[j].real())
         << '\n';
  }

  const auto pairs = stationary_solve(Potential::harmonic(c.mass, c.omega), voros(c.theta), c.mass,
                                      {0.0, 1.5 * c.omega}, oscillator_line(c.theta, c.mass, c.omega, 256));
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    rows.push_back(compare_row(ex, "stationary_level_" + std::to_string(n), p.level(static_cast<int>(n)),
                               pairs[n].energy, 1e-6));
    rows.push_back(check_row(ex, "stationary_residual_" + std::to_string(n), pairs[n].residual, kStationaryResidual,
                             pairs[n].residual < kStationaryResidual));
  }

  if (c.theta > 0.0) {
    // Toward the large-frequency limit the density width approaches sqrt(theta/2) like 1/(2 m w).
    // Once 1/(m w) drops well below theta the Voros weights amplify truncated modes, so the scan stops at 30 w.
    for (double factor : {3.0, 10.0, 30.0}) {
      const double w = factor * c.omega;
      OscillatorParams q{c.mass, w, c.theta};
      const double shift = c.theta * q.level(0);
      const double half = 12.0 * std::sqrt(q.sigma_theta2()) + 0.25 * shift;
      GridSpec narrow = resolved_line(half, c.theta, 256);
      narrow.x_min += 0.75 * shift;
      narrow.x_max += 0.75 * shift;
      const auto gq = oscillator_ground(q, narrow);
      const double s2q = q.sigma_theta2();
      const double width = std::sqrt(0.5 * s2q * (1.0 + c.theta / (2.0 * s2q)));
      rows.push_back(compare_row(ex, "density_width(omega=" + fmt(w) + ")", width, std::sqrt(gq.variance), 1e-6));
      rows.push_back(compare_row(ex, "density_mean(omega=" + fmt(w) + ")", shift, gq.mean, 1e-6));
      rows.push_back(check_row(ex, "density_width_over_floor(omega=" + fmt(w) + ")",
                               std::sqrt(gq.variance) / std::sqrt(0.5 * c.theta), 0.0, true));
    }
  }
  return rows;
}

// moments ------------------------------------------------------------------------------------

std::vector<ReportRow> moments_experiment(const ExperimentConfig& c, const Sink& sink) {
  const std::string ex = "moments";
  std::vector<ReportRow> rows;
  const double th = c.theta, m = c.mass, w = c.omega;
  OscillatorParams p{m, w, th};
  const GridSpec line = oscillator_line(th, m, w, 512);
  const StarKernel k = voros(th);
  const SliceState psi = oscillator_ground(p, line).slice;
  const auto X = SymbolOperator::make(OpKind::X_L, th, m);
  const auto T = SymbolOperator::make(OpKind::T_L, th, m);
  const auto P = SymbolOperator::make(OpKind::P_x, th, m);
  const auto H = SymbolOperator::make(OpKind::Hamiltonian, th, m, Potential::harmonic(m, w));

  const double dt_ref = std::sqrt(0.5 * th * th * m * w + 0.5 * th);
  rows.push_back(compare_row(ex, "x_mean", 0.0, expectation(X, psi, k).real(), 1e-6));
  rows.push_back(compare_row(ex, "t_second_moment_minus_t2", dt_ref * dt_ref, expectation(T, T, psi, k).real(), 1e-4));
  rows.push_back(compare_row(ex, "p_second_moment", 0.5 * m * w, expectation(P, P, psi, k).real(), 1e-6));
  rows.push_back(compare_row(ex, "dx_dp", 0.5, uncertainty_product(X, P, psi, k), 1e-6));
  rows.push_back(compare_row(ex, "dx_dt", 0.5 * std::sqrt(th * th + th / (m * w)), uncertainty_product(X, T, psi, k), 1e-4));
  rows.push_back(compare_row(ex, "de_dt", 0.0, uncertainty_product(H, T, psi, k), 1e-6));
  const double imag = std::max({std::abs(expectation(X, psi, k).imag()), std::abs(expectation(T, psi, k).imag()),
                                std::abs(expectation(P, P, psi, k).imag())});
  rows.push_back(compare_row(ex, "hermitian_imaginary_residue", 0.0, imag, 1e-8));
  {
    // Reported relation: Delta H Delta T >= m w^2 theta |<X>| / 2.
    const double lhs = uncertainty_product(H, T, psi, k);
    const double rhs = 0.5 * m * w * w * th * std::abs(expectation(X, psi, k).real());
    rows.push_back(check_row(ex, "energy_time_relation_margin", lhs - rhs, 1e-8, lhs >= rhs - 1e-8));
  }

  if (th > 0.0) {
    const auto cv = coherent_variance_matrix(th);
    rows.push_back(compare_row(ex, "variance_table_det", reference("variance.det"), cv.printed_det, 1e-15));
    rows.push_back(compare_row(ex, "variance_numeric_vs_table_max_dev", 0.0, cv.max_deviation, 1e-6));
    rows.push_back(compare_row(ex, "variance_numeric_det", reference("variance.det"), cv.numeric_det, 1e-6));
    rows.push_back(compare_row(ex, "configuration_block_dx_dt", 0.5 * th,
                               std::sqrt(cv.numeric.V(0, 0) * cv.numeric.V(1, 1)), 1e-6));
    if (sink.enabled()) {
      nlohmann::json j{{"numeric", cv.numeric.to_json()}, {"table", cv.printed.to_json()}};
      sink.open("variance_matrix.json") << j.dump(2) << '\n';
    }
  }
  return rows;
}

// ehrenfest ----------------------------------------------------------------------------------

std::vector<ReportRow> ehrenfest_experiment(const ExperimentConfig& c, const Sink& sink) {
  const std::string ex = "ehrenfest";
  std::vector<ReportRow> rows;
  const double dt = c.solver.dt > 0.0 ? c.solver.dt : 2e-4;
  const std::pair<OpKind, const char*> ops[] = {{OpKind::X_L, "X"}, {OpKind::P_x, "P_x"}, {OpKind::T_L, "T"}};
  for (const auto& [kind, name] : ops) {
    // Position and momentum move on a coherent state; the time operator is checked on the ground state,
    // where its expectation advances at unit rate.
    const auto state = kind == OpKind::T_L ? EhrenfestState::Ground : EhrenfestState::Coherent;
    const auto coarse = oscillator_ehrenfest(kind, state, c.theta, c.mass, c.omega, dt);
    rows.push_back(compare_row(ex, std::string("residual_") + name, 0.0, coarse.max_residual, 1e-4));
    if (kind == OpKind::P_x)
      rows.push_back(compare_row(ex, "force_law_residual", 0.0, coarse.max_force_residual, 1e-4));
    if (kind == OpKind::T_L) {
      double rate = 0.0;
      for (double d : coarse.derivative) rate = std::max(rate, std::abs(d - 1.0));
      rows.push_back(compare_row(ex, "ground_T_rate_minus_1", 0.0, rate, 1e-4));
    }
    // Second order: halving dt divides the residual by about four. A stationary state has no splitting
    // error to measure, so the ratio is always taken on the coherent state.
    const auto a = oscillator_ehrenfest(kind, EhrenfestState::Coherent, c.theta, c.mass, c.omega, dt);
    const auto b = oscillator_ehrenfest(kind, EhrenfestState::Coherent, c.theta, c.mass, c.omega, 0.5 * dt);
    const double ratio = a.max_residual / std::max(b.max_residual, 1e-300);
    rows.push_back(compare_row(ex, std::string("dt_halving_ratio_") + name, 4.0, ratio, 1.0));
    if (sink.enabled()) {
      auto os = sink.open(std::string("ehrenfest_") + name + ".csv");
      write_series_csv(os, coarse.times, coarse.residual);
    }
  }
  const auto inv = dynamics_invariants(c.theta, c.mass, c.omega, dt);
  rows.push_back(compare_row(ex, "continuity_residual", 0.0, inv.continuity, 1e-6));
  rows.push_back(compare_row(ex, "norm_drift_per_1000_steps", 0.0, inv.norm_drift, 1e-6));
  return rows;
}

// transition ---------------------------------------------------------------------------------

std::vector<ReportRow> transition_experiment(const ExperimentConfig& c, const Sink& sink) {
  const std::string ex = "transition";
  std::vector<ReportRow> rows;
  std::vector<TransitionSample> scan;
  for (double th : {0.02, 0.04, 0.08}) scan.push_back(oscillator_transition(th, c.mass, c.omega));
  double mean = 0.0;
  for (const auto& s : scan) mean += s.rate / (s.theta * s.theta) / scan.size();
  for (const auto& s : scan) {
    const std::string tag = "(theta=" + fmt(s.theta) + ")";
    rows.push_back(compare_row(ex, "rate_over_theta2" + tag, mean, s.rate / (s.theta * s.theta), 0.02 * mean));
    rows.push_back(check_row(ex, "regime_metric" + tag, s.regime_metric, 0.1, s.regime_metric <= 0.1));
  }
  const auto zero = oscillator_transition(0.0, c.mass, c.omega);
  rows.push_back(compare_row(ex, "rate_theta0", 0.0, zero.rate, 1e-14));
  if (sink.enabled()) {
    auto os = sink.open("transition_scan.csv");
    os << "theta,rate\n";
    os << format_number(0.0) << ',' << format_number(zero.rate) << '\n';
    for (const auto& s : scan) os << format_number(s.theta) << ',' << format_number(s.rate) << '\n';
  }
  return rows;
}

// galilean -----------------------------------------------------------------------------------

std::vector<ReportRow> galilean_experiment(const ExperimentConfig& c, const Sink&) {
  const std::string ex = "galilean";
  std::vector<ReportRow> rows;
  const auto r = galilean_residuals(c.theta, c.mass);
  rows.push_back(compare_row(ex, "[G,H]-iP_x", 0.0, r.boost_hamiltonian, 1e-9));
  rows.push_back(compare_row(ex, "[G,P_x]-im", 0.0, r.boost_momentum, 1e-9));
  rows.push_back(compare_row(ex, "[G,P_t]+iP_x", 0.0, r.boost_energy, 1e-9));
  rows.push_back(compare_row(ex, "[X_L,T_L]+i*theta", 0.0, r.coordinates, 1e-9));
  rows.push_back(compare_row(ex, "[T_c,X_c]", 0.0, r.commuting, 1e-9));
  rows.push_back(compare_row(ex, "boost_forms_agree", 0.0, r.boost_forms, 1e-9));
  if (c.theta > 0.0) rows.push_back(compare_row(ex, "P_x_from_time_operators", 0.0, r.momentum_from_time, 1e-9));

  // Plane-wave closed form: theta adds the phase v theta p^2 / 2.
  const double v = 0.3, p = 1.0, E = 0.5;
  const auto with = boost_plane_wave(E, p, v, c.mass, 0.2);
  const auto without = boost_plane_wave(E, p, v, c.mass, 0.0);
  const double extra = std::arg(with(0.7, -0.4) / without(0.7, -0.4));
  rows.push_back(compare_row(ex, "boost_extra_phase(theta=0.2,p=1)", v * 0.1, extra, 1e-12));
  return rows;
}

// symplectic ---------------------------------------------------------------------------------

std::vector<ReportRow> symplectic_experiment(const ExperimentConfig& c, const Sink& sink) {
  const std::string ex = "symplectic";
  std::vector<ReportRow> rows;
  const double th = c.theta > 0.0 ? c.theta : 0.1;

  VarianceMatrix vac;
  vac.V = 0.5 * Eigen::Matrix4d::Identity();
  const auto nu_vac = symplectic_eigenvalues(vac, symplectic_form(0.0));
  rows.push_back(compare_row(ex, "vacuum_nu_max", reference("symplectic.vacuum_nu"), nu_vac[0], 1e-12));
  rows.push_back(compare_row(ex, "vacuum_nu_min", reference("symplectic.vacuum_nu"), nu_vac[1], 1e-12));

  const auto table = williamson_analysis(printed_variance_matrix(th));
  rows.push_back(compare_row(ex, "table_det_preserved", table.det_theta, table.det_commutative, 1e-10));
  rows.push_back(compare_row(ex, "table_nu_product", reference("symplectic.nu_product"), table.nu[0] * table.nu[1], 1e-6));

  const auto cv = coherent_variance_matrix(th);
  const auto state = williamson_analysis(cv.numeric);
  rows.push_back(compare_row(ex, "state_det_preserved", state.det_theta, state.det_commutative, 1e-10));
  rows.push_back(compare_row(ex, "state_nu_product", reference("symplectic.nu_product"), state.nu[0] * state.nu[1], 1e-6));
  rows.push_back(check_row(ex, "state_nu_min_at_least_1", state.nu[1], 1e-9, state.nu[1] >= 1.0 - 1e-9));

  OscillatorParams p{c.mass, c.omega, th};
  const StarKernel k = voros(th);
  const SliceState psi = oscillator_ground(p, oscillator_line(th, c.mass, c.omega, 512)).slice;
  const auto X = SymbolOperator::make(OpKind::X_L, th, c.mass);
  const auto T = SymbolOperator::make(OpKind::T_L, th, c.mass);
  const auto P = SymbolOperator::make(OpKind::P_x, th, c.mass);
  const auto Xc = SymbolOperator::make(OpKind::X_c, th, c.mass);
  const auto Tc = SymbolOperator::make(OpKind::T_c, th, c.mass);
  const auto xp = robertson_schrodinger_check(X, P, psi, k);
  rows.push_back(compare_row(ex, "robertson_XP_lhs", 0.5, xp.lhs, 1e-6));
  rows.push_back(compare_row(ex, "robertson_XP_rhs", 0.5, xp.robertson_rhs, 1e-6));
  const auto xt = robertson_schrodinger_check(X, T, psi, k);
  rows.push_back(compare_row(ex, "robertson_XT_rhs", 0.5 * th, xt.robertson_rhs, 1e-8));
  rows.push_back(check_row(ex, "robertson_XT_holds", xt.lhs - xt.schrodinger_rhs, 1e-8, xt.holds));
  const auto cc = robertson_schrodinger_check(Xc, Tc, psi, k);
  rows.push_back(compare_row(ex, "robertson_commuting_rhs", 0.0, cc.robertson_rhs, 1e-8));
  if (sink.enabled()) {
    nlohmann::json j{{"table_commutative", table.commutative.to_json()}, {"state_commutative", state.commutative.to_json()},
                     {"table_nu", table.nu}, {"state_nu", state.nu}};
    sink.open("symplectic.json") << j.dump(2) << '\n';
  }
  return rows;
}

}  // namespace

GridSpec oscillator_line(double theta, double mass, double omega, int n) {
  const double half = 12.0 * std::max(1.0 / std::sqrt(mass * omega), std::sqrt(theta));
  return resolved_line(half, theta, n);
}

StarLatticeResult star_plane_wave_lattice(const std::vector<double>& thetas) {
  const auto start = std::chrono::steady_clock::now();
  StarLatticeResult r;
  const double vals[5] = {-2.0, -1.0, 0.0, 1.0, 2.0};
  for (double th : thetas) {
    const GridSpec g = resolved_box(kPi, th, 64);
    StarKernel k = voros(th);
    std::vector<Field2D> waves;
    for (double E : vals)
      for (double p : vals)
        waves.push_back(sample_field([=](double t, double x) { return std::exp(cplx(0.0, -(E * t - p * x))); }, g));
    for (int i = 0; i < 25; ++i)
      for (int j = 0; j < 25; ++j) {
        const Field2D out = star(k, waves[i], waves[j]);
        const cplx c = plane_wave_star_factor(vals[i / 5], vals[i % 5], vals[j / 5], vals[j % 5], th);
        const Grid2 want = c * waves[i].values * waves[j].values;
        r.max_relative_error =
            std::max(r.max_relative_error, (out.values - want).abs().maxCoeff() / want.abs().maxCoeff());
        ++r.products;
      }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

PacketWidthSample packet_width_sample(double sigma, double mass, double theta, double t) {
  PacketParams p{sigma, mass, theta};
  PacketWidthSample s;
  s.theta = theta;
  s.t = t;
  s.closed_form = packet_width(p, t);
  const double reach = 12.0 * std::max(s.closed_form, std::sqrt(std::norm(p.lambda(t)) / p.lambda(t).real()));
  const GridSpec g = resolved_line(reach, theta, 512);
  const auto slice = free_packet(p, t, g);
  s.density = measured_width(slice.field.values, g);
  s.fitted = std::sqrt(2.0 * std::abs(fitted_packet_parameter(slice.field.values, g)));
  return s;
}

GalileanResiduals galilean_residuals(double theta, double mass) {
  const GridSpec g = resolved_box(8.0, theta, 128);
  const Field2D psi = sample_field(
      [](double t, double x) { return std::exp(cplx(-0.5 * (t * t + x * x), 0.5 * x - 0.3 * t)); }, g);
  const double peak = psi.max_abs();
  auto op = [&](OpKind k) { return SymbolOperator::make(k, theta, mass); };
  auto diff = [&](const Field2D& a, const Field2D& b) { return (a.values - b.values).abs().maxCoeff() / peak; };
  const auto G = op(OpKind::Boost), H = op(OpKind::Hamiltonian), P = op(OpKind::P_x), Pt = op(OpKind::P_t);
  const Field2D Ppsi = apply(P, psi);
  GalileanResiduals r;
  r.boost_hamiltonian = diff(commutator_apply(G, H, psi), Field2D(g, kI * Ppsi.values));
  r.boost_momentum = diff(commutator_apply(G, P, psi), Field2D(g, kI * mass * psi.values));
  r.boost_energy = diff(commutator_apply(G, Pt, psi), Field2D(g, -kI * Ppsi.values));
  r.coordinates = diff(commutator_apply(op(OpKind::X_L), op(OpKind::T_L), psi), Field2D(g, -kI * theta * psi.values));
  r.commuting = commutator_apply(op(OpKind::T_c), op(OpKind::X_c), psi).values.abs().maxCoeff() / peak;
  r.boost_forms = diff(apply(G, psi), apply(op(OpKind::BoostExpanded), psi));
  if (theta > 0.0) {
    const Field2D tl = apply(op(OpKind::T_L), psi), tr = apply(op(OpKind::T_R), psi);
    r.momentum_from_time = diff(Ppsi, Field2D(g, -(tl.values - tr.values) / theta));
  }
  return r;
}

namespace {

SliceState coherent(double theta, double mass, double omega, const GridSpec& line) {
  OscillatorParams p{mass, omega, theta};
  return oscillator_coherent_state(p, 1.0 / std::sqrt(mass * omega), 0.5 * std::sqrt(mass * omega), 24, line);
}

}  // namespace

EhrenfestSeries oscillator_ehrenfest(OpKind kind, EhrenfestState state, double theta, double mass, double omega,
                                     double dt, double duration) {
  const GridSpec line = oscillator_line(theta, mass, omega, 256);
  OscillatorParams p{mass, omega, theta};
  const SliceState psi0 =
      state == EhrenfestState::Ground ? oscillator_eigenstate(p, 0, line) : coherent(theta, mass, omega, line);
  const double h = 0.01;
  const int stride = static_cast<int>(std::lround(h / dt));
  if (std::abs(stride * dt - h) > 1e-12) throw InvalidInput("oscillator_ehrenfest: dt must divide 0.01");
  const int steps = static_cast<int>(std::lround(duration / dt));
  const StarKernel k = voros(theta);
  const auto traj = evolve(psi0, Potential::harmonic(mass, omega), k, mass, dt, steps, stride);
  return ehrenfest_residual(traj, SymbolOperator::make(kind, theta, mass), k, h);
}

DynamicsInvariants dynamics_invariants(double theta, double mass, double omega, double dt) {
  DynamicsInvariants r;
  const StarKernel k = voros(theta);
  const double h = 0.01;
  const int stride = static_cast<int>(std::lround(h / dt));
  {
    // Free packet carrying one energy tag.
    const GridSpec line = resolved_line(16.0, theta, 256);
    const Eigen::ArrayXd x = line.x_nodes();
    const double p0 = 1.0;
    Eigen::ArrayXcd v(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) v[j] = std::exp(cplx(-0.5 * x[j] * x[j], p0 * x[j]));
    SliceState psi = SliceState::stationary(line, 0.0, v, 0.5 * p0 * p0 / mass);
    psi = cplx(1.0 / std::sqrt(slice_inner(psi, psi, theta).real())) * psi;
    const auto traj = evolve(psi, Potential::none(), k, mass, dt, 4 * stride, stride);
    std::vector<Eigen::ArrayXd> rho;
    for (const auto& s : traj.slices) rho.push_back(probability_density(k, s));
    const Eigen::ArrayXd drho = (rho[0] - 8.0 * rho[1] + 8.0 * rho[3] - rho[4]) / (12.0 * h);
    const Eigen::ArrayXd j = probability_current(k, traj.slices[2], mass);
    const Eigen::ArrayXd dj = spectral_derivative(j.cast<cplx>().eval(), line.length_x(), 1).real();
    r.continuity = (drho + dj).abs().maxCoeff();
  }
  {
    const GridSpec line = oscillator_line(theta, mass, omega, 256);
    const SliceState psi0 = coherent(theta, mass, omega, line);
    const double n0 = slice_inner(psi0, psi0, theta).real();
    r.steps = 1000;
    const auto traj = evolve(psi0, Potential::harmonic(mass, omega), k, mass, dt, r.steps, r.steps);
    const double n1 = slice_inner(traj.slices.back(), traj.slices.back(), theta).real();
    r.norm_drift = std::abs(n1 / n0 - 1.0);
  }
  return r;
}

TransitionSample oscillator_transition(double theta, double mass, double omega, double amplitude) {
  OscillatorParams p{mass, omega, theta};
  const GridSpec line = oscillator_line(theta, mass, omega, 256);
  const auto pulse = PulseSamples::gaussian(amplitude, kPulseWidth, kPulseCenter, kPulseDuration, 4001);
  const auto r = transition_amplitude(pulse, 0, 1, kPulseDuration, p, voros(theta), line);
  return {theta, r.amplitude, transition_rate(r.amplitude, kPulseDuration), r.regime_metric};
}

std::vector<ReportRow> run_experiment(const std::string& name, const ExperimentConfig& config) {
  Sink sink;
  if (!config.output.directory.empty()) {
    sink.dir = config.output.directory;
    std::error_code ec;
    std::filesystem::create_directories(sink.dir, ec);
    if (ec) throw InvalidInput("cannot create output directory " + sink.dir.string());
  }
  if (name == "star-check") return star_check(config, sink);
  if (name == "free-packet") return free_packet_experiment(config, sink);
  if (name == "oscillator") return oscillator_experiment(config, sink);
  if (name == "moments") return moments_experiment(config, sink);
  if (name == "ehrenfest") return ehrenfest_experiment(config, sink);
  if (name == "transition") return transition_experiment(config, sink);
  if (name == "galilean") return galilean_experiment(config, sink);
  if (name == "symplectic") return symplectic_experiment(config, sink);
  throw InvalidInput("unknown experiment '" + name + "'");
}

std::vector<ReportRow> run_experiments(const ExperimentConfig& config) {
  config.validate();
  std::vector<ReportRow> rows;
  for (const auto& e : config.experiments) {
    auto r = run_experiment(e, config);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

}  // namespace ncqm
