#include "ncqm/symbols.hpp"

#include <cmath>
#include <sstream>

#include "ncqm/fft.hpp"

namespace ncqm {

namespace {

void require_voros(const StarKernel& k, const char* what) {
  if (k.flavor != Flavor::Voros)
    throw InvalidInput(std::string(what) + " requires the Voros flavor; Moyal densities are not positive");
}

constexpr int kMaxDensityTerms = 400;
constexpr double kDensityStop = 1e-12;

}  // namespace

Function2 momentum_symbol(const MomentumLabel& label, double theta) {
  if (!(theta >= 0.0)) throw InvalidInput("theta must be >= 0");
  const double amp = std::exp(-0.25 * theta * (label.E * label.E + label.p * label.p)) / (2.0 * kPi);
  return [amp, E = label.E, p = label.p](double t, double x) {
    return amp * std::exp(cplx(0.0, -(E * t - p * x)));
  };
}

double regularized_delta(double u, double sigma) {
  return std::exp(-u * u / (2.0 * sigma * sigma)) / std::sqrt(2.0 * kPi * sigma * sigma);
}

cplx regularized_delta(cplx u, double sigma) {
  return std::exp(-u * u / (2.0 * sigma * sigma)) / std::sqrt(2.0 * kPi * sigma * sigma);
}

double basis_overlap(const CoherentPoint& a, const CoherentPoint& b) {
  if (a.theta != b.theta) throw InvalidInput("basis_overlap: points carry different theta");
  if (!(a.theta > 0.0)) throw InvalidInput("basis_overlap: theta must be positive");
  const double s = std::sqrt(a.theta);
  return regularized_delta(a.t - b.t, s) * regularized_delta(a.x - b.x, s);
}

cplx induced_inner_product(const StarKernel& kernel, const SliceState& psi, const SliceState& phi) {
  require_voros(kernel, "induced_inner_product");
  return slice_inner(psi, phi, kernel.theta, kernel.cutoff);
}

cplx induced_inner_product(const StarKernel& kernel, const Field1D& psi, const Field1D& phi) {
  if (!(psi.spec == phi.spec) || psi.t_slice != phi.t_slice)
    throw InvalidInput("induced_inner_product: slices differ in grid or time");
  if (kernel.theta != 0.0)
    throw InvalidInput(
        "induced_inner_product: the star product needs time derivatives; tag each slice with its energy "
        "(SliceState::stationary) or pass full 2-D fields");
  return (psi.values.conjugate() * phi.values).sum() * psi.spec.dx();
}

cplx induced_inner_product(const StarKernel& kernel, const Field2D& psi, const Field2D& phi, int row) {
  require_voros(kernel, "induced_inner_product");
  if (row < 0 || row >= psi.spec.n_t) throw InvalidInput("induced_inner_product: time row out of range");
  Field2D conj_psi(psi.spec, psi.values.conjugate());
  const Field2D prod = star(kernel, conj_psi, phi);
  return prod.values.row(row).sum() * psi.spec.dx();
}

cplx full_inner_product(const StarKernel& kernel, const Field2D& psi, const Field2D& phi) {
  if (!(psi.spec == phi.spec)) throw InvalidInput("full_inner_product: operands live on different grids");
  const GridSpec& s = psi.spec;
  Grid2 a = fft::forward(psi.values);
  Grid2 b = fft::forward(phi.values);
  fft::prune(a, kernel.cutoff);
  fft::prune(b, kernel.cutoff);
  const Eigen::ArrayXd k0 = s.t_wavenumbers();
  const Eigen::ArrayXd k1 = s.x_wavenumbers();
  const double h = kernel.flavor == Flavor::Voros ? kernel.half_theta() : 0.0;
  cplx total = 0.0;
  for (int i = 0; i < s.n_t; ++i)
    for (int j = 0; j < s.n_x; ++j) {
      if (a(i, j) == 0.0 || b(i, j) == 0.0) continue;
      total += std::conj(a(i, j)) * b(i, j) * std::exp(h * (k0[i] * k0[i] + k1[j] * k1[j]));
    }
  return total * s.length_t() * s.length_x();
}

DensityResult probability_density(const StarKernel& kernel, const Field2D& psi, bool cross_check) {
  require_voros(kernel, "probability_density");
  const GridSpec& s = psi.spec;
  DensityResult res;
  if (kernel.theta == 0.0) {
    res.density = Field2D(s, psi.values.abs2().cast<cplx>());
    res.terms = 1;
    return res;
  }
  const double a = kernel.half_theta();
  const Eigen::ArrayXd k0 = s.t_wavenumbers();
  const Eigen::ArrayXd k1 = s.x_wavenumbers();
  Grid2 c = fft::forward(psi.values);
  fft::prune(c, kernel.cutoff);

  // c_n holds the transform of a^{n/2} dzbar^n psi / sqrt(n!).
  Eigen::ArrayXXd sum = Eigen::ArrayXXd::Zero(s.n_t, s.n_x);
  int n = 0;
  for (; n < kMaxDensityTerms; ++n) {
    const Eigen::ArrayXXd term = fft::inverse(c).abs2();
    sum += term;
    const double tmax = term.maxCoeff();
    if (tmax < kDensityStop * sum.maxCoeff() || tmax == 0.0) break;
    const double scale = std::sqrt(a / (n + 1));
    for (int i = 0; i < s.n_t; ++i)
      for (int j = 0; j < s.n_x; ++j) c(i, j) *= scale * cplx(-k1[j], k0[i]);
  }
  if (n == kMaxDensityTerms)
    throw ConvergenceFailure("density series did not reach its relative stop", "terms=" + std::to_string(n));
  res.terms = n + 1;
  res.density = Field2D(s, sum.cast<cplx>());
  res.density.edge_warning = psi.edge_warning;
  if (cross_check) {
    StarKernel direct = kernel;
    direct.method = StarMethod::FourierKernel;
    const Field2D rho = star(direct, Field2D(s, psi.values.conjugate()), psi);
    const double peak = sum.maxCoeff();
    res.cross_check = peak > 0.0 ? (rho.values - res.density.values).abs().maxCoeff() / peak : 0.0;
  }
  return res;
}

Eigen::ArrayXd probability_density(const StarKernel& kernel, const SliceState& psi) {
  require_voros(kernel, "probability_density");
  return slice_star(psi, true, psi, kernel.theta, kernel.cutoff).real();
}

Eigen::ArrayXd probability_density_series(const StarKernel& kernel, const SliceState& psi, int* terms) {
  require_voros(kernel, "probability_density");
  const double a = kernel.half_theta();
  SliceState cur = kernel.theta > 0.0 ? prune_modes(psi, kernel.cutoff) : psi;
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(psi.spec.n_x);
  int n = 0;
  for (; n < kMaxDensityTerms; ++n) {
    const Eigen::ArrayXd term = cur.values().abs2();
    sum += term;
    if (kernel.theta == 0.0) break;
    const double tmax = term.maxCoeff();
    if (tmax < kDensityStop * sum.maxCoeff() || tmax == 0.0) break;
    // Re-prune: each derivative lifts the FFT noise floor, which the next one would amplify.
    cur = prune_modes(cplx(std::sqrt(a / (n + 1))) * (d_t(cur) + kI * d_x(cur)), kernel.cutoff);
  }
  if (n == kMaxDensityTerms)
    throw ConvergenceFailure("density series did not reach its relative stop", "terms=" + std::to_string(n));
  if (terms) *terms = n + 1;
  return sum;
}

Field2D probability_current(const StarKernel& kernel, const Field2D& psi, double mass) {
  require_voros(kernel, "probability_current");
  if (!(mass > 0.0)) throw InvalidInput("probability_current: mass must be positive");
  const Field2D dpsi = spectral_derivative(psi, Axis::x, 1);
  StarKernel direct = kernel;
  direct.method = StarMethod::FourierKernel;
  const Field2D z = star(direct, Field2D(psi.spec, psi.values.conjugate()), dpsi);
  return Field2D(psi.spec, (z.values.imag() / mass).cast<cplx>());
}

Eigen::ArrayXd probability_current(const StarKernel& kernel, const SliceState& psi, double mass) {
  require_voros(kernel, "probability_current");
  if (!(mass > 0.0)) throw InvalidInput("probability_current: mass must be positive");
  return slice_star(psi, true, d_x(psi), kernel.theta, kernel.cutoff).imag() / mass;
}

Field2D onshell_project(const Eigen::ArrayXd& p, const Eigen::ArrayXcd& samples, double mass, double theta,
                        const GridSpec& window, ProjectionNorm norm) {
  if (!(mass > 0.0)) throw InvalidInput("onshell_project: mass must be positive");
  if (p.size() != samples.size() || p.size() < 1) throw InvalidInput("onshell_project: sample count mismatch");
  const Eigen::Index n = p.size();
  if (std::abs(p[0] + p[n - 1]) > 1e-12 * std::max(1.0, std::abs(p[0])))
    throw InvalidInput("onshell_project: momentum grid must be symmetric about 0");
  const double dp = n > 1 ? (p[n - 1] - p[0]) / (n - 1) : 1.0;
  if (n > 1) {
    // Phase advance per momentum step at the window corners.
    const double pmax = p.abs().maxCoeff();
    const double tmax = std::max(std::abs(window.t_min), std::abs(window.t_max));
    const double xmax = std::max(std::abs(window.x_min), std::abs(window.x_max));
    const double swing = (pmax * tmax / mass + xmax) * dp;
    if (swing > kPi) {
      std::ostringstream os;
      os << "onshell_project: momentum step " << dp << " too coarse; need dp <= "
         << kPi / (pmax * tmax / mass + xmax);
      throw InvalidInput(os.str());
    }
  }
  const double pref = norm == ProjectionNorm::Packet ? 1.0 : std::sqrt(2.0 * kPi);
  Eigen::ArrayXcd weight(n);
  Eigen::ArrayXd energy(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    energy[q] = p[q] * p[q] / (2.0 * mass);
    weight[q] = samples[q] * dp * pref * std::exp(-0.25 * theta * (energy[q] * energy[q] + p[q] * p[q])) /
                (2.0 * kPi);
  }
  Field2D out(window);
  for (int i = 0; i < window.n_t; ++i) {
    const double t = window.t_at(i);
    for (int j = 0; j < window.n_x; ++j) {
      const double x = window.x_at(j);
      cplx acc = 0.0;
      for (Eigen::Index q = 0; q < n; ++q) {
        if (weight[q] == 0.0) continue;
        acc += weight[q] * std::exp(cplx(0.0, -(energy[q] * t - p[q] * x)));
      }
      out.values(i, j) = acc;
    }
  }
  return out;
}

Field2D quasi_projection_apply(const Field2D& psi, double t) {
  const GridSpec& s = psi.spec;
  if (!(s.theta > 0.0)) throw InvalidInput("quasi projection needs theta > 0");
  if (t < s.t_min || t > s.t_max) throw InvalidInput("quasi projection time outside the grid");
  const double a = 0.5 * s.theta;
  const double sig = std::sqrt(s.theta);
  const Eigen::ArrayXd k0 = s.t_wavenumbers();
  const Eigen::ArrayXd k1 = s.x_wavenumbers();
  const Eigen::ArrayXd tp = s.t_nodes();
  Grid2 c = fft::forward(psi.values);
  fft::prune(c, 1e-14);

  // Each mode e^{i(k0 t + k1 x)} maps to e^{i k0 t + i k1 x' - i a k0 k1} delta(t - t' + a(i k0 - k1)).
  Grid2 out_modes = Grid2::Zero(s.n_t, s.n_x);
  for (int i = 0; i < s.n_t; ++i)
    for (int j = 0; j < s.n_x; ++j) {
      const cplx cij = c(i, j);
      if (cij == 0.0) continue;
      const cplx phase = std::exp(cplx(0.0, k0[i] * (t - s.t_min) - a * k0[i] * k1[j]));
      for (int r = 0; r < s.n_t; ++r) {
        const cplx arg = cplx(t - tp[r] - a * k1[j], a * k0[i]);
        out_modes(r, j) += cij * phase * regularized_delta(arg, sig);
      }
    }
  // Rows now hold x-mode coefficients; transform each back to nodes.
  Field2D out(s);
  for (int r = 0; r < s.n_t; ++r) {
    Eigen::ArrayXcd row = out_modes.row(r).transpose();
    out.values.row(r) = fft::inverse(row).transpose();
  }
  return out;
}

QuasiProjectionReport quasi_projection_discrepancy(double theta, double t, double t2,
                                                   const std::vector<Field2D>& states) {
  QuasiProjectionReport rep;
  const double d = regularized_delta(t2 - t, std::sqrt(theta));
  const double d0 = regularized_delta(0.0, std::sqrt(theta));
  double scale = 0.0;
  for (const auto& psi : states) {
    if (std::abs(psi.spec.theta - theta) > 1e-15) throw InvalidInput("quasi projection: theta mismatch");
    const Field2D once = quasi_projection_apply(psi, t);
    const Field2D twice = quasi_projection_apply(once, t2);
    const Field2D ref = quasi_projection_apply(psi, t2);
    rep.discrepancy = std::max(rep.discrepancy, (twice.values - d * ref.values).abs().maxCoeff());
    scale = std::max(scale, once.max_abs() * d0);
  }
  rep.ratio = scale > 0.0 ? rep.discrepancy / scale : 0.0;
  return rep;
}

}  // namespace ncqm
