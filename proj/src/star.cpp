#include "ncqm/star.hpp"

#include <cmath>
#include <sstream>

#include "ncqm/fft.hpp"

namespace ncqm {

namespace {

struct Mode {
  int q0, q1;
  cplx c;
};

std::vector<Mode> significant_modes(Grid2& coef, double cutoff, int* kept) {
  *kept = fft::prune(coef, cutoff);
  std::vector<Mode> out;
  out.reserve(*kept);
  for (int i = 0; i < coef.rows(); ++i)
    for (int j = 0; j < coef.cols(); ++j)
      if (coef(i, j) != 0.0) out.push_back({i, j, coef(i, j)});
  return out;
}

Field2D star_fourier(const StarKernel& kern, const Field2D& f, const Field2D& g, StarDiagnostics* diag) {
  const GridSpec& s = f.spec;
  const double a = kern.half_theta();
  const Eigen::ArrayXd k0 = s.t_wavenumbers();
  const Eigen::ArrayXd k1 = s.x_wavenumbers();

  Grid2 cf = fft::forward(f.values);
  Grid2 cg = fft::forward(g.values);
  int kept_f = 0, kept_g = 0;
  const auto mf = significant_modes(cf, kern.cutoff, &kept_f);
  const auto mg = significant_modes(cg, kern.cutoff, &kept_g);

  // The multiplier factorizes over the four mode-index pairs, so tabulate each factor once.
  const int nt = s.n_t, nx = s.n_x;
  const bool voros = kern.flavor == Flavor::Voros;
  Eigen::ArrayXXd tt(nt, nt), xx(nx, nx);
  Eigen::ArrayXXcd tx(nt, nx), xt(nx, nt);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nt; ++j) tt(i, j) = voros ? std::exp(-a * k0[i] * k0[j]) : 1.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j) xx(i, j) = voros ? std::exp(-a * k1[i] * k1[j]) : 1.0;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nx; ++j) {
      tx(i, j) = std::exp(cplx(0.0, -a * k0[i] * k1[j]));
      xt(j, i) = std::exp(cplx(0.0, a * k1[j] * k0[i]));
    }

  Grid2 out = Grid2::Zero(nt, nx);
  for (const Mode& u : mf) {
    for (const Mode& v : mg) {
      const cplx w = tt(u.q0, v.q0) * xx(u.q1, v.q1) * tx(u.q0, v.q1) * xt(u.q1, v.q0);
      out((u.q0 + v.q0) % nt, (u.q1 + v.q1) % nx) += u.c * v.c * w;
    }
  }
  if (diag) {
    diag->method = "FourierKernel";
    diag->K = 0;
    diag->term_norms.clear();
    diag->kept_modes_left = kept_f;
    diag->kept_modes_right = kept_g;
    diag->cutoff = kern.cutoff;
  }
  Field2D res(s, fft::inverse(out));
  res.edge_warning = f.edge_warning || g.edge_warning;
  return res;
}

// Derivative d_t^r d_x^q of a field given its transform.
Grid2 mixed_derivative(const Grid2& coef, const GridSpec& s, int r, int q) {
  const Eigen::ArrayXd k0 = s.t_wavenumbers();
  const Eigen::ArrayXd k1 = s.x_wavenumbers();
  Grid2 c = coef;
  for (int i = 0; i < s.n_t; ++i)
    for (int j = 0; j < s.n_x; ++j) c(i, j) *= std::pow(kI * k0[i], r) * std::pow(kI * k1[j], q);
  return fft::inverse(c);
}

Field2D star_series(const StarKernel& kern, const Field2D& f, const Field2D& g, StarDiagnostics* diag) {
  const GridSpec& s = f.spec;
  const double a = kern.half_theta();
  const int K = kern.order;
  const Grid2 cf = fft::forward(f.values);
  const Grid2 cg = fft::forward(g.values);

  Grid2 sum = Grid2::Zero(s.n_t, s.n_x);
  std::vector<double> norms;
  double fact = 1.0;
  for (int n = 0; n <= K; ++n) {
    if (n > 0) fact *= n;
    Grid2 term = Grid2::Zero(s.n_t, s.n_x);
    if (kern.flavor == Flavor::Voros) {
      // (d_t - i d_x)^n f times (d_t + i d_x)^n g, expanded binomially.
      Grid2 left = Grid2::Zero(s.n_t, s.n_x), right = Grid2::Zero(s.n_t, s.n_x);
      double binom = 1.0;
      for (int r = 0; r <= n; ++r) {
        if (r > 0) binom = binom * (n - r + 1) / r;
        left += binom * std::pow(-kI, n - r) * mixed_derivative(cf, s, r, n - r);
        right += binom * std::pow(kI, n - r) * mixed_derivative(cg, s, r, n - r);
      }
      term = std::pow(a, n) / fact * left * right;
    } else {
      // (i a)^n (d_t <- -> d_x  -  d_x <- -> d_t)^n
      double binom = 1.0;
      for (int r = 0; r <= n; ++r) {
        if (r > 0) binom = binom * (n - r + 1) / r;
        const double sign = ((n - r) % 2 == 0) ? 1.0 : -1.0;
        term += binom * sign * mixed_derivative(cf, s, r, n - r) * mixed_derivative(cg, s, n - r, r);
      }
      term *= std::pow(kI * a, n) / fact;
    }
    norms.push_back(term.abs().maxCoeff());
    sum += term;
  }
  if (diag) {
    diag->method = "Series";
    diag->K = K;
    diag->term_norms = norms;
    diag->kept_modes_left = static_cast<int>(cf.size());
    diag->kept_modes_right = static_cast<int>(cg.size());
    diag->cutoff = 0.0;
  }
  if (norms.front() > 0.0 && norms.back() > 1e-3 * norms.front()) {
    StarDiagnostics d;
    d.method = "Series";
    d.K = K;
    d.term_norms = norms;
    throw ConvergenceFailure("star series did not converge at order " + std::to_string(K), d.to_json().dump());
  }
  Field2D res(s, std::move(sum));
  res.edge_warning = f.edge_warning || g.edge_warning;
  return res;
}

}  // namespace

void StarKernel::validate() const {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw InvalidInput("star kernel theta must be >= 0");
  if (method == StarMethod::Series && order < 1) throw InvalidInput("series order K must be >= 1");
  if (!(cutoff >= 0.0) || cutoff >= 1.0) throw InvalidInput("mode cutoff must lie in [0, 1)");
}

nlohmann::json StarDiagnostics::to_json() const {
  return nlohmann::json{{"method", method}, {"K", K}, {"term_norms", term_norms}};
}

std::string to_string(Flavor f) { return f == Flavor::Voros ? "Voros" : "Moyal"; }
std::string to_string(StarMethod m) { return m == StarMethod::FourierKernel ? "FourierKernel" : "Series"; }

Flavor parse_flavor(const std::string& s) {
  if (s == "Voros" || s == "voros") return Flavor::Voros;
  if (s == "Moyal" || s == "moyal") return Flavor::Moyal;
  throw InvalidInput("unknown star flavor '" + s + "'");
}

StarMethod parse_method(const std::string& s) {
  if (s == "FourierKernel" || s == "fourier") return StarMethod::FourierKernel;
  if (s == "Series" || s == "series") return StarMethod::Series;
  throw InvalidInput("unknown star method '" + s + "'");
}

Field2D star(const StarKernel& kernel, const Field2D& f, const Field2D& g, StarDiagnostics* diag) {
  kernel.validate();
  if (!(f.spec == g.spec)) throw InvalidInput("star: operands live on different grids");
  if (std::abs(kernel.theta - f.spec.theta) > 1e-15)
    throw InvalidInput("star: kernel theta differs from the grid theta");
  if (kernel.theta == 0.0) {
    if (diag) *diag = StarDiagnostics{to_string(kernel.method), 0, {}, 0, 0, 0.0};
    Field2D res(f.spec, f.values * g.values);
    res.edge_warning = f.edge_warning || g.edge_warning;
    return res;
  }
  return kernel.method == StarMethod::FourierKernel ? star_fourier(kernel, f, g, diag)
                                                     : star_series(kernel, f, g, diag);
}

cplx mode_pair_factor(double k0, double k1, double k0p, double k1p, double theta, Flavor flavor) {
  const double a = 0.5 * theta;
  const double re = flavor == Flavor::Voros ? -a * (k0 * k0p + k1 * k1p) : 0.0;
  return std::exp(cplx(re, -a * (k0 * k1p - k1 * k0p)));
}

cplx plane_wave_star_factor(double E, double p, double E2, double p2, double theta, Flavor flavor) {
  if (flavor == Flavor::Voros) return std::exp(-0.5 * theta * cplx(E, p) * cplx(E2, -p2));
  return mode_pair_factor(-E, p, -E2, p2, theta, flavor);
}

double cross_validate(const StarKernel& a, const StarKernel& b, const Field2D& f, const Field2D& g) {
  if (a.flavor != b.flavor || a.theta != b.theta)
    throw InvalidInput("cross_validate: kernels must share flavor and theta");
  const Field2D ra = star(a, f, g);
  const Field2D rb = star(b, f, g);
  const double scale = std::max(ra.max_abs(), rb.max_abs());
  if (scale == 0.0) return 0.0;
  return (ra.values - rb.values).abs().maxCoeff() / scale;
}

}  // namespace ncqm
