#include "ncqm/fieldgrid.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ncqm/fft.hpp"

namespace ncqm {

namespace {

Eigen::ArrayXd nodes(int n, double lo, double hi) {
  const double h = (hi - lo) / n;
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + i * h;
  return out;
}

Eigen::ArrayXd wavenumbers(int n, double length) {
  Eigen::ArrayXd k(n);
  for (int q = 0; q < n; ++q) k[q] = 2.0 * kPi * signed_mode(q, n) / length;
  return k;
}

}  // namespace

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int signed_mode(int q, int n) { return q < n / 2 ? q : q - n; }

Eigen::ArrayXd GridSpec::t_nodes() const { return nodes(n_t, t_min, t_max); }
Eigen::ArrayXd GridSpec::x_nodes() const { return nodes(n_x, x_min, x_max); }
Eigen::ArrayXd GridSpec::t_wavenumbers() const { return wavenumbers(n_t, length_t()); }
Eigen::ArrayXd GridSpec::x_wavenumbers() const { return wavenumbers(n_x, length_x()); }

void GridSpec::validate() const {
  if (!is_power_of_two(n_t) || n_t < 8 || !is_power_of_two(n_x) || n_x < 8)
    throw InvalidInput("grid sizes must be powers of two >= 8 (got n_t=" + std::to_string(n_t) +
                       ", n_x=" + std::to_string(n_x) + ")");
  if (!(t_max > t_min) || !(x_max > x_min))
    throw InvalidInput("grid extents must satisfy t_max > t_min and x_max > x_min");
  if (!(theta >= 0.0) || !std::isfinite(theta))
    throw InvalidInput("theta must be finite and non-negative");
  if (theta > 0.0) {
    const double floor = std::sqrt(theta) / 4.0;
    if (dx() > floor * (1.0 + 1e-12) || dt() > floor * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "grid does not resolve sqrt(theta)/4 = " << floor << " (dt=" << dt() << ", dx=" << dx()
         << ")";
      throw InvalidInput(os.str());
    }
  }
}

GridSpec GridSpec::line(int n_x, double x_min, double x_max, double theta, double t_min,
                        double t_max) {
  GridSpec g;
  g.n_x = n_x;
  g.x_min = x_min;
  g.x_max = x_max;
  g.t_min = t_min;
  g.t_max = t_max;
  g.theta = theta;
  g.n_t = 8;
  if (theta > 0.0) {
    const double floor = std::sqrt(theta) / 4.0;
    while ((t_max - t_min) / g.n_t > floor) g.n_t *= 2;
  }
  return g;
}

GridSpec GridSpec::box(int n, double half_width, double theta) {
  GridSpec g;
  g.n_t = g.n_x = n;
  g.t_min = g.x_min = -half_width;
  g.t_max = g.x_max = half_width;
  g.theta = theta;
  return g;
}

Field2D::Field2D(const GridSpec& s) : spec(s), values(Grid2::Zero(s.n_t, s.n_x)) {}

Field2D::Field2D(const GridSpec& s, Grid2 v) : spec(s), values(std::move(v)) {
  if (values.rows() != s.n_t || values.cols() != s.n_x)
    throw InvalidInput("field shape does not match its grid");
}

Field1D::Field1D(const GridSpec& s, double t) : spec(s), t_slice(t), values(Eigen::ArrayXcd::Zero(s.n_x)) {}

Field1D::Field1D(const GridSpec& s, double t, Eigen::ArrayXcd v)
    : spec(s), t_slice(t), values(std::move(v)) {
  if (values.size() != s.n_x) throw InvalidInput("slice length does not match its grid");
}

Field2D sample_field(const Function2& f, const GridSpec& spec) {
  Field2D out(spec);
  for (int i = 0; i < spec.n_t; ++i) {
    const double t = spec.t_at(i);
    for (int j = 0; j < spec.n_x; ++j) {
      const double x = spec.x_at(j);
      const cplx v = f(t, x);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::ostringstream os;
        os << "non-finite sample at node (i_t=" << i << ", i_x=" << j << ", t=" << t << ", x=" << x << ")";
        throw InvalidInput(os.str());
      }
      out.values(i, j) = v;
    }
  }
  out.edge_warning = edge_ratio(out) > kEdgeTolerance;
  return out;
}

Field1D sample_slice(const Function1& f, const GridSpec& spec, double t_slice) {
  Field1D out(spec, t_slice);
  for (int j = 0; j < spec.n_x; ++j) {
    const cplx v = f(spec.x_at(j));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidInput("non-finite sample at node i_x=" + std::to_string(j));
    out.values[j] = v;
  }
  out.edge_warning = edge_ratio(out.values) > kEdgeTolerance;
  return out;
}

double edge_ratio(const Field2D& f) {
  const double peak = f.max_abs();
  if (peak == 0.0) return 0.0;
  const auto& v = f.values;
  const double edge = std::max({v.row(0).abs().maxCoeff(), v.row(v.rows() - 1).abs().maxCoeff(),
                                v.col(0).abs().maxCoeff(), v.col(v.cols() - 1).abs().maxCoeff()});
  return edge / peak;
}

double edge_ratio(const Eigen::ArrayXcd& v) {
  const double peak = v.abs().maxCoeff();
  if (peak == 0.0) return 0.0;
  return std::max(std::abs(v[0]), std::abs(v[v.size() - 1])) / peak;
}

Eigen::ArrayXcd spectral_derivative(const Eigen::ArrayXcd& v, double length, int order) {
  if (order < 1) throw InvalidInput("derivative order must be positive");
  const int n = static_cast<int>(v.size());
  Eigen::ArrayXcd c = fft::forward(v);
  for (int q = 0; q < n; ++q) {
    const int m = signed_mode(q, n);
    // Odd derivatives of the Nyquist mode are not representable by a real symbol.
    if (2 * m == -n && order % 2 == 1) {
      c[q] = 0.0;
      continue;
    }
    c[q] *= std::pow(kI * (2.0 * kPi * m / length), order);
  }
  return fft::inverse(c);
}

Field1D spectral_derivative(const Field1D& f, int order) {
  Field1D out(f.spec, f.t_slice, spectral_derivative(f.values, f.spec.length_x(), order));
  out.edge_warning = edge_ratio(f.values) > kEdgeTolerance;
  return out;
}

Field2D spectral_derivative(const Field2D& f, Axis axis, int order) {
  if (order < 1) throw InvalidInput("derivative order must be positive");
  const GridSpec& s = f.spec;
  Grid2 c = fft::forward(f.values);
  const int n = axis == Axis::t ? s.n_t : s.n_x;
  const double length = axis == Axis::t ? s.length_t() : s.length_x();
  Eigen::ArrayXcd mult(n);
  for (int q = 0; q < n; ++q) {
    const int m = signed_mode(q, n);
    mult[q] = (2 * m == -n && order % 2 == 1) ? cplx(0.0) : std::pow(kI * (2.0 * kPi * m / length), order);
  }
  if (axis == Axis::t) {
    for (int i = 0; i < s.n_t; ++i) c.row(i) *= mult[i];
  } else {
    for (int i = 0; i < s.n_t; ++i) c.row(i) *= mult.transpose();
  }
  Field2D out(s, fft::inverse(c));
  out.edge_warning = edge_ratio(f) > kEdgeTolerance;
  return out;
}

cplx integrate(const Field1D& f) { return f.values.sum() * f.spec.dx(); }

cplx integrate(const Field2D& f) { return f.values.sum() * f.spec.dx() * f.spec.dt(); }

Eigen::ArrayXcd integrate(const Field2D& f, Axis axis) {
  if (axis == Axis::x) return f.values.rowwise().sum() * f.spec.dx();
  return (f.values.colwise().sum() * f.spec.dt()).transpose();
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_csv(std::ostream& os, const Field2D& f) {
  os << "t,x,re,im\n";
  for (int i = 0; i < f.spec.n_t; ++i)
    for (int j = 0; j < f.spec.n_x; ++j)
      os << format_number(f.spec.t_at(i)) << ',' << format_number(f.spec.x_at(j)) << ','
         << format_number(f.values(i, j).real()) << ',' << format_number(f.values(i, j).imag()) << '\n';
}

void write_csv(std::ostream& os, const Field1D& f) {
  os << "t,x,re,im\n";
  for (int j = 0; j < f.spec.n_x; ++j)
    os << format_number(f.t_slice) << ',' << format_number(f.spec.x_at(j)) << ','
       << format_number(f.values[j].real()) << ',' << format_number(f.values[j].imag()) << '\n';
}

}  // namespace ncqm
