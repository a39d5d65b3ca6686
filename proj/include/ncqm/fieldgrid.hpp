#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ncqm {

using cplx = std::complex<double>;
using Grid2 = Eigen::Array<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition or configuration violation.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Iterative or truncated computation that did not meet its gate.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, std::string diagnostics)
      : Error(what), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  std::string diagnostics_;
};

enum class Axis { t, x };

struct GridSpec {
  int n_t = 256;
  int n_x = 256;
  double t_min = -1.0, t_max = 1.0;
  double x_min = -1.0, x_max = 1.0;
  double theta = 0.0;

  double dt() const { return (t_max - t_min) / n_t; }
  double dx() const { return (x_max - x_min) / n_x; }
  double length_t() const { return t_max - t_min; }
  double length_x() const { return x_max - x_min; }
  double t_at(int i) const { return t_min + i * dt(); }
  double x_at(int j) const { return x_min + j * dx(); }

  Eigen::ArrayXd t_nodes() const;
  Eigen::ArrayXd x_nodes() const;
  // Angular wavenumbers in transform order (0, 1, ..., n/2-1, -n/2, ..., -1).
  Eigen::ArrayXd t_wavenumbers() const;
  Eigen::ArrayXd x_wavenumbers() const;

  // Throws InvalidInput when sizes, spacings or the resolution floor are violated.
  void validate() const;
  bool operator==(const GridSpec&) const = default;

  // Grid for fixed-time work: the time axis only records the admissible slice range.
  static GridSpec line(int n_x, double x_min, double x_max, double theta,
                       double t_min = 0.0, double t_max = 1.0);
  // Square box of +-half_width on both axes with n nodes each.
  static GridSpec box(int n, double half_width, double theta);
};

bool is_power_of_two(int n);
int signed_mode(int q, int n);

struct Field2D {
  GridSpec spec;
  Grid2 values;  // (i_t, i_x)
  bool edge_warning = false;

  Field2D() = default;
  explicit Field2D(const GridSpec& s);
  Field2D(const GridSpec& s, Grid2 v);

  double max_abs() const { return values.abs().maxCoeff(); }
};

struct Field1D {
  GridSpec spec;
  double t_slice = 0.0;
  Eigen::ArrayXcd values;
  bool edge_warning = false;

  Field1D() = default;
  Field1D(const GridSpec& s, double t);
  Field1D(const GridSpec& s, double t, Eigen::ArrayXcd v);

  double max_abs() const { return values.abs().maxCoeff(); }
};

using Function2 = std::function<cplx(double t, double x)>;
using Function1 = std::function<cplx(double x)>;

Field2D sample_field(const Function2& f, const GridSpec& spec);
Field1D sample_slice(const Function1& f, const GridSpec& spec, double t_slice);

// Amplitude on the boundary nodes relative to the peak.
double edge_ratio(const Field2D& f);
double edge_ratio(const Eigen::ArrayXcd& v);
inline constexpr double kEdgeTolerance = 1e-10;

Field2D spectral_derivative(const Field2D& f, Axis axis, int order);
Field1D spectral_derivative(const Field1D& f, int order);
// Derivative of periodic samples spanning `length`.
Eigen::ArrayXcd spectral_derivative(const Eigen::ArrayXcd& v, double length, int order);

cplx integrate(const Field1D& f);
cplx integrate(const Field2D& f);
// Integrates along one axis only; the result is indexed by the remaining axis.
Eigen::ArrayXcd integrate(const Field2D& f, Axis axis);

void write_csv(std::ostream& os, const Field2D& f);
void write_csv(std::ostream& os, const Field1D& f);
std::string format_number(double v);

}  // namespace ncqm
