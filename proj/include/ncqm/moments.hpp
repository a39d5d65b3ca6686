#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "ncqm/dynamics.hpp"
#include "ncqm/operators.hpp"
#include "ncqm/slice.hpp"
#include "ncqm/star.hpp"

namespace ncqm {

inline constexpr double kNormTolerance = 1e-6;
inline constexpr double kNegativeVarianceFloor = -1e-10;

// <O> = (psi, O psi)_t; psi must be normalized under the induced inner product.
cplx expectation(const SymbolOperator& op, const SliceState& psi, const StarKernel& kernel);
// (psi, A B psi)_t
cplx expectation(const SymbolOperator& a, const SymbolOperator& b, const SliceState& psi, const StarKernel& kernel);
double variance(const SymbolOperator& op, const SliceState& psi, const StarKernel& kernel);
double uncertainty_product(const SymbolOperator& a, const SymbolOperator& b, const SliceState& psi,
                           const StarKernel& kernel);

struct BoundCheck {
  double lhs = 0.0;
  double robertson_rhs = 0.0;
  double schrodinger_rhs = 0.0;
  bool holds = true;  // lhs >= both bounds - 1e-8
};

BoundCheck robertson_schrodinger_check(const SymbolOperator& a, const SymbolOperator& b, const SliceState& psi,
                                       const StarKernel& kernel);

struct VarianceMatrix {
  Eigen::Matrix4d V = Eigen::Matrix4d::Zero();
  std::string ordering = kCanonicalOrdering;
  double theta = 0.0;

  nlohmann::json to_json() const;
  static VarianceMatrix from_json(const nlohmann::json& j);
};

struct SymplecticForm {
  Eigen::Matrix4d Omega = Eigen::Matrix4d::Zero();
  std::string ordering = kCanonicalOrdering;
  double theta = 0.0;
};

// Omega_{mu nu} = [Z_mu, Z_nu] / 2i for the deformed quadruple (theta = 0 gives the standard form).
SymplecticForm symplectic_form(double theta, const std::string& ordering = kCanonicalOrdering);

struct CoherentVarianceReport {
  VarianceMatrix printed;   // the closed-form table
  VarianceMatrix numeric;   // from the coherent-state symbol on a 2-D grid
  Eigen::Vector4d means = Eigen::Vector4d::Zero();
  double max_deviation = 0.0;
  bool agrees = false;      // max_deviation <= 1e-6
  double printed_det = 0.0;
  double numeric_det = 0.0;
};

// Closed-form table only.
VarianceMatrix printed_variance_matrix(double theta);
CoherentVarianceReport coherent_variance_matrix(double theta, int n = 128);

// Doubly degenerate moduli nu = 2 |eig(2 i Omega V)|, one per pair, descending.
std::vector<double> symplectic_eigenvalues(const VarianceMatrix& V, const SymplecticForm& omega);

// The map to commuting coordinates followed by the symplectic spectrum.
struct WilliamsonReport {
  VarianceMatrix commutative;
  std::vector<double> nu;
  double det_theta = 0.0;
  double det_commutative = 0.0;
};
WilliamsonReport williamson_analysis(const VarianceMatrix& v_theta);

struct EhrenfestSeries {
  std::vector<double> times;
  std::vector<double> derivative;     // finite-difference d<O>/dt
  std::vector<double> predicted;      // i<[H,O]> + <dO/dt>
  std::vector<double> residual;
  std::vector<double> force_predicted;  // P_x only: -<V'> - (theta/2)<V''(d_x - i d_t)>
  std::vector<double> force_residual;
  double max_residual = 0.0;
  double max_force_residual = 0.0;
};

// Differences use spacing `h` in time, which must be a multiple of the stored slice spacing.
EhrenfestSeries ehrenfest_residual(const Trajectory& traj, const SymbolOperator& op, const StarKernel& kernel,
                                   double h = 0.01);

void write_series_csv(std::ostream& os, const std::vector<double>& t, const std::vector<double>& v);

}  // namespace ncqm
