#include "ncqm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "ncqm/symbols.hpp"

namespace ncqm {

namespace {

void require_normalized(const SliceState& psi, const StarKernel& kernel) {
  if (kernel.flavor != Flavor::Voros) throw InvalidInput("expectations use the Voros induced inner product");
  const double n = slice_inner(psi, psi, kernel.theta, kernel.cutoff).real();
  if (std::abs(n - 1.0) > kNormTolerance)
    throw InvalidInput("expectation: state norm " + std::to_string(n) + " deviates from 1 by more than 1e-6");
}

double checked_variance(double mean_sq, double mean, const std::string& what) {
  const double v = mean_sq - mean * mean;
  if (v < kNegativeVarianceFloor)
    throw ConvergenceFailure("negative variance for " + what, "<O^2>=" + std::to_string(mean_sq) +
                                                                  " <O>=" + std::to_string(mean));
  return std::max(v, 0.0);
}

double explicit_time_derivative(const SymbolOperator& op, const SliceState& psi, const StarKernel& kernel) {
  switch (op.kind) {
    case OpKind::T_L:
    case OpKind::T_R:
    case OpKind::T_c:
      return 1.0;
    case OpKind::Boost:
    case OpKind::BoostExpanded:
      return -slice_inner(psi, apply(SymbolOperator::make(OpKind::P_x, op.theta), psi), kernel.theta,
                          kernel.cutoff).real();
    default:
      return 0.0;
  }
}

}  // namespace

cplx expectation(const SymbolOperator& op, const SliceState& psi, const StarKernel& kernel) {
  require_normalized(psi, kernel);
  return slice_inner(psi, apply(op, psi), kernel.theta, kernel.cutoff);
}

cplx expectation(const SymbolOperator& a, const SymbolOperator& b, const SliceState& psi,
                 const StarKernel& kernel) {
  require_normalized(psi, kernel);
  return slice_inner(psi, apply(a, apply(b, psi)), kernel.theta, kernel.cutoff);
}

double variance(const SymbolOperator& op, const SliceState& psi, const StarKernel& kernel) {
  const double m = expectation(op, psi, kernel).real();
  const double m2 = expectation(op, op, psi, kernel).real();
  return checked_variance(m2, m, to_string(op.kind));
}

double uncertainty_product(const SymbolOperator& a, const SymbolOperator& b, const SliceState& psi,
                           const StarKernel& kernel) {
  return std::sqrt(variance(a, psi, kernel) * variance(b, psi, kernel));
}

BoundCheck robertson_schrodinger_check(const SymbolOperator& a, const SymbolOperator& b, const SliceState& psi,
                                       const StarKernel& kernel) {
  const double ma = expectation(a, psi, kernel).real();
  const double mb = expectation(b, psi, kernel).real();
  const cplx ab = expectation(a, b, psi, kernel);
  const cplx ba = expectation(b, a, psi, kernel);
  BoundCheck r;
  r.lhs = uncertainty_product(a, b, psi, kernel);
  r.robertson_rhs = 0.5 * std::abs(ab - ba);
  const double cov = 0.5 * (ab + ba).real() - ma * mb;
  r.schrodinger_rhs = std::sqrt(r.robertson_rhs * r.robertson_rhs + cov * cov);
  r.holds = r.lhs >= r.robertson_rhs - 1e-8 && r.lhs >= r.schrodinger_rhs - 1e-8;
  return r;
}

nlohmann::json VarianceMatrix::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) rows.push_back({V(i, 0), V(i, 1), V(i, 2), V(i, 3)});
  return {{"ordering", ordering}, {"theta", theta}, {"matrix", rows}};
}

VarianceMatrix VarianceMatrix::from_json(const nlohmann::json& j) {
  if (!j.contains("ordering")) throw InvalidInput("variance matrix JSON lacks an ordering tag");
  VarianceMatrix v;
  v.ordering = j.at("ordering").get<std::string>();
  v.theta = j.value("theta", 0.0);
  const auto& rows = j.at("matrix");
  if (rows.size() != 4) throw InvalidInput("variance matrix must be 4x4");
  for (int i = 0; i < 4; ++i) {
    if (rows[i].size() != 4) throw InvalidInput("variance matrix must be 4x4");
    for (int k = 0; k < 4; ++k) v.V(i, k) = rows[i][k].get<double>();
  }
  return v;
}

SymplecticForm symplectic_form(double theta, const std::string& ordering) {
  const MTransform t = m_matrix(theta, ordering);  // validates the ordering
  Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
  c(0, 2) = 0.5;            // [X, P_x] = i
  c(1, 3) = 0.5;            // [T, P_t] = i
  c(0, 1) = -0.5 * theta;   // [X, T] = -i theta
  c -= Eigen::Matrix4d(c.transpose());
  SymplecticForm f;
  f.ordering = ordering;
  f.theta = theta;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) f.Omega(i, k) = c(t.permutation[i], t.permutation[k]);
  return f;
}

VarianceMatrix printed_variance_matrix(double theta) {
  if (!(theta > 0.0)) throw InvalidInput("coherent variance matrix needs theta > 0");
  VarianceMatrix v;
  v.theta = theta;
  v.V.diagonal() << 0.5 * theta, 0.5 * theta, 1.0 / theta, 1.0 / theta;
  v.V(0, 3) = v.V(3, 0) = -0.5;
  v.V(1, 2) = v.V(2, 1) = 0.5;
  return v;
}

CoherentVarianceReport coherent_variance_matrix(double theta, int n) {
  CoherentVarianceReport r;
  r.printed = printed_variance_matrix(theta);
  r.printed_det = r.printed.V.determinant();

  const GridSpec g = GridSpec::box(n, 10.0 * std::sqrt(theta), theta);
  g.validate();
  const Field2D psi = sample_field(
      [theta](double t, double x) { return cplx(std::exp(-(t * t + x * x) / (2.0 * theta)) / std::sqrt(2.0 * kPi * theta)); },
      g);
  StarKernel k;
  k.theta = theta;
  k.cutoff = 1e-13;
  const OpKind kinds[4] = {OpKind::X_L, OpKind::T_L, OpKind::P_x, OpKind::P_t};
  std::vector<Field2D> z;
  for (OpKind kind : kinds) z.push_back(apply(SymbolOperator::make(kind, theta), psi));
  const double norm = full_inner_product(k, psi, psi).real();
  for (int i = 0; i < 4; ++i) r.means[i] = full_inner_product(k, psi, z[i]).real() / norm;
  r.numeric.theta = theta;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      const double v = full_inner_product(k, z[i], z[j]).real() / norm - r.means[i] * r.means[j];
      r.numeric.V(i, j) = r.numeric.V(j, i) = v;
    }
  r.numeric_det = r.numeric.V.determinant();
  r.max_deviation = (r.numeric.V - r.printed.V).cwiseAbs().maxCoeff();
  r.agrees = r.max_deviation <= 1e-6;
  return r;
}

std::vector<double> symplectic_eigenvalues(const VarianceMatrix& V, const SymplecticForm& omega) {
  if (V.ordering != omega.ordering) throw InvalidInput("symplectic_eigenvalues: ordering tags differ");
  if (!V.V.isApprox(V.V.transpose(), 1e-12)) throw InvalidInput("symplectic_eigenvalues: V is not symmetric");
  Eigen::LLT<Eigen::Matrix4d> llt(V.V);
  if (llt.info() != Eigen::Success) throw InvalidInput("symplectic_eigenvalues: V is not positive definite");
  if (std::abs(omega.Omega.determinant()) < 1e-14) throw InvalidInput("symplectic_eigenvalues: Omega is singular");
  const Eigen::Matrix4cd A = cplx(0.0, 2.0) * (omega.Omega * V.V).cast<cplx>();
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(A);
  std::vector<double> mod;
  for (int i = 0; i < 4; ++i) mod.push_back(2.0 * std::abs(es.eigenvalues()[i]));
  std::sort(mod.begin(), mod.end(), std::greater<>());
  return {mod[0], mod[2]};
}

WilliamsonReport williamson_analysis(const VarianceMatrix& v_theta) {
  WilliamsonReport r;
  r.commutative.V = m_transform(v_theta.V, v_theta.theta, v_theta.ordering);
  r.commutative.ordering = v_theta.ordering;
  r.commutative.theta = 0.0;
  r.det_theta = v_theta.V.determinant();
  r.det_commutative = r.commutative.V.determinant();
  r.nu = symplectic_eigenvalues(r.commutative, symplectic_form(0.0, v_theta.ordering));
  return r;
}

EhrenfestSeries ehrenfest_residual(const Trajectory& traj, const SymbolOperator& op, const StarKernel& kernel,
                                   double h) {
  const std::size_t n = traj.slices.size();
  const double spacing = traj.dt * traj.stride;
  const int s = static_cast<int>(std::lround(h / spacing));
  if (s < 1 || std::abs(s * spacing - h) > 1e-9 * h)
    throw InvalidInput("ehrenfest_residual: difference spacing must be a multiple of the stored slice spacing");
  if (n < static_cast<std::size_t>(4 * s + 1))
    throw InvalidInput("ehrenfest_residual: trajectory too short for central differences");

  const auto H = SymbolOperator::make(OpKind::Hamiltonian, kernel.theta, traj.mass, traj.potential);
  std::vector<double> mean(n);
  for (std::size_t i = 0; i < n; ++i) mean[i] = expectation(op, traj.slices[i], kernel).real();

  const bool force = op.kind == OpKind::P_x;
  Eigen::ArrayXd d1, d2;
  if (force) {
    d1 = traj.potential.symbol_derivative(1, traj.slices[0].spec);
    d2 = traj.potential.symbol_derivative(2, traj.slices[0].spec);
  }
  const double a = 0.5 * kernel.theta;

  EhrenfestSeries out;
  for (std::size_t i = 2 * s; i + 2 * s < n; ++i) {
    const SliceState& psi = traj.slices[i];
    const double deriv =
        (mean[i - 2 * s] - 8.0 * mean[i - s] + 8.0 * mean[i + s] - mean[i + 2 * s]) / (12.0 * h);
    const cplx comm = slice_inner(psi, commutator_apply(H, op, psi), kernel.theta, kernel.cutoff);
    const double pred = (kI * comm).real() + explicit_time_derivative(op, psi, kernel);
    out.times.push_back(traj.times[i]);
    out.derivative.push_back(deriv);
    out.predicted.push_back(pred);
    out.residual.push_back(std::abs(deriv - pred));
    out.max_residual = std::max(out.max_residual, out.residual.back());
    if (force) {
      const cplx f0 = slice_inner(psi, mul_profile(d1.cast<cplx>(), psi), kernel.theta, kernel.cutoff);
      const cplx f1 =
          slice_inner(psi, mul_profile(d2.cast<cplx>(), d_x(psi) - kI * d_t(psi)), kernel.theta, kernel.cutoff);
      const double fp = (-f0 - a * f1).real();
      out.force_predicted.push_back(fp);
      out.force_residual.push_back(std::abs(deriv - fp));
      out.max_force_residual = std::max(out.max_force_residual, out.force_residual.back());
    }
  }
  return out;
}

void write_series_csv(std::ostream& os, const std::vector<double>& t, const std::vector<double>& v) {
  os << "t,value\n";
  for (std::size_t i = 0; i < t.size() && i < v.size(); ++i)
    os << format_number(t[i]) << ',' << format_number(v[i]) << '\n';
}

}  // namespace ncqm
