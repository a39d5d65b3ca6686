#include "ncqm/operators.hpp"

#include <cmath>
#include <type_traits>

namespace ncqm {

namespace {

// Uniform vocabulary over Field2D and SliceState so each operator is written once.
Field2D times_x(const Field2D& f) {
  Field2D out = f;
  const Eigen::ArrayXd x = f.spec.x_nodes();
  for (int i = 0; i < f.spec.n_t; ++i) out.values.row(i) *= x.transpose().cast<cplx>();
  return out;
}
Field2D times_t(const Field2D& f) {
  Field2D out = f;
  const Eigen::ArrayXd t = f.spec.t_nodes();
  for (int i = 0; i < f.spec.n_t; ++i) out.values.row(i) *= t[i];
  return out;
}
Field2D deriv_x(const Field2D& f) { return spectral_derivative(f, Axis::x, 1); }
Field2D deriv_t(const Field2D& f) { return spectral_derivative(f, Axis::t, 1); }
Field2D sum(const Field2D& a, const Field2D& b) { return Field2D(a.spec, a.values + b.values); }
Field2D scaled(cplx c, const Field2D& a) { return Field2D(a.spec, c * a.values); }
Field2D times_profile_x(const Eigen::ArrayXd& v, const Field2D& f) {
  Field2D out = f;
  for (int i = 0; i < f.spec.n_t; ++i) out.values.row(i) *= v.transpose().cast<cplx>();
  return out;
}

SliceState times_x(const SliceState& s) { return mul_x(s); }
SliceState times_t(const SliceState& s) { return mul_t(s); }
SliceState deriv_x(const SliceState& s) { return d_x(s); }
SliceState deriv_t(const SliceState& s) { return d_t(s); }
SliceState sum(const SliceState& a, const SliceState& b) { return a + b; }
SliceState scaled(cplx c, const SliceState& a) { return c * a; }
SliceState times_profile_x(const Eigen::ArrayXd& v, const SliceState& s) {
  return mul_profile(v.cast<cplx>(), s);
}

const GridSpec& grid_of(const Field2D& f) { return f.spec; }
const GridSpec& grid_of(const SliceState& s) { return s.spec; }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// n-th time derivative of a Gaussian pulse, via Hermite polynomials.
double pulse_derivative(const Potential& v, int n, double t) {
  const double u = (t - v.center) / v.width;
  double h0 = 1.0, h1 = 2.0 * u;
  double hn = n == 0 ? h0 : h1;
  for (int k = 1; k < n; ++k) {
    hn = 2.0 * u * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = hn;
  }
  return (n % 2 ? -1.0 : 1.0) * hn * v.amplitude * std::exp(-u * u) / std::pow(v.width, n);
}

constexpr int kPulseOrder = 16;

template <class S>
S star_potential(const SymbolOperator& op, const S& psi) {
  const Potential& v = op.potential;
  const double a = 0.5 * op.theta;
  S out = scaled(0.0, psi);
  if (v.kind == Potential::Kind::None) return out;
  if (v.kind == Potential::Kind::GaussianPulse) {
    if constexpr (std::is_same_v<S, SliceState>) {
      throw InvalidInput("time-dependent potentials act on full 2-D fields only");
    } else {
      // V(t) star psi = sum_n a^n/n! V^(n)(t) (d_t + i d_x)^n psi
      S cur = psi;
      for (int n = 0; n <= (a == 0.0 ? 0 : kPulseOrder); ++n) {
        if (n > 0) cur = sum(deriv_t(cur), scaled(kI, deriv_x(cur)));
        Field2D term = cur;
        for (int i = 0; i < psi.spec.n_t; ++i) term.values.row(i) *= pulse_derivative(v, n, psi.spec.t_at(i));
        out = sum(out, scaled(std::pow(a, n) / factorial(n), term));
      }
      return out;
    }
  }
  // V(x) star psi = sum_n a^n/n! V^(n)(x) (d_x - i d_t)^n psi
  S cur = psi;
  const int top = a == 0.0 ? 0 : v.order();
  for (int n = 0; n <= top; ++n) {
    if (n > 0) cur = sum(deriv_x(cur), scaled(-kI, deriv_t(cur)));
    out = sum(out, scaled(std::pow(a, n) / factorial(n), times_profile_x(v.symbol_derivative(n, grid_of(psi)), cur)));
  }
  return out;
}

template <class S>
S apply_impl(const SymbolOperator& op, const S& psi) {
  const cplx a = 0.5 * op.theta;
  switch (op.kind) {
    case OpKind::Identity: return psi;
    case OpKind::X_L: return sum(times_x(psi), scaled(a, sum(deriv_x(psi), scaled(-kI, deriv_t(psi)))));
    case OpKind::X_R: return sum(times_x(psi), scaled(a, sum(deriv_x(psi), scaled(kI, deriv_t(psi)))));
    case OpKind::T_L: return sum(times_t(psi), scaled(a, sum(deriv_t(psi), scaled(kI, deriv_x(psi)))));
    case OpKind::T_R: return sum(times_t(psi), scaled(a, sum(deriv_t(psi), scaled(-kI, deriv_x(psi)))));
    case OpKind::P_x: return scaled(-kI, deriv_x(psi));
    case OpKind::P_t: return scaled(-kI, deriv_t(psi));
    case OpKind::X_c: return sum(times_x(psi), scaled(a, deriv_x(psi)));
    case OpKind::T_c: return sum(times_t(psi), scaled(a, deriv_t(psi)));
    case OpKind::Boost: {
      const auto px = SymbolOperator::make(OpKind::P_x, op.theta);
      const auto tc = SymbolOperator::make(OpKind::T_c, op.theta);
      const auto xl = SymbolOperator::make(OpKind::X_L, op.theta);
      return sum(scaled(op.mass, apply_impl(xl, psi)), scaled(-1.0, apply_impl(px, apply_impl(tc, psi))));
    }
    case OpKind::BoostExpanded: {
      const auto px = SymbolOperator::make(OpKind::P_x, op.theta);
      const auto tl = SymbolOperator::make(OpKind::T_L, op.theta);
      const auto xl = SymbolOperator::make(OpKind::X_L, op.theta);
      const S p2 = apply_impl(px, apply_impl(px, psi));
      return sum(sum(scaled(op.mass, apply_impl(xl, psi)), scaled(-1.0, apply_impl(px, apply_impl(tl, psi)))),
                 scaled(-a, p2));
    }
    case OpKind::Hamiltonian: {
      if (!(op.mass > 0.0)) throw InvalidInput("Hamiltonian needs a positive mass");
      const S kin = scaled(-0.5 / op.mass, deriv_x(deriv_x(psi)));
      return sum(kin, star_potential(op, psi));
    }
  }
  throw InvalidInput("unknown operator kind");
}

}  // namespace

SymbolOperator SymbolOperator::make(OpKind k, double theta, double mass, Potential v) {
  if (!(theta >= 0.0)) throw InvalidInput("operator theta must be >= 0");
  SymbolOperator op;
  op.kind = k;
  op.theta = theta;
  op.mass = mass;
  op.potential = std::move(v);
  return op;
}

std::string to_string(OpKind k) {
  switch (k) {
    case OpKind::X_L: return "X_theta_L";
    case OpKind::X_R: return "X_theta_R";
    case OpKind::T_L: return "T_theta_L";
    case OpKind::T_R: return "T_theta_R";
    case OpKind::P_x: return "P_x";
    case OpKind::P_t: return "P_t";
    case OpKind::X_c: return "X_c";
    case OpKind::T_c: return "T_c";
    case OpKind::Boost: return "GalileanBoost";
    case OpKind::BoostExpanded: return "GalileanBoostExpanded";
    case OpKind::Hamiltonian: return "Hamiltonian";
    case OpKind::Identity: return "Identity";
  }
  return "Identity";
}

OpKind parse_op_kind(const std::string& s) {
  for (OpKind k : {OpKind::X_L, OpKind::X_R, OpKind::T_L, OpKind::T_R, OpKind::P_x, OpKind::P_t, OpKind::X_c,
                   OpKind::T_c, OpKind::Boost, OpKind::BoostExpanded, OpKind::Hamiltonian, OpKind::Identity})
    if (to_string(k) == s) return k;
  throw InvalidInput("unknown operator kind '" + s + "'");
}

nlohmann::json SymbolOperator::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  if (kind == OpKind::Boost || kind == OpKind::BoostExpanded || kind == OpKind::Hamiltonian) params["m"] = mass;
  if (kind == OpKind::Hamiltonian) params["potential"] = potential.to_json();
  return nlohmann::json{{"kind", to_string(kind)}, {"theta", theta}, {"params", params}};
}

SymbolOperator SymbolOperator::from_json(const nlohmann::json& j) {
  const auto& params = j.contains("params") ? j.at("params") : nlohmann::json::object();
  Potential v = params.contains("potential") ? Potential::from_json(params.at("potential")) : Potential::none();
  return make(parse_op_kind(j.at("kind").get<std::string>()), j.at("theta").get<double>(), params.value("m", 1.0),
              std::move(v));
}

Field2D apply(const SymbolOperator& op, const Field2D& psi) {
  if (std::abs(op.theta - psi.spec.theta) > 1e-15) throw InvalidInput("operator theta differs from the grid theta");
  return apply_impl(op, psi);
}

SliceState apply(const SymbolOperator& op, const SliceState& psi) {
  if (psi.parts.empty()) throw InvalidInput("slice carries no energy-tagged components");
  if (std::abs(op.theta - psi.spec.theta) > 1e-15) throw InvalidInput("operator theta differs from the grid theta");
  return apply_impl(op, psi);
}

Field2D commutator_apply(const SymbolOperator& a, const SymbolOperator& b, const Field2D& psi) {
  return Field2D(psi.spec, apply(a, apply(b, psi)).values - apply(b, apply(a, psi)).values);
}

SliceState commutator_apply(const SymbolOperator& a, const SymbolOperator& b, const SliceState& psi) {
  return apply(a, apply(b, psi)) - apply(b, apply(a, psi));
}

MTransform m_matrix(double theta, const std::string& ordering) {
  if (ordering.empty()) throw InvalidInput("m_transform: ordering metadata is required");
  MTransform r;
  r.ordering = ordering;
  if (ordering == kCanonicalOrdering) r.permutation = {0, 1, 2, 3};
  else if (ordering == kSwappedOrdering) r.permutation = {1, 0, 3, 2};
  else throw InvalidInput("m_transform: unsupported ordering '" + ordering + "'");
  const double a = 0.5 * theta;
  // Canonical rows: X_c = X - a P_t, T_c = T + a P_x.
  Eigen::Matrix4d M = Eigen::Matrix4d::Identity();
  M(0, 3) = -a;
  M(1, 2) = a;
  Eigen::Matrix4d P = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 4; ++i) P(i, r.permutation[i]) = 1.0;
  r.M = P * M * P.transpose();
  return r;
}

Eigen::Vector4d m_transform(const Eigen::Vector4d& v, double theta, const std::string& ordering) {
  return m_matrix(theta, ordering).M * v;
}

Eigen::Matrix4d m_transform(const Eigen::Matrix4d& V, double theta, const std::string& ordering) {
  const Eigen::Matrix4d M = m_matrix(theta, ordering).M;
  return M * V * M.transpose();
}

Function2 boost_plane_wave(double E, double p, double v, double mass, double theta, BoostForm form) {
  return [=](double t, double x) {
    const double xs = x + v * t;
    double phase = -mass * v * xs - (E * t - p * xs) + v * 0.5 * theta * p * p;
    if (form == BoostForm::PaperProduct) phase += v * p * t;
    return std::exp(cplx(0.0, phase));
  };
}

BoostResult boost_transform(const Field2D& psi, double v, double mass, double theta) {
  const auto g = SymbolOperator::make(OpKind::Boost, theta, mass);
  const Field2D gpsi = apply(g, psi);
  const double peak = psi.max_abs();
  if (peak == 0.0) return {psi, 0.0};
  const double first = std::abs(v) * gpsi.max_abs() / peak;
  if (first > kBoostExpansionLimit)
    throw InvalidInput("boost_transform: |v| max|G psi| / max|psi| = " + std::to_string(first) +
                       " exceeds the first-order limit " + std::to_string(kBoostExpansionLimit) +
                       "; need |v| <= " + std::to_string(kBoostExpansionLimit * peak / gpsi.max_abs()));
  BoostResult r;
  r.field = Field2D(psi.spec, psi.values - kI * v * gpsi.values);
  r.error_estimate = 0.5 * v * v * apply(g, gpsi).max_abs() / peak;
  return r;
}

}  // namespace ncqm
