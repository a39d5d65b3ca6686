#pragma once

#include <array>
#include <string>

#include "json.hpp"

#include "ncqm/fieldgrid.hpp"
#include "ncqm/potential.hpp"
#include "ncqm/slice.hpp"

namespace ncqm {

enum class OpKind {
  X_L, X_R, T_L, T_R, P_x, P_t, X_c, T_c,
  Boost,          // m X_L - P_x T_c
  BoostExpanded,  // m X_L - P_x T_L - (theta/2) P_x^2
  Hamiltonian,    // -d_x^2/2m + V star
  Identity,
};

struct SymbolOperator {
  OpKind kind = OpKind::Identity;
  double theta = 0.0;
  double mass = 1.0;
  Potential potential;

  static SymbolOperator make(OpKind k, double theta, double mass = 1.0, Potential v = Potential::none());

  nlohmann::json to_json() const;
  static SymbolOperator from_json(const nlohmann::json& j);
};

std::string to_string(OpKind k);
OpKind parse_op_kind(const std::string& s);

Field2D apply(const SymbolOperator& op, const Field2D& psi);
SliceState apply(const SymbolOperator& op, const SliceState& psi);

Field2D commutator_apply(const SymbolOperator& a, const SymbolOperator& b, const Field2D& psi);
SliceState commutator_apply(const SymbolOperator& a, const SymbolOperator& b, const SliceState& psi);

// Phase-space orderings. Canonical is (X, T, P_x, P_t); the coordinate-map literature uses (T, X, P_t, P_x).
inline constexpr const char* kCanonicalOrdering = "X,T,P_x,P_t";
inline constexpr const char* kSwappedOrdering = "T,X,P_t,P_x";

struct MTransform {
  Eigen::Matrix4d M;               // in the requested ordering
  std::array<int, 4> permutation;  // requested slot i holds canonical slot permutation[i]
  std::string ordering;
};

MTransform m_matrix(double theta, const std::string& ordering);
Eigen::Vector4d m_transform(const Eigen::Vector4d& v, double theta, const std::string& ordering);
Eigen::Matrix4d m_transform(const Eigen::Matrix4d& V, double theta, const std::string& ordering);

enum class BoostForm {
  PaperProduct,  // e^{-imv(x+vt)} e^{-i(Et-p(x+vt))} e^{iv(pt + theta p^2/2)}
  SingleShift,   // same without the repeated e^{ivpt}
};

// Plane-wave closed form of the finite boost.
Function2 boost_plane_wave(double E, double p, double v, double mass, double theta,
                           BoostForm form = BoostForm::PaperProduct);

struct BoostResult {
  Field2D field;
  double error_estimate = 0.0;  // |v|^2 max|G^2 psi| / 2 relative to max|psi|
};

// First-order action (1 - i v G) psi for generic fields.
BoostResult boost_transform(const Field2D& psi, double v, double mass, double theta);
inline constexpr double kBoostExpansionLimit = 0.1;

}  // namespace ncqm
