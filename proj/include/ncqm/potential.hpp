#pragma once

#include <vector>

#include "json.hpp"

#include "ncqm/fieldgrid.hpp"

namespace ncqm {

// A real potential given through its coherent-state symbol V(x) or V(t).
struct Potential {
  enum class Kind { None, Harmonic, Polynomial, Sampled, GaussianPulse };

  Kind kind = Kind::None;
  double mass = 1.0, omega = 1.0;       // Harmonic: the operator m w^2 X^2 / 2
  std::vector<double> coefficients;     // Polynomial symbol sum_i c_i x^i
  std::vector<double> sample_x, sample_v;  // Sampled symbol on nodes
  int sample_order = 6;                 // highest derivative kept for sampled symbols
  double amplitude = 0.0, width = 1.0, center = 0.0;  // V(t) = A exp(-(t-c)^2/w^2)

  static Potential none();
  static Potential harmonic(double mass, double omega);
  static Potential polynomial(std::vector<double> coefficients);
  static Potential sampled(const Eigen::ArrayXd& x, const Eigen::ArrayXd& v, int max_order = 6);
  static Potential gaussian_pulse(double amplitude, double width, double center);

  bool time_dependent() const { return kind == Kind::GaussianPulse; }
  // Highest nonvanishing x-derivative of the symbol.
  int order() const;
  // n-th x-derivative of the symbol at the nodes of g (theta is taken from g).
  Eigen::ArrayXd symbol_derivative(int n, const GridSpec& g) const;
  // Profile whose plain multiplication matches the star action after the energy gauge is removed.
  Eigen::ArrayXd commuting_profile(const GridSpec& g) const;
  double max_abs(const GridSpec& g) const;

  double pulse(double t) const;
  double pulse_rate(double t) const;

  nlohmann::json to_json() const;
  static Potential from_json(const nlohmann::json& j);
};

}  // namespace ncqm
