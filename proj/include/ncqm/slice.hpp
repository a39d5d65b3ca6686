#pragma once

#include <vector>

#include "ncqm/fieldgrid.hpp"

namespace ncqm {

// One energy-tagged piece of a state near the slice t0:
//   psi(x, t0 + s) = exp(-i E s) * sum_j s^j jet[j](x)
// Time derivatives act exactly on this form, which is what the star product needs.
struct SliceComponent {
  double energy = 0.0;
  std::vector<Eigen::ArrayXcd> jet;

  int degree() const { return static_cast<int>(jet.size()) - 1; }
};

struct SliceState {
  GridSpec spec;
  double t0 = 0.0;
  std::vector<SliceComponent> parts;

  SliceState() = default;
  SliceState(const GridSpec& s, double t);

  static SliceState stationary(const Field1D& f, double energy);
  static SliceState stationary(const GridSpec& s, double t0, const Eigen::ArrayXcd& v, double energy);

  void add(double energy, const Eigen::ArrayXcd& value);
  Eigen::ArrayXcd values() const;
  Field1D field() const;
  double peak() const;
  bool empty() const { return parts.empty(); }
};

SliceState operator+(const SliceState& a, const SliceState& b);
SliceState operator-(const SliceState& a, const SliceState& b);
SliceState operator*(cplx c, const SliceState& a);

SliceState mul_x(const SliceState& a);
SliceState mul_t(const SliceState& a);
SliceState mul_profile(const Eigen::ArrayXcd& profile, const SliceState& a);
SliceState d_x(const SliceState& a, int order = 1);
SliceState d_t(const SliceState& a, int order = 1);

// Zeroes Fourier modes below cutoff times the largest mode of the whole state.
SliceState prune_modes(const SliceState& a, double cutoff);

// Pointwise values on the slice of (conj_left ? a* : a) star_V b.
Eigen::ArrayXcd slice_star(const SliceState& a, bool conj_left, const SliceState& b, double theta,
                           double cutoff = 1e-14);

// Integral over the slice of a* star_V b.
cplx slice_inner(const SliceState& a, const SliceState& b, double theta, double cutoff = 1e-14);

}  // namespace ncqm
