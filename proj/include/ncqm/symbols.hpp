#pragma once

#include <vector>

#include "ncqm/fieldgrid.hpp"
#include "ncqm/slice.hpp"
#include "ncqm/star.hpp"

namespace ncqm {

struct MomentumLabel {
  double E = 0.0;
  double p = 0.0;
};

struct CoherentPoint {
  double t = 0.0;
  double x = 0.0;
  double theta = 1.0;
};

// (x,t|p,E) = (1/2pi) exp(-theta (E^2+p^2)/4) exp(-i(Et - px))
Function2 momentum_symbol(const MomentumLabel& label, double theta);

// Normalized Gaussian of standard deviation sigma.
double regularized_delta(double u, double sigma);
cplx regularized_delta(cplx u, double sigma);

double basis_overlap(const CoherentPoint& a, const CoherentPoint& b);

// Slice inner product (psi, phi)_t with the star acting through the energy tags.
cplx induced_inner_product(const StarKernel& kernel, const SliceState& psi, const SliceState& phi);
// Untagged slices carry no temporal information; accepted only at theta = 0.
cplx induced_inner_product(const StarKernel& kernel, const Field1D& psi, const Field1D& phi);
// Slice inner product read off a full 2-D field at time row `row`.
cplx induced_inner_product(const StarKernel& kernel, const Field2D& psi, const Field2D& phi, int row);
// Integral over the whole (t,x) box of psi* star phi.
cplx full_inner_product(const StarKernel& kernel, const Field2D& psi, const Field2D& phi);

struct DensityResult {
  Field2D density;          // real part stored, imaginary part zero
  int terms = 0;            // series terms used
  double cross_check = 0.0; // max-norm gap to the direct star product, relative to the peak
};

// Sum of squares form, cross-checked against star(psi*, psi).
DensityResult probability_density(const StarKernel& kernel, const Field2D& psi, bool cross_check = true);
Eigen::ArrayXd probability_density(const StarKernel& kernel, const SliceState& psi);
Eigen::ArrayXd probability_density_series(const StarKernel& kernel, const SliceState& psi, int* terms = nullptr);

Field2D probability_current(const StarKernel& kernel, const Field2D& psi, double mass);
Eigen::ArrayXd probability_current(const StarKernel& kernel, const SliceState& psi, double mass);

enum class ProjectionNorm {
  Packet,   // momentum symbol as is, 1/(2pi) per mode
  PerMode,  // 1/sqrt(2pi) per mode
};

Field2D onshell_project(const Eigen::ArrayXd& p, const Eigen::ArrayXcd& samples, double mass,
                        double theta, const GridSpec& window, ProjectionNorm norm = ProjectionNorm::Packet);

// pi_t applied to a 2-D field: (x',t') -> integral over x at time t of (x',t'|x,t) star psi(x,t).
Field2D quasi_projection_apply(const Field2D& psi, double t);

struct QuasiProjectionReport {
  double discrepancy = 0.0;  // max-norm of (pi_t' pi_t - delta(t'-t) pi_t') psi over the states
  double ratio = 0.0;        // discrepancy / (max |pi_t psi| * delta(0))
};

QuasiProjectionReport quasi_projection_discrepancy(double theta, double t, double t2,
                                                   const std::vector<Field2D>& states);

}  // namespace ncqm
