#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ncqm/fieldgrid.hpp"

namespace ncqm {

enum class Flavor { Voros, Moyal };
enum class StarMethod { FourierKernel, Series };

struct StarKernel {
  double theta = 0.0;
  Flavor flavor = Flavor::Voros;
  StarMethod method = StarMethod::FourierKernel;
  int order = 8;          // Series truncation; ignored by FourierKernel
  double cutoff = 1e-14;  // relative mode-magnitude cutoff; 0 keeps every nonzero mode

  void validate() const;
  double half_theta() const { return 0.5 * theta; }
};

struct StarDiagnostics {
  std::string method;
  int K = 0;
  std::vector<double> term_norms;
  int kept_modes_left = 0;
  int kept_modes_right = 0;
  double cutoff = 0.0;

  nlohmann::json to_json() const;
};

std::string to_string(Flavor f);
std::string to_string(StarMethod m);
Flavor parse_flavor(const std::string& s);
StarMethod parse_method(const std::string& s);

Field2D star(const StarKernel& kernel, const Field2D& f, const Field2D& g,
             StarDiagnostics* diag = nullptr);

// Multiplier c with e^{-i(Et-px)} * e^{-i(E't-p'x)} = c e^{-i((E+E')t-(p+p')x)}.
cplx plane_wave_star_factor(double E, double p, double E2, double p2, double theta,
                            Flavor flavor = Flavor::Voros);

// Multiplier attached to a mode pair (k0,k1) x (k0',k1') with k0 the temporal wavenumber.
cplx mode_pair_factor(double k0, double k1, double k0p, double k1p, double theta, Flavor flavor);

double cross_validate(const StarKernel& a, const StarKernel& b, const Field2D& f, const Field2D& g);

}  // namespace ncqm
