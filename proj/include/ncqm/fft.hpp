#pragma once

#include "ncqm/fieldgrid.hpp"

namespace ncqm::fft {

// c_k = (1/n) sum_j f_j exp(-2 pi i j k / n)
Eigen::ArrayXcd forward(const Eigen::ArrayXcd& f);
// f_j = sum_k c_k exp(2 pi i j k / n)
Eigen::ArrayXcd inverse(const Eigen::ArrayXcd& c);

Grid2 forward(const Grid2& f);
Grid2 inverse(const Grid2& c);

// Zeroes coefficients below `cutoff` times the peak magnitude; returns the number kept.
int prune(Eigen::ArrayXcd& c, double cutoff);
int prune(Grid2& c, double cutoff);

}  // namespace ncqm::fft
