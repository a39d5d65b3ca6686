#include "ncqm/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace ncqm::fft {

namespace {

// Plans are created once per (shape, direction) and executed with the new-array interface.
class PlanCache {
 public:
  fftw_plan get(int rows, int cols, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(rows, cols, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const int total = rows * cols;
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    fftw_plan p = rows == 1 ? fftw_plan_dft_1d(cols, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
                            : fftw_plan_dft_2d(rows, cols, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, p);
    return p;
  }
  ~PlanCache() {
    for (auto& kv : plans_) fftw_destroy_plan(kv.second);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(const cplx* in, cplx* out, int rows, int cols, int sign) {
  fftw_plan p = cache().get(rows, cols, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

Eigen::ArrayXcd forward(const Eigen::ArrayXcd& f) {
  Eigen::ArrayXcd out(f.size());
  run(f.data(), out.data(), 1, static_cast<int>(f.size()), FFTW_FORWARD);
  return out / static_cast<double>(f.size());
}

Eigen::ArrayXcd inverse(const Eigen::ArrayXcd& c) {
  Eigen::ArrayXcd out(c.size());
  run(c.data(), out.data(), 1, static_cast<int>(c.size()), FFTW_BACKWARD);
  return out;
}

Grid2 forward(const Grid2& f) {
  Grid2 out(f.rows(), f.cols());
  run(f.data(), out.data(), static_cast<int>(f.rows()), static_cast<int>(f.cols()), FFTW_FORWARD);
  return out / static_cast<double>(f.size());
}

Grid2 inverse(const Grid2& c) {
  Grid2 out(c.rows(), c.cols());
  run(c.data(), out.data(), static_cast<int>(c.rows()), static_cast<int>(c.cols()), FFTW_BACKWARD);
  return out;
}

int prune(Eigen::ArrayXcd& c, double cutoff) {
  const double thresh = cutoff * c.abs().maxCoeff();
  int kept = 0;
  for (auto& v : c) {
    if (std::abs(v) < thresh || std::abs(v) == 0.0) v = 0.0;
    else ++kept;
  }
  return kept;
}

int prune(Grid2& c, double cutoff) {
  const double thresh = cutoff * c.abs().maxCoeff();
  int kept = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    auto& v = c.data()[i];
    if (std::abs(v) < thresh || std::abs(v) == 0.0) v = 0.0;
    else ++kept;
  }
  return kept;
}

}  // namespace ncqm::fft
