#include "ncqm/slice.hpp"

#include <cmath>

#include "ncqm/fft.hpp"

namespace ncqm {

namespace {

struct JetModes {
  double energy;
  int order;
  std::vector<int> index;
  std::vector<cplx> coef;
};

std::vector<JetModes> transform(const SliceState& s, double cutoff) {
  std::vector<JetModes> out;
  std::vector<Eigen::ArrayXcd> coefs;
  double peak = 0.0;
  for (const auto& p : s.parts)
    for (const auto& j : p.jet) {
      coefs.push_back(fft::forward(j));
      peak = std::max(peak, coefs.back().abs().maxCoeff());
    }
  const double thresh = cutoff * peak;
  std::size_t c = 0;
  for (const auto& p : s.parts)
    for (int j = 0; j <= p.degree(); ++j, ++c) {
      JetModes m{p.energy, j, {}, {}};
      for (int q = 0; q < coefs[c].size(); ++q) {
        const double mag = std::abs(coefs[c][q]);
        if (mag > 0.0 && mag >= thresh) {
          m.index.push_back(q);
          m.coef.push_back(coefs[c][q]);
        }
      }
      if (!m.index.empty()) out.push_back(std::move(m));
    }
  return out;
}

// d^j/dl^j d^l/dm^l exp(a l m)
cplx jet_weight(int j, int l, cplx lam, cplx mu, double a) {
  const cplx e = std::exp(a * lam * mu);
  if (j == 0 && l == 0) return e;
  cplx sum = 0.0;
  double binom = 1.0;
  double falling = 1.0;
  for (int r = 0; r <= std::min(j, l); ++r) {
    if (r > 0) {
      binom = binom * (j - r + 1) / r;
      falling *= (l - r + 1);
    }
    sum += binom * falling * std::pow(a, l) * std::pow(lam, l - r) * std::pow(a * mu, j - r);
  }
  return e * sum;
}

void require_same_grid(const SliceState& a, const SliceState& b) {
  if (!(a.spec == b.spec)) throw InvalidInput("slice operands live on different grids");
  if (a.t0 != b.t0) throw InvalidInput("slice operands live on different time slices");
}

SliceState map_jets(const SliceState& a, const std::function<Eigen::ArrayXcd(const Eigen::ArrayXcd&)>& f) {
  SliceState out(a.spec, a.t0);
  for (const auto& p : a.parts) {
    SliceComponent c{p.energy, {}};
    for (const auto& j : p.jet) c.jet.push_back(f(j));
    out.parts.push_back(std::move(c));
  }
  return out;
}

}  // namespace

SliceState::SliceState(const GridSpec& s, double t) : spec(s), t0(t) {}

SliceState SliceState::stationary(const Field1D& f, double energy) {
  return stationary(f.spec, f.t_slice, f.values, energy);
}

SliceState SliceState::stationary(const GridSpec& s, double t0, const Eigen::ArrayXcd& v, double energy) {
  if (v.size() != s.n_x) throw InvalidInput("slice length does not match its grid");
  SliceState out(s, t0);
  out.parts.push_back({energy, {v}});
  return out;
}

void SliceState::add(double energy, const Eigen::ArrayXcd& value) {
  for (auto& p : parts)
    if (p.energy == energy) {
      p.jet[0] += value;
      return;
    }
  parts.push_back({energy, {value}});
}

Eigen::ArrayXcd SliceState::values() const {
  Eigen::ArrayXcd v = Eigen::ArrayXcd::Zero(spec.n_x);
  for (const auto& p : parts) v += p.jet[0];
  return v;
}

Field1D SliceState::field() const { return Field1D(spec, t0, values()); }

double SliceState::peak() const {
  double m = 0.0;
  for (const auto& p : parts)
    for (const auto& j : p.jet) m = std::max(m, j.abs().maxCoeff());
  return m;
}

SliceState operator+(const SliceState& a, const SliceState& b) {
  require_same_grid(a, b);
  SliceState out = a;
  for (const auto& q : b.parts) {
    bool merged = false;
    for (auto& p : out.parts) {
      if (p.energy != q.energy) continue;
      const std::size_t n = std::max(p.jet.size(), q.jet.size());
      p.jet.resize(n, Eigen::ArrayXcd::Zero(a.spec.n_x));
      for (std::size_t j = 0; j < q.jet.size(); ++j) p.jet[j] += q.jet[j];
      merged = true;
      break;
    }
    if (!merged) out.parts.push_back(q);
  }
  return out;
}

SliceState operator*(cplx c, const SliceState& a) {
  return map_jets(a, [c](const Eigen::ArrayXcd& j) -> Eigen::ArrayXcd { return c * j; });
}

SliceState operator-(const SliceState& a, const SliceState& b) { return a + cplx(-1.0) * b; }

SliceState mul_x(const SliceState& a) {
  const Eigen::ArrayXd x = a.spec.x_nodes();
  return map_jets(a, [&x](const Eigen::ArrayXcd& j) -> Eigen::ArrayXcd { return x * j; });
}

SliceState mul_profile(const Eigen::ArrayXcd& profile, const SliceState& a) {
  return map_jets(a, [&profile](const Eigen::ArrayXcd& j) -> Eigen::ArrayXcd { return profile * j; });
}

SliceState mul_t(const SliceState& a) {
  SliceState out(a.spec, a.t0);
  for (const auto& p : a.parts) {
    SliceComponent c{p.energy, {}};
    c.jet.assign(p.jet.size() + 1, Eigen::ArrayXcd::Zero(a.spec.n_x));
    for (std::size_t j = 0; j < p.jet.size(); ++j) {
      c.jet[j] += a.t0 * p.jet[j];
      c.jet[j + 1] += p.jet[j];
    }
    out.parts.push_back(std::move(c));
  }
  return out;
}

SliceState d_x(const SliceState& a, int order) {
  const double length = a.spec.length_x();
  return map_jets(a, [length, order](const Eigen::ArrayXcd& j) -> Eigen::ArrayXcd {
    return spectral_derivative(j, length, order);
  });
}

SliceState d_t(const SliceState& a, int order) {
  if (order < 1) throw InvalidInput("derivative order must be positive");
  SliceState cur = a;
  for (int o = 0; o < order; ++o) {
    SliceState next(cur.spec, cur.t0);
    for (const auto& p : cur.parts) {
      SliceComponent c{p.energy, {}};
      const int deg = p.degree();
      for (int j = 0; j <= deg; ++j) {
        Eigen::ArrayXcd v = cplx(0.0, -p.energy) * p.jet[j];
        if (j + 1 <= deg) v += double(j + 1) * p.jet[j + 1];
        c.jet.push_back(std::move(v));
      }
      next.parts.push_back(std::move(c));
    }
    cur = std::move(next);
  }
  return cur;
}

SliceState prune_modes(const SliceState& a, double cutoff) {
  double peak = 0.0;
  std::vector<Eigen::ArrayXcd> coefs;
  for (const auto& p : a.parts)
    for (const auto& j : p.jet) {
      coefs.push_back(fft::forward(j));
      peak = std::max(peak, coefs.back().abs().maxCoeff());
    }
  SliceState out(a.spec, a.t0);
  std::size_t c = 0;
  for (const auto& p : a.parts) {
    SliceComponent comp{p.energy, {}};
    for (std::size_t j = 0; j < p.jet.size(); ++j, ++c) {
      Eigen::ArrayXcd& v = coefs[c];
      for (auto& z : v)
        if (std::abs(z) < cutoff * peak) z = 0.0;
      comp.jet.push_back(fft::inverse(v));
    }
    out.parts.push_back(std::move(comp));
  }
  return out;
}

Eigen::ArrayXcd slice_star(const SliceState& a, bool conj_left, const SliceState& b, double theta,
                           double cutoff) {
  require_same_grid(a, b);
  const int n = a.spec.n_x;
  if (theta == 0.0) {
    Eigen::ArrayXcd va = a.values();
    if (conj_left) va = va.conjugate();
    return va * b.values();
  }
  const double hth = 0.5 * theta;
  const Eigen::ArrayXd k = a.spec.x_wavenumbers();
  const auto ma = transform(a, cutoff);
  const auto mb = transform(b, cutoff);
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(n);
  for (const auto& L : ma) {
    for (const auto& R : mb) {
      for (std::size_t u = 0; u < L.index.size(); ++u) {
        int qa = L.index[u];
        cplx ca = L.coef[u];
        double ka = k[qa];
        double ea = L.energy;
        if (conj_left) {
          qa = (n - qa) % n;
          ca = std::conj(ca);
          ka = -ka;
          ea = -ea;
        }
        const cplx lam(ka, -ea);
        for (std::size_t v = 0; v < R.index.size(); ++v) {
          const int qb = R.index[v];
          const cplx mu(-k[qb], -R.energy);
          out[(qa + qb) % n] += ca * R.coef[v] * jet_weight(L.order, R.order, lam, mu, hth);
        }
      }
    }
  }
  return fft::inverse(out);
}

cplx slice_inner(const SliceState& a, const SliceState& b, double theta, double cutoff) {
  require_same_grid(a, b);
  const double length = a.spec.length_x();
  if (theta == 0.0) return (a.values().conjugate() * b.values()).sum() * a.spec.dx();
  const double hth = 0.5 * theta;
  const int n = a.spec.n_x;
  const Eigen::ArrayXd k = a.spec.x_wavenumbers();
  const auto ma = transform(a, cutoff);
  const auto mb = transform(b, cutoff);
  cplx total = 0.0;
  for (const auto& L : ma) {
    for (const auto& R : mb) {
      // Pair left mode q (conjugated to -k) with right mode q so the result is the zero mode.
      Eigen::ArrayXcd right = Eigen::ArrayXcd::Zero(n);
      for (std::size_t v = 0; v < R.index.size(); ++v) right[R.index[v]] = R.coef[v];
      for (std::size_t u = 0; u < L.index.size(); ++u) {
        const int q = L.index[u];
        if (right[q] == 0.0) continue;
        const cplx lam(-k[q], L.energy);
        const cplx mu(-k[q], -R.energy);
        total += std::conj(L.coef[u]) * right[q] * jet_weight(L.order, R.order, lam, mu, hth);
      }
    }
  }
  return total * length;
}

}  // namespace ncqm
