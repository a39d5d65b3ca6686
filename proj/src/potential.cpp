#include "ncqm/potential.hpp"

#include <cmath>

namespace ncqm {

namespace {

// Fourth-order central differences, second-order one-sided at the two outermost nodes.
Eigen::ArrayXd differentiate(const Eigen::ArrayXd& v, double h) {
  const Eigen::Index n = v.size();
  Eigen::ArrayXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n)
      d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
    else if (i == 0)
      d[i] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    else if (i == n - 1)
      d[i] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    else
      d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  }
  return d;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

const char* kind_name(Potential::Kind k) {
  switch (k) {
    case Potential::Kind::None: return "none";
    case Potential::Kind::Harmonic: return "harmonic";
    case Potential::Kind::Polynomial: return "polynomial";
    case Potential::Kind::Sampled: return "sampled";
    case Potential::Kind::GaussianPulse: return "gaussian_pulse";
  }
  return "none";
}

}  // namespace

Potential Potential::none() { return Potential{}; }

Potential Potential::harmonic(double mass, double omega) {
  if (!(mass > 0.0) || !(omega > 0.0)) throw InvalidInput("harmonic potential needs m > 0 and omega > 0");
  Potential p;
  p.kind = Kind::Harmonic;
  p.mass = mass;
  p.omega = omega;
  return p;
}

Potential Potential::polynomial(std::vector<double> coefficients) {
  for (double c : coefficients)
    if (!std::isfinite(c)) throw InvalidInput("polynomial potential coefficients must be finite");
  Potential p;
  p.kind = Kind::Polynomial;
  p.coefficients = std::move(coefficients);
  return p;
}

Potential Potential::sampled(const Eigen::ArrayXd& x, const Eigen::ArrayXd& v, int max_order) {
  if (x.size() != v.size() || x.size() < 5) throw InvalidInput("sampled potential needs >= 5 matching samples");
  if (!v.allFinite()) throw InvalidInput("sampled potential must be real and finite");
  Potential p;
  p.kind = Kind::Sampled;
  p.sample_x.assign(x.data(), x.data() + x.size());
  p.sample_v.assign(v.data(), v.data() + v.size());
  p.sample_order = max_order;
  return p;
}

Potential Potential::gaussian_pulse(double amplitude, double width, double center) {
  if (!(width > 0.0)) throw InvalidInput("pulse width must be positive");
  Potential p;
  p.kind = Kind::GaussianPulse;
  p.amplitude = amplitude;
  p.width = width;
  p.center = center;
  return p;
}

int Potential::order() const {
  switch (kind) {
    case Kind::None: return -1;
    case Kind::Harmonic: return 2;
    case Kind::Polynomial: return static_cast<int>(coefficients.size()) - 1;
    case Kind::Sampled: return sample_order;
    case Kind::GaussianPulse: return 0;
  }
  return -1;
}

Eigen::ArrayXd Potential::symbol_derivative(int n, const GridSpec& g) const {
  const Eigen::ArrayXd x = g.x_nodes();
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(x.size());
  switch (kind) {
    case Kind::None:
    case Kind::GaussianPulse:
      return out;
    case Kind::Harmonic: {
      const double k = mass * omega * omega;
      if (n == 0) return 0.5 * k * (x.square() + 0.5 * g.theta);
      if (n == 1) return k * x;
      if (n == 2) return Eigen::ArrayXd::Constant(x.size(), k);
      return out;
    }
    case Kind::Polynomial: {
      for (int i = n; i < static_cast<int>(coefficients.size()); ++i)
        out += coefficients[i] * factorial(i) / factorial(i - n) * x.pow(i - n);
      return out;
    }
    case Kind::Sampled: {
      if (static_cast<Eigen::Index>(sample_v.size()) != x.size())
        throw InvalidInput("sampled potential does not live on this grid");
      for (Eigen::Index j = 0; j < x.size(); ++j)
        if (std::abs(sample_x[j] - x[j]) > 1e-9 * (1.0 + std::abs(x[j])))
          throw InvalidInput("sampled potential nodes differ from the grid nodes");
      if (n > sample_order) return out;
      Eigen::ArrayXd v = Eigen::Map<const Eigen::ArrayXd>(sample_v.data(), sample_v.size());
      for (int i = 0; i < n; ++i) v = differentiate(v, g.dx());
      return v;
    }
  }
  return out;
}

Eigen::ArrayXd Potential::commuting_profile(const GridSpec& g) const {
  if (kind == Kind::Harmonic) return 0.5 * mass * omega * omega * g.x_nodes().square();
  const double a = 0.5 * g.theta;
  Eigen::ArrayXd out = symbol_derivative(0, g);
  if (a == 0.0) return out;
  for (int n = 1; 2 * n <= order(); ++n)
    out += std::pow(-0.5 * a, n) / factorial(n) * symbol_derivative(2 * n, g);
  return out;
}

double Potential::max_abs(const GridSpec& g) const {
  if (kind == Kind::GaussianPulse) return std::abs(amplitude);
  if (kind == Kind::None) return 0.0;
  return symbol_derivative(0, g).abs().maxCoeff();
}

double Potential::pulse(double t) const {
  if (kind != Kind::GaussianPulse) return 0.0;
  const double u = (t - center) / width;
  return amplitude * std::exp(-u * u);
}

double Potential::pulse_rate(double t) const {
  if (kind != Kind::GaussianPulse) return 0.0;
  return -2.0 * (t - center) / (width * width) * pulse(t);
}

nlohmann::json Potential::to_json() const {
  nlohmann::json j{{"kind", kind_name(kind)}};
  switch (kind) {
    case Kind::None: break;
    case Kind::Harmonic: j["m"] = mass; j["omega"] = omega; break;
    case Kind::Polynomial: j["coefficients"] = coefficients; break;
    case Kind::Sampled: j["x"] = sample_x; j["v"] = sample_v; j["max_order"] = sample_order; break;
    case Kind::GaussianPulse: j["amplitude"] = amplitude; j["width"] = width; j["center"] = center; break;
  }
  return j;
}

Potential Potential::from_json(const nlohmann::json& j) {
  const std::string k = j.value("kind", "none");
  if (k == "none") return none();
  if (k == "harmonic") return harmonic(j.value("m", 1.0), j.value("omega", 1.0));
  if (k == "polynomial") return polynomial(j.at("coefficients").get<std::vector<double>>());
  if (k == "sampled") {
    const auto x = j.at("x").get<std::vector<double>>();
    const auto v = j.at("v").get<std::vector<double>>();
    return sampled(Eigen::Map<const Eigen::ArrayXd>(x.data(), x.size()),
                   Eigen::Map<const Eigen::ArrayXd>(v.data(), v.size()), j.value("max_order", 6));
  }
  if (k == "gaussian_pulse")
    return gaussian_pulse(j.value("amplitude", 0.0), j.value("width", 1.0), j.value("center", 0.0));
  throw InvalidInput("unknown potential kind '" + k + "'");
}

}  // namespace ncqm
