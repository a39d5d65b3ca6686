#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ncqm/experiments.hpp"
#include "ncqm/moments.hpp"
#include "ncqm/operators.hpp"
#include "ncqm/symbols.hpp"
#include "oracles.hpp"

using namespace ncqm;

namespace {

SymbolOperator op(OpKind k, double theta, double m = 1.0) { return SymbolOperator::make(k, theta, m); }

Field2D wave(const GridSpec& g, double E, double p) {
  return sample_field([=](double t, double x) { return std::exp(-kI * (E * t - p * x)); }, g);
}

double gap(const Field2D& a, const Field2D& b) { return (a.values - b.values).abs().maxCoeff(); }

}  // namespace

TEST_CASE("coordinate operators on simple inputs") {
  const GridSpec g0 = GridSpec::box(32, kPi, 0.0);
  const Field2D w0 = wave(g0, 1.0, 2.0);
  const Field2D xw = sample_field([](double t, double x) { return x * std::exp(-kI * (t - 2.0 * x)); }, g0);
  CHECK(gap(apply(op(OpKind::X_L, 0.0), w0), xw) < 1e-12);

  CHECK(gap(apply(op(OpKind::P_x, 0.0), w0), Field2D(g0, 2.0 * w0.values)) < 1e-12);
  CHECK(gap(apply(op(OpKind::P_t, 0.0), w0), Field2D(g0, -1.0 * w0.values)) < 1e-12);

  const GridSpec g = GridSpec::box(64, kPi, 0.2);
  const Field2D w = wave(g, 1.0, 0.0);
  const Field2D want = sample_field([](double t, double x) { return (x - 0.1) * std::exp(-kI * t); }, g);
  CHECK(gap(apply(op(OpKind::X_L, 0.2), w), want) < 1e-12);
}

TEST_CASE("commutators on a Gaussian") {
  const auto r = galilean_residuals(0.1, 1.0);
  CHECK(r.coordinates < 1e-9);
  CHECK(r.commuting < 1e-9);
  CHECK(r.boost_hamiltonian < 1e-9);
  CHECK(r.boost_momentum < 1e-9);
  CHECK(r.boost_energy < 1e-9);
  CHECK(r.boost_forms < 1e-9);
  CHECK(r.momentum_from_time < 1e-9);
}

TEST_CASE("Galilean algebra on random Gaussian packets (property)") {
  // x and t multiplications need states that decay inside the box.
  oracle::Gen gen(13);
  for (int trial = 0; trial < 5; ++trial) {
    const double th = gen.uniform(0.05, 0.3), m = gen.uniform(0.5, 2.0);
    int n = 64;
    while (20.0 / n > std::sqrt(th) / 4) n *= 2;
    const GridSpec g = GridSpec::box(n, 10.0, th);
    const double t0 = gen.uniform(-0.3, 0.3), x0 = gen.uniform(-0.3, 0.3);
    const double k = gen.uniform(-1, 1), w = gen.uniform(-1, 1), s = gen.uniform(0.8, 1.0);
    const Field2D psi =
        sample_field([=](double t, double x) { return oracle::gaussian_wave(t, x, t0, x0, s, k, w); }, g);
    const auto G = op(OpKind::Boost, th, m), H = op(OpKind::Hamiltonian, th, m);
    const auto P = op(OpKind::P_x, th, m), Pt = op(OpKind::P_t, th, m);
    const Field2D Pp = apply(P, psi);
    CHECK(gap(commutator_apply(G, P, psi), Field2D(g, kI * m * psi.values)) < 1e-9);
    CHECK(gap(commutator_apply(G, Pt, psi), Field2D(g, -kI * Pp.values)) < 1e-9);
    CHECK(gap(commutator_apply(G, H, psi), Field2D(g, kI * Pp.values)) < 1e-9);
  }
}

TEST_CASE("self-adjointness under the induced inner product (property)") {
  oracle::Gen gen(19);
  const double th = 0.1;
  const GridSpec line = GridSpec::line(256, -10.0, 10.0, th);
  for (OpKind k : {OpKind::X_L, OpKind::T_L, OpKind::P_x}) {
    for (int trial = 0; trial < 5; ++trial) {
      const SliceState a = oracle::random_slice(line, gen, 1, 0.9), b = oracle::random_slice(line, gen, 1, 0.9);
      const cplx lhs = slice_inner(a, apply(op(k, th), b), th);
      const cplx rhs = slice_inner(apply(op(k, th), a), b, th);
      CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("theta -> 0 regression is first order") {
  std::vector<double> err;
  for (double th : {0.1, 0.05, 0.025}) {
    const GridSpec g = GridSpec::box(128, 7.0, th);
    const Field2D psi =
        sample_field([](double t, double x) { return oracle::gaussian_wave(t, x, 0.1, 0.2, 1.0, 0.4, -0.3); }, g);
    const Field2D x0 = apply(op(OpKind::X_L, 0.0), Field2D(GridSpec::box(128, 7.0, 0.0), psi.values));
    err.push_back((apply(op(OpKind::X_L, th), psi).values - x0.values).abs().maxCoeff());
  }
  CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(err[1] / err[2] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("m_transform: identity at theta = 0, unit determinant, preserved determinants") {
  CHECK(m_matrix(0.0, kCanonicalOrdering).M.isIdentity(0.0));
  for (double th : {0.1, 1.0, 10.0})
    for (const char* ord : {kCanonicalOrdering, kSwappedOrdering})
      CHECK(std::abs(m_matrix(th, ord).M.determinant() - 1.0) < 1e-14);

  const VarianceMatrix V = printed_variance_matrix(0.1);
  const Eigen::Matrix4d W = m_transform(V.V, 0.1, kCanonicalOrdering);
  CHECK(std::abs(W.determinant() - V.V.determinant()) < 1e-10);

  oracle::Gen gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Matrix4d A;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) A(i, j) = gen.normal();
    const Eigen::Matrix4d S = A * A.transpose() + Eigen::Matrix4d::Identity();
    const double th = gen.uniform(0.0, 5.0);
    CHECK(std::abs(m_transform(S, th, kSwappedOrdering).determinant() - S.determinant()) <
          1e-10 * S.determinant());
  }
  CHECK_THROWS_AS(m_matrix(0.1, ""), InvalidInput);
  CHECK_THROWS_AS(m_matrix(0.1, "P,X,T,E"), InvalidInput);
}

TEST_CASE("the two orderings describe the same map") {
  const Eigen::Vector4d z(0.3, -0.7, 1.1, 0.4);  // (X, T, P_x, P_t)
  const Eigen::Vector4d zs(z[1], z[0], z[3], z[2]);
  const Eigen::Vector4d a = m_transform(z, 0.4, kCanonicalOrdering);
  const Eigen::Vector4d b = m_transform(zs, 0.4, kSwappedOrdering);
  CHECK((Eigen::Vector4d(b[1], b[0], b[3], b[2]) - a).norm() < 1e-15);
}

TEST_CASE("boosts") {
  const double th = 0.2, m = 1.0;
  const GridSpec g = GridSpec::box(64, 7.0, th);
  const Field2D psi =
      sample_field([](double t, double x) { return oracle::gaussian_wave(t, x, 0.0, 0.0, 1.0, 0.3, 0.1); }, g);
  CHECK(gap(boost_transform(psi, 0.0, m, th).field, psi) == 0.0);
  CHECK_THROWS_AS(boost_transform(psi, 5.0, m, th), InvalidInput);

  const double E = 0.5, p = 1.0, v = 0.01;
  const GridSpec g0 = GridSpec::box(16, 1.0, 0.0);
  const Field2D plain = sample_field(boost_plane_wave(E, p, v, m, 0.0, BoostForm::PaperProduct), g0);
  const Field2D textbook = sample_field(
      [=](double t, double x) {
        const double xs = x + v * t;
        return std::exp(kI * (-m * v * xs - (E * t - p * xs) + v * p * t));
      },
      g0);
  CHECK(gap(plain, textbook) < 1e-14);
  const Field2D deformed = sample_field(boost_plane_wave(E, p, v, m, 0.2, BoostForm::PaperProduct), g0);
  CHECK(std::abs(deformed.values(3, 4) / plain.values(3, 4) - std::exp(kI * v * 0.1)) < 1e-14);

  const auto r = boost_transform(psi, 0.01, m, th);
  CHECK(r.error_estimate > 0.0);
  CHECK(r.error_estimate < 1e-3);
}

TEST_CASE("operator serialization round-trips") {
  const auto h = SymbolOperator::make(OpKind::Hamiltonian, 0.1, 2.0, Potential::harmonic(2.0, 1.5));
  const auto back = SymbolOperator::from_json(h.to_json());
  CHECK(back.kind == OpKind::Hamiltonian);
  CHECK(back.mass == 2.0);
  CHECK(back.potential.omega == 1.5);
  CHECK_THROWS_AS(parse_op_kind("Q"), InvalidInput);
  CHECK_THROWS_AS(apply(op(OpKind::X_L, 0.1), SliceState(GridSpec::line(64, -4, 4, 0.1), 0.0)), InvalidInput);
}
