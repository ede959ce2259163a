#include "oracles.hpp"
#include "rfh/error.hpp"
#include "rfh/spectrum.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace rfh;

TEST_CASE("abstract N=3 real model enumerates labels and eigenvalues") {
  const SpectralModel m = build_model(ModelKind::abstract, {3}, false);
  CHECK(m.labels == std::vector<int>{-3, -2, -1, 1, 2, 3});
  CHECK(m.eigenvalues == std::vector<double>{-3, -2, -1, 1, 2, 3});
  CHECK(m.real_dim() == 6);
  CHECK(m.negative_dim() == 3);
  CHECK(m.kernel_dim == 0);
}

TEST_CASE("beam eigenvalues are +-sqrt(j^2 + (k pi)^4)") {
  using std::numbers::pi;
  const SpectralModel m = build_model(ModelKind::beam, {1, 1}, false);
  std::vector<double> expected{-std::sqrt(1 + std::pow(pi, 4)), -pi * pi, pi * pi, std::sqrt(1 + std::pow(pi, 4))};
  REQUIRE(m.eigenvalues.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(m.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-14));
}

TEST_CASE("wave model segregates resonant modes into the kernel") {
  const SpectralModel m = build_model(ModelKind::wave, {2}, false);
  CHECK(m.kernel_dim > 0);
  CHECK(std::none_of(m.eigenvalues.begin(), m.eigenvalues.end(), [](double v) { return v == 0.0; }));
  CHECK_THROWS_AS(build_model(ModelKind::wave, {2}, true), Error);
}

TEST_CASE("model invariants hold for every kind") {
  const std::vector<SpectralModel> models{
      build_model(ModelKind::abstract, {4}, false), build_model(ModelKind::abstract, {3}, true),
      build_model(ModelKind::dirac_toy, {3}, true),  build_model(ModelKind::elliptic_system, {3}, false),
      build_model(ModelKind::beam, {2, 2}, false),   build_model(ModelKind::wave, {3}, false)};
  for (const auto& m : models) {
    CHECK(std::is_sorted(m.labels.begin(), m.labels.end()));
    CHECK(std::adjacent_find(m.labels.begin(), m.labels.end()) == m.labels.end());
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
      CHECK(m.eigenvalues[i] != 0.0);
      CHECK((m.eigenvalues[i] > 0) == (m.labels[i] > 0));
    }
  }
}

TEST_CASE("zero or invalid truncations are rejected") {
  CHECK_THROWS_AS(build_model(ModelKind::abstract, {0}, false), Error);
  CHECK_THROWS_AS(build_model(ModelKind::beam, {1}, false), Error);
  ModelParams p;
  p.eigenvalues = std::vector<double>{-1.0, 0.0, 2.0};
  CHECK_THROWS_AS(build_model(p), Error);
}

TEST_CASE("h_inner examples") {
  const SpectralModel m = build_model(ModelKind::abstract, {3}, false);
  StatePoint z{Vec::Zero(6), 0.0};
  z.coeffs[m.label_index(2)] = 1.0;
  CHECK(h_inner(m, z, z) == doctest::Approx(2.0));
  StatePoint a{Vec::Zero(6), 1.0};
  StatePoint b{Vec::Zero(6), 3.0};
  CHECK(h_inner(m, a, b) == doctest::Approx(3.0));
}

TEST_CASE("h_inner matches a brute-force weighted sum on random pairs") {
  auto g = oracle::rng(11);
  const SpectralModel m = build_model(ModelKind::dirac_toy, {4}, true);
  for (int trial = 0; trial < 50; ++trial) {
    const StatePoint z1{oracle::gaussian(g, m.real_dim()), oracle::uniform(g, -2, 2)};
    const StatePoint z2{oracle::gaussian(g, m.real_dim()), oracle::uniform(g, -2, 2)};
    double expected = z1.multiplier * z2.multiplier;
    for (int s = 0; s < m.real_dim(); ++s) {
      expected += std::abs(m.eigenvalues[s / 2]) * z1.coeffs[s] * z2.coeffs[s];
    }
    CHECK(h_inner(m, z1, z2) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("split_pm separates positive and negative labels") {
  const SpectralModel m = build_model(ModelKind::abstract, {2}, false);
  const StatePoint z{Vec::Ones(4), 0.5};
  const auto [plus, minus] = split_pm(m, z);
  CHECK(plus.coeffs == Vec((Vec(4) << 0, 0, 1, 1).finished()));
  CHECK(minus.coeffs == Vec((Vec(4) << 1, 1, 0, 0).finished()));
  CHECK(plus.multiplier == 0.0);

  StatePoint neg{Vec::Zero(4), 0.0};
  neg.coeffs[0] = 2.0;
  const auto [p2, m2] = split_pm(m, neg);
  CHECK(p2.coeffs.isZero());
  CHECK(m2.coeffs == neg.coeffs);
}

TEST_CASE("property: split_pm is an H-orthogonal idempotent decomposition") {
  auto g = oracle::rng(12);
  const SpectralModel m = build_model(ModelKind::beam, {2, 2}, false);
  for (int trial = 0; trial < 100; ++trial) {
    const StatePoint z{oracle::gaussian(g, m.real_dim()), 0.0};
    const auto [plus, minus] = split_pm(m, z);
    CHECK(h_inner(m, plus, minus) == 0.0);
    CHECK((plus.coeffs + minus.coeffs - z.coeffs).norm() == 0.0);
    const auto [pp, pm] = split_pm(m, plus);
    CHECK(pp.coeffs == plus.coeffs);
    CHECK(pm.coeffs.isZero());
  }
}

TEST_CASE("property: H-norm is bracketed by the extreme eigenvalue magnitudes") {
  auto g = oracle::rng(13);
  const SpectralModel m = build_model(ModelKind::elliptic_system, {3}, false);
  double lo = INFINITY, hi = 0.0;
  for (double v : m.eigenvalues) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Vec u = oracle::gaussian(g, m.real_dim());
    const double e = e_norm2(u);
    CHECK(h_norm2(m, u) >= lo * e * (1 - 1e-14));
    CHECK(h_norm2(m, u) <= hi * e * (1 + 1e-14));
  }
}

TEST_CASE("property: phase rotation preserves E- and H-norms") {
  auto g = oracle::rng(14);
  const SpectralModel m = build_model(ModelKind::abstract, {4}, true);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec u = oracle::gaussian(g, m.real_dim());
    const double theta = oracle::uniform(g, -7, 7);
    const Vec r = rotate_phase(m, u, theta);
    CHECK(e_norm2(r) == doctest::Approx(e_norm2(u)).epsilon(1e-14));
    CHECK(h_norm2(m, r) == doctest::Approx(h_norm2(m, u)).epsilon(1e-14));
    // generator is the derivative of the rotation at 0
    const Vec fd = (rotate_phase(m, u, 1e-6) - rotate_phase(m, u, -1e-6)) / 2e-6;
    CHECK((fd - phase_generator(m, u)).norm() <= 1e-8 * (1 + u.norm()));
  }
}

TEST_CASE("check_conforms rejects wrong coefficient lengths") {
  const SpectralModel m = build_model(ModelKind::abstract, {2}, true);
  CHECK_NOTHROW(check_conforms(m, StatePoint{Vec::Zero(8), 0.0}));
  CHECK_THROWS_AS(check_conforms(m, StatePoint{Vec::Zero(4), 0.0}), Error);
}
