#include "oracles.hpp"
#include "rfh/critical.hpp"
#include "rfh/error.hpp"
#include "rfh/functional.hpp"
#include "rfh/potentials.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rfh;

namespace {

struct Case {
  std::string name;
  SpectralModel model;
  Potential pot;
};

std::vector<Case> potential_cases() {
  const SpectralModel real4 = build_model(ModelKind::abstract, {3}, false);
  const SpectralModel cplx = build_model(ModelKind::abstract, {2}, true);
  const SpectralModel ell = build_model(ModelKind::elliptic_system, {2}, false);
  std::vector<double> w(real4.real_dim());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.9 + 0.2 * i / (w.size() - 1.0);
  return {
      {"sphere", real4, Potential::sphere()},
      {"ellipsoid", real4, Potential::ellipsoid(w)},
      {"p_power", real4, Potential::p_power(3.0, {1.0, 0.3})},
      {"p_power complex", cplx, Potential::p_power(3.0, {1.0}, 0, Symmetry::s1)},
      {"p_power elliptic", ell, Potential::p_power(2.5)},
      {"radial polynomial", real4, Potential::radial_polynomial({-0.5, 0.4, 0.1})},
      {"linear blend", real4, Potential::linear_blend(Potential::sphere(), Potential::ellipsoid(w), 0.3)},
      {"cutoff blend", real4, Potential::cutoff_blend(Potential::sphere(), Potential::p_power(3.0), 0.5)},
      {"generic", real4, perturb_generic(Potential::sphere(), real4, 1e-2, 4)},
      {"generic z2", real4, perturb_generic(Potential::sphere(Symmetry::z2), real4, 1e-2, 5)},
      {"generic s1", cplx, perturb_generic(Potential::sphere(Symmetry::s1), cplx, 1e-2, 6)},
  };
}

}  // namespace

TEST_CASE("sphere jet on the unit sphere") {
  const SpectralModel m = build_model(ModelKind::abstract, {3}, false);
  auto g = oracle::rng(21);
  Vec u = oracle::gaussian(g, m.real_dim());
  u /= u.norm();
  const PotentialJet j = Potential::sphere().jet(m, u);
  CHECK(std::abs(j.value) <= 1e-15);
  CHECK((j.grad - u).norm() <= 1e-15);
  CHECK((j.hess - Mat::Identity(6, 6)).norm() == 0.0);
}

TEST_CASE("ellipsoid jet by hand") {
  const SpectralModel m = build_model(ModelKind::abstract, {1}, false);
  const Potential e = Potential::ellipsoid({2.0, 1.0});
  Vec u = Vec::Zero(2);
  u[0] = 1.0 / std::sqrt(2.0);
  const PotentialJet j = e.jet(m, u);
  CHECK(std::abs(j.value) <= 1e-15);
  CHECK(j.grad[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(j.grad[1] == 0.0);
}

TEST_CASE("p_power single mode matches the closed-form integral") {
  // int_0^{2pi} |A sqrt2 cos x|^4 dx / 2pi = 3/2 A^4
  const SpectralModel m = build_model(ModelKind::abstract, {3}, false);
  const Potential p = Potential::p_power(3.0);
  for (double a : {0.3, 0.8, 1.7}) {
    Vec u = Vec::Zero(m.real_dim());
    u[m.label_index(2)] = a;
    CHECK(p.value(m, u) == doctest::Approx((1.5 * std::pow(a, 4) - 1.0) / 4.0).epsilon(1e-13));
  }
}

TEST_CASE("p_power quadrature is stable under grid doubling") {
  const SpectralModel m = build_model(ModelKind::abstract, {3}, false);
  const Potential coarse = Potential::p_power(3.0, {1.0, 0.4});
  const Potential fine = Potential::p_power(3.0, {1.0, 0.4}, 2 * default_grid_points(m));
  auto g = oracle::rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec u = oracle::gaussian(g, m.real_dim());
    CHECK(coarse.value(m, u) == doctest::Approx(fine.value(m, u)).epsilon(1e-10));
  }
}

TEST_CASE("property: gradient and Hessian agree with central differences") {
  auto g = oracle::rng(23);
  for (const auto& c : potential_cases()) {
    CAPTURE(c.name);
    for (int trial = 0; trial < 20; ++trial) {
      Vec u = oracle::gaussian(g, c.model.real_dim());
      u *= oracle::uniform(g, 0.3, 1.5) / u.norm();
      const Vec v = oracle::gaussian(g, u.size()).normalized();
      const PotentialJet j = c.pot.jet(c.model, u);
      const double fd = oracle::directional_fd([&](const Vec& x) { return c.pot.value(c.model, x); }, u, v, 1e-5);
      CHECK(std::abs(fd - j.grad.dot(v)) <= 1e-6 * std::max(1.0, std::abs(j.grad.dot(v))));
      const Mat hfd = oracle::jacobian_fd([&](const Vec& x) { return c.pot.jet(c.model, x, JetOrder::gradient).grad; },
                                          u, 1e-5);
      CHECK((hfd - j.hess).norm() <= 1e-5 * std::max(1.0, j.hess.norm()));
      CHECK((j.hess - j.hess.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, j.hess.norm()));
    }
  }
}

TEST_CASE("property: declared symmetries hold on random samples") {
  auto g = oracle::rng(24);
  for (const auto& c : potential_cases()) {
    CAPTURE(c.name);
    for (int trial = 0; trial < 20; ++trial) {
      const Vec u = oracle::gaussian(g, c.model.real_dim());
      const double f = c.pot.value(c.model, u);
      if (c.pot.symmetry() == Symmetry::z2) CHECK(c.pot.value(c.model, -u) == doctest::Approx(f).epsilon(1e-13));
      if (c.pot.symmetry() == Symmetry::s1) {
        const Vec r = rotate_phase(c.model, u, oracle::uniform(g, 0, 6.3));
        CHECK(c.pot.value(c.model, r) == doctest::Approx(f).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("check_starshape on standard potentials") {
  const SpectralModel m = build_model(ModelKind::abstract, {3}, false);
  const StarshapeReport s = check_starshape(Potential::sphere(), m, 200, 1);
  CHECK(s.passed);
  CHECK(s.min_radial_derivative == doctest::Approx(1.0).epsilon(1e-10));
  const StarshapeReport p = check_starshape(Potential::p_power(3.0), m, 200, 2);
  CHECK(p.passed);
  CHECK(p.min_radial_derivative == doctest::Approx(1.0).epsilon(1e-8));
  const StarshapeReport h = check_starshape(Potential::p_power(3.0, {1.0, 0.5}), m, 200, 3);
  CHECK(h.passed);
  CHECK(h.min_radial_derivative > 0.4);
  const StarshapeReport e = check_starshape(Potential::ellipsoid(std::vector<double>(6, 1.1)), m, 200, 4);
  CHECK(e.passed);
}

TEST_CASE("an annular zero set is not starshaped") {
  // F = (q - 1)(q - 4) - 0.1 with q = |u|^2 has two radial roots
  const SpectralModel m = build_model(ModelKind::abstract, {2}, false);
  const Potential annulus = Potential::radial_polynomial({4.0 - 0.1, -5.0, 1.0});
  Vec d = Vec::Zero(4);
  d[0] = 1.0;
  CHECK_THROWS_WITH_AS(radial_root(annulus, m, d), doctest::Contains("MultipleCrossings"), Error);
  CHECK_THROWS_AS(check_starshape(annulus, m, 10, 1), Error);
}

TEST_CASE("zero-strength perturbation leaves values unchanged") {
  const SpectralModel m = build_model(ModelKind::abstract, {3}, false);
  const Potential base = Potential::ellipsoid(std::vector<double>(6, 1.05));
  const Potential same = perturb_generic(base, m, 0.0, 9);
  auto g = oracle::rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec u = oracle::gaussian(g, 6);
    CHECK(same.value(m, u) == base.value(m, u));
  }
}

TEST_CASE("generic perturbation shifts multipliers by O(strength)") {
  const SpectralModel m = build_model(ModelKind::abstract, {3}, false);
  const Potential pert = perturb_generic(Potential::sphere(), m, 1e-3, 7);
  for (int k = 0; k < m.real_dim(); ++k) {
    Vec z = Vec::Zero(m.real_dim() + 1);
    z[k] = 1.0;
    z[m.real_dim()] = m.eigenvalues[k];
    const auto polished = newton_polish(m, pert, z, 1e-12);
    REQUIRE(polished);
    const double shift = std::abs((*polished)[m.real_dim()] - m.eigenvalues[k]);
    CHECK(shift > 0.0);
    CHECK(shift <= 1e-2);
  }
}

TEST_CASE("symmetry breaking on a circle adds strength * cos(theta) to F") {
  const SpectralModel m = build_model(ModelKind::abstract, {2}, true);
  const Potential sphere = Potential::sphere(Symmetry::s1);
  CriticalSearch search;
  search.window_lo = -2.5;
  search.window_hi = 2.5;
  search.n_starts = 60;
  const auto circles = find_critical_points(m, sphere, search);
  REQUIRE(circles.size() == 4);
  const CriticalRecord& c = circles[2];
  const double s = 1e-3;
  const Potential broken = break_symmetry(sphere, m, c, s);
  CHECK(broken.symmetry() == Symmetry::none);
  auto g = oracle::rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = oracle::uniform(g, -std::numbers::pi, std::numbers::pi);
    const Vec u = rotate_phase(m, c.point.coeffs, theta);
    // angle measured from the Re axis of the circle's label plane
    const int li = dominant_label_index(m, u);
    const double phase = std::atan2(u[2 * li + 1], u[2 * li]);
    CHECK(broken.value(m, u) - sphere.value(m, u) == doctest::Approx(s * std::cos(phase)).epsilon(1e-12));
  }
  CHECK(break_symmetry(sphere, m, c, 0.0).value(m, c.point.coeffs) == sphere.value(m, c.point.coeffs));
  CHECK_THROWS_AS(break_symmetry(Potential::sphere(), m, c, s), Error);
}

TEST_CASE("a bump on one circle leaves another circle's critical value unchanged") {
  const SpectralModel m = build_model(ModelKind::abstract, {2}, true);
  const Potential sphere = Potential::sphere(Symmetry::s1);
  CriticalSearch search;
  search.window_lo = -2.5;
  search.window_hi = 2.5;
  search.n_starts = 60;
  const auto circles = find_critical_points(m, sphere, search);
  REQUIRE(circles.size() == 4);
  const Potential broken = break_symmetry(sphere, m, circles[3], 1e-3);
  const auto z = newton_polish(m, broken, circles[2].point.packed(), 1e-13);
  REQUIRE(z);
  const double value = action_value(m, broken, StatePoint::unpack(*z));
  CHECK(std::abs(value - circles[2].action) <= 1e-12);
}

TEST_CASE("sampled sup difference of equal potentials is zero") {
  const SpectralModel m = build_model(ModelKind::abstract, {2}, false);
  CHECK(sampled_sup_difference(Potential::sphere(), Potential::sphere(), m, 2.0, 100, 1) == 0.0);
  // |F_sphere - F_ellipsoid| = 0.05 |u|^2 <= 0.05 r^2
  const double d = sampled_sup_difference(Potential::sphere(), Potential::ellipsoid(std::vector<double>(4, 1.1)), m,
                                          2.0, 2000, 1);
  CHECK(d <= 0.2 + 1e-12);
  CHECK(d > 0.1);
}
