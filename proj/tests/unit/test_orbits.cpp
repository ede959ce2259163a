#include "oracles.hpp"
#include "rfh/collocation.hpp"
#include "rfh/error.hpp"
#include "rfh/functional.hpp"
#include "rfh/orbits.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace rfh;

namespace {

CriticalSearch window(double lo, double hi) {
  CriticalSearch s;
  s.window_lo = lo;
  s.window_hi = hi;
  s.n_starts = 100;
  s.seed = 5;
  return s;
}

const CriticalRecord& record_near(const std::vector<CriticalRecord>& recs, const SpectralModel& m, int label,
                                  double sign) {
  for (const auto& r : recs) {
    const int k = m.label_index(label);
    if (std::abs(r.point.coeffs[k] - sign) < 1e-6) return r;
  }
  FAIL("record not found");
  return recs.front();
}

/// Reduced sphere flow on (a_k, a_{k+1}, lambda); the two-label plane is invariant.
Vec reduced_field(double lk, double lk1, const Vec& y) {
  Vec f(3);
  f[0] = (y[2] - lk) * y[0] / std::abs(lk);
  f[1] = (y[2] - lk1) * y[1] / std::abs(lk1);
  f[2] = 0.5 * (y[0] * y[0] + y[1] * y[1] - 1.0);
  return f;
}

}  // namespace

TEST_CASE("collocation reproduces the logistic heteroclinic") {
  // z' = z (1 - z) from 0 to 1, anchored at z(0) = 1/2: z = 1 / (1 + e^{-t})
  BvpProblem p;
  p.dim = 1;
  p.grid = StretchedGrid{48, std::log(1e8), 0.0, 4.0};
  p.field = [](double, const Vec& z) { return Vec::Constant(1, z[0] * (1 - z[0])); };
  p.jacobian = [](double, const Vec& z) { return Mat::Constant(1, 1, 1 - 2 * z[0]); };
  p.source = {Vec::Zero(1), Mat(0, 1)};
  p.target = {Vec::Ones(1), Mat(0, 1)};
  p.anchor = AnchorCondition{0.0, 0.5, [](const Vec& z) { return z[0]; }, [](const Vec&) { return Vec::Ones(1); }};
  Mat init(48, 1);
  const Vec s = p.grid.s_nodes();
  for (int j = 0; j < 48; ++j) init(j, 0) = p.grid.time(s[j]) > 0 ? 0.9 : 0.1;
  const BvpSolution sol = solve_bvp(p, init);
  REQUIRE(sol.converged);
  CHECK(sol.defect <= 1e-6);
  for (double t : {-5.0, -1.0, 0.0, 0.5, 3.0, 8.0}) {
    CHECK(interpolate_nodes(sol.grid, sol.nodes, t)[0] == doctest::Approx(1 / (1 + std::exp(-t))).epsilon(1e-6));
  }
}

TEST_CASE("non-square boundary value problems are rejected") {
  BvpProblem p;
  p.dim = 1;
  p.grid = StretchedGrid{16, 5.0, 0.0, 4.0};
  p.field = [](double, const Vec& z) { return z; };
  p.jacobian = [](double, const Vec&) { return Mat::Ones(1, 1); };
  p.source = {Vec::Zero(1), Mat::Ones(1, 1)};
  p.target = {Vec::Zero(1), Mat::Ones(1, 1)};
  CHECK_THROWS_AS(solve_bvp(p, Mat::Zero(16, 1)), Error);
}

TEST_CASE("flow started at a critical point stays put") {
  const SpectralModel m = build_model(ModelKind::abstract, {2}, false);
  Vec u = Vec::Zero(4);
  u[m.label_index(1)] = 1.0;
  const Trajectory tr = integrate_flow(m, Potential::sphere(), StatePoint{u, 1.0}, FlowOptions{});
  for (const auto& p : tr.points) {
    CHECK((p.coeffs - u).norm() <= 1e-14);
    CHECK(p.multiplier == 1.0);
  }
}

TEST_CASE("sphere flow follows the closed-form coefficient evolution") {
  const SpectralModel m = build_model(ModelKind::abstract, {3}, false);
  auto g = oracle::rng(51);
  // Two bounded regimes: positive modes inside the sphere with lambda drifting
  // down, and all modes with lambda below every eigenvalue.
  std::vector<StatePoint> starts;
  {
    Vec u = Vec::Zero(6);
    for (int label : {1, 2, 3}) u[m.label_index(label)] = oracle::uniform(g, 0.2, 0.5);
    starts.push_back({u, 0.5});
  }
  {
    Vec u = oracle::gaussian(g, 6);
    u *= 0.8 / u.norm();
    starts.push_back({u, -3.5});
  }
  for (const StatePoint& z0 : starts) {
    FlowOptions opt;
    opt.t_max = 10.0;
    opt.tol = 1e-12;
    opt.abs_tol = 1e-300;
    for (int i = 1; i <= 2000; ++i) opt.sample_times.push_back(0.005 * i);
    const Trajectory tr = integrate_flow(m, Potential::sphere(), z0, opt);
    REQUIRE(tr.times.back() == doctest::Approx(10.0));
    // RK4 on the full system augmented with Lambda' = lambda is an independent
    // reference for both the end state and int_0^t lambda
    const int n = m.real_dim() + 1;
    const auto field = [&](const Vec& y) {
      Vec out(n + 1);
      out.head(n) = flow_packed(m, Potential::sphere(), y.head(n));
      out[n] = y[n - 1];
      return out;
    };
    Vec y(n + 1);
    y << z0.packed(), 0.0;
    std::map<long, double> lambda_integral;
    for (int i = 1; i <= 2000; ++i) {
      y = oracle::rk4(field, y, 0.005, 10);
      lambda_integral[i] = y[n];
    }
    CHECK((tr.points.back().packed() - y.head(n)).norm() <= 1e-8 * y.head(n).norm());
    double worst = 0.0;
    int compared = 0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      const long i = std::lround(tr.times[k] / 0.005);
      if (i < 1 || std::abs(tr.times[k] - 0.005 * i) > 1e-12) continue;
      ++compared;
      for (int s = 0; s < 6; ++s) {
        if (z0.coeffs[s] == 0.0) {
          CHECK(tr.points[k].coeffs[s] == 0.0);
          continue;
        }
        const double li = m.eigenvalues[s];
        const double closed = z0.coeffs[s] * std::exp((lambda_integral[i] - li * tr.times[k]) / std::abs(li));
        worst = std::max(worst, std::abs(tr.points[k].coeffs[s] - closed) / std::abs(closed));
      }
    }
    CHECK(compared >= 2000);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("a start on the linear stable direction lands on its record") {
  // at (e_1, 1) the (a_1, lambda) block of the flow Jacobian is [[0, 1], [1, 0]]
  const SpectralModel m = build_model(ModelKind::abstract, {2}, false);
  const auto recs = find_critical_points(m, Potential::sphere(), window(-2.5, 2.5));
  Vec u = Vec::Zero(4);
  u[m.label_index(1)] = 1.0 + 1e-7;
  FlowOptions opt;
  opt.t_max = 40.0;
  opt.stop_gradient = 1e-8;
  const Trajectory tr = integrate_flow(m, Potential::sphere(), StatePoint{u, 1.0 - 1e-7}, opt, &recs);
  CHECK(tr.converged);
  REQUIRE(tr.landed_on.has_value());
  const auto it = std::find_if(recs.begin(), recs.end(), [&](const auto& r) { return r.id == *tr.landed_on; });
  REQUIRE(it != recs.end());
  CHECK(it->point.coeffs[m.label_index(1)] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < tr.actions.size(); ++i) CHECK(tr.actions[i] <= tr.actions[i - 1] + 1e-12);
}

TEST_CASE("count_mod2 takes parities") {
  OrbitTable t;
  t[{"a", "b"}] = std::vector<OrbitRecord>(1);
  t[{"a", "c"}] = std::vector<OrbitRecord>(2);
  t[{"a", "d"}] = {};
  const CountTable c = count_mod2(t);
  CHECK(c.at({"a", "b"}) == 1);
  CHECK(c.at({"a", "c"}) == 0);
  CHECK(c.at({"a", "d"}) == 0);
}

TEST_CASE("ps_monitor on a constant path has zero waiting times") {
  const SpectralModel m = build_model(ModelKind::abstract, {2}, false);
  Vec u = Vec::Zero(4);
  u[m.label_index(2)] = 1.0;
  SampledPath path;
  for (int i = 0; i < 10; ++i) {
    path.times.push_back(i);
    path.points.push_back({u, 2.0});
  }
  const PsDiagnostic d = ps_monitor(m, Potential::sphere(), path, -3, 3, 0.1, ps_constant(-3, 3, 1.0));
  for (double t : d.tau_values) CHECK(t == 0.0);
  CHECK_FALSE(d.bound_violated);
  CHECK(ps_constant(-3, 3, 1.0) == doctest::Approx(1.1 * 6));
}

TEST_CASE("real sphere orbits: one per sign, two labels, stable under refinement") {
  const SpectralModel m = build_model(ModelKind::abstract, {2}, false);
  const Potential sphere = Potential::sphere(Symmetry::z2);
  const auto recs = find_critical_points(m, sphere, window(-2.5, 2.5));
  const CriticalRecord& src = record_near(recs, m, 2, 1.0);
  OrbitSearch os;
  os.n_starts = 6;
  os.seed = 9;
  for (double sign : {1.0, -1.0}) {
    const CriticalRecord& tgt = record_near(recs, m, 1, sign);
    const auto orbits = find_connecting_orbits(m, sphere, src, tgt, os);
    REQUIRE(orbits.size() == 1);
    const OrbitRecord& o = orbits[0];
    CHECK(o.residual <= os.tol);
    for (std::size_t j = 1; j < o.action_profile.size(); ++j) CHECK(o.action_profile[j] <= o.action_profile[j - 1] + 1e-9);
    double off = 0.0;
    for (const auto& p : o.nodes) {
      off = std::max({off, std::abs(p.coeffs[m.label_index(-1)]), std::abs(p.coeffs[m.label_index(-2)])});
    }
    CHECK(off <= 1e-8);
    const PsDiagnostic d = ps_monitor(m, sphere, sample_orbit(o, 100), -2.5, 2.5, 0.1, ps_constant(-2.5, 2.5, 1.0));
    CHECK_FALSE(d.bound_violated);

    OrbitSearch fine = os;
    fine.m = 128;
    CHECK(find_connecting_orbits(m, sphere, src, tgt, fine).size() == 1);
    OrbitSearch longer = os;
    longer.horizon_extension = 5.0;
    CHECK(find_connecting_orbits(m, sphere, src, tgt, longer).size() == 1);
  }
}

TEST_CASE("shooting on the reduced two-label system finds one orbit per sign") {
  // At e_2 the reduced flow has a two-dimensional unstable manifold spanned
  // by a_1 and the (a_2, lambda) eigenvector (1, sqrt 2). Every start on a
  // small circle in it either blows up or collapses to u = 0; the separatrix
  // between the two outcomes is the connecting orbit.
  const double l1 = 1.0, l2 = 2.0, eps = 1e-6;
  const Vec v2 = Vec((Vec(3) << 0.0, 1.0, std::sqrt(2.0)).finished()).normalized();
  struct Outcome {
    int kind = 0;  // +1 blow-up, -1 collapse
    double closest_plus = 1e9, closest_minus = 1e9;
  };
  const auto shoot = [&](double theta) {
    Vec y(3);
    y << 0.0, 1.0, l2;
    y += eps * (std::cos(theta) * v2 + std::sin(theta) * Vec::Unit(3, 0));
    Outcome out;
    const double h = 4e-3;
    for (int i = 0; i < 20000; ++i) {
      y = oracle::rk4([&](const Vec& x) { return reduced_field(l1, l2, x); }, y, h, 1);
      out.closest_plus = std::min(out.closest_plus, std::hypot(y[0] - 1, y[1], y[2] - l1));
      out.closest_minus = std::min(out.closest_minus, std::hypot(y[0] + 1, y[1], y[2] - l1));
      if (y[2] > 10) return out.kind = 1, out;
      if (y[2] < -5) return out.kind = -1, out;
    }
    return out;
  };
  // The a_1 rate exceeds the (a_2, lambda) rate, so the outcome only changes
  // within a few 1e-3 of theta = pi; offsets from pi are scanned on a log scale.
  int plus = 0, minus = 0;
  for (double side : {-1.0, 1.0}) {
    std::vector<double> offsets;
    for (int i = 0; i <= 80; ++i) offsets.push_back(std::pow(10.0, -7.0 + i * (7.0 + std::log10(M_PI)) / 80));
    for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
      double lo = M_PI + side * offsets[i], hi = M_PI + side * offsets[i + 1];
      const Outcome a = shoot(lo), b = shoot(hi);
      if (a.kind == b.kind) continue;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (shoot(mid).kind == a.kind ? lo : hi) = mid;
      }
      const Outcome best = shoot(0.5 * (lo + hi));
      if (best.closest_plus < 1e-3) ++plus;
      if (best.closest_minus < 1e-3) ++minus;
    }
  }
  CHECK(plus == 1);
  CHECK(minus == 1);
}

TEST_CASE("index gap other than one is rejected") {
  const SpectralModel m = build_model(ModelKind::abstract, {2}, false);
  const auto recs = find_critical_points(m, Potential::sphere(Symmetry::z2), window(-2.5, 2.5));
  const CriticalRecord& a = record_near(recs, m, 2, 1.0);
  const CriticalRecord& b = record_near(recs, m, 2, -1.0);
  CHECK_THROWS_AS(find_connecting_orbits(m, Potential::sphere(Symmetry::z2), a, b, OrbitSearch{}), Error);
}
