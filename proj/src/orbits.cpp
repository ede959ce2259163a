#include "rfh/orbits.hpp"

#include "rfh/error.hpp"
#include "rfh/parallel.hpp"
#include "rfh/random.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace rfh {

namespace {

double gradient_h_norm(const SpectralModel& model, const Potential& pot, const Vec& z) {
  const Vec g = euclid_gradient(model, pot, z);
  return std::sqrt((g.array().square() / metric_diagonal(model).array()).sum());
}

Vec to_eigen(const std::vector<double>& x) { return Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size())); }

std::vector<double> to_std(const Vec& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

}  // namespace

Trajectory integrate_flow(const SpectralModel& model, const Potential& pot, const StatePoint& z0,
                          const FlowOptions& options, const std::vector<CriticalRecord>* records) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  if (!(options.tol > 0)) throw Error(ErrorCode::InvalidArgument, "integration tolerance must be positive");
  check_conforms(model, z0);

  auto system = [&](const State& x, State& dxdt, double) { dxdt = to_std(flow_packed(model, pot, to_eigen(x))); };

  Trajectory traj;
  auto record = [&](double t, const Vec& z) {
    traj.times.push_back(t);
    traj.points.push_back(StatePoint::unpack(z));
    traj.actions.push_back(action_value(model, pot, traj.points.back()));
    traj.grad_norms.push_back(gradient_h_norm(model, pot, z));
  };

  std::vector<double> samples = options.sample_times;
  std::sort(samples.begin(), samples.end());
  std::size_t next_sample = 0;

  const Vec start = z0.packed();
  record(0.0, start);
  while (next_sample < samples.size() && samples[next_sample] <= 0.0) {
    if (samples[next_sample] == 0.0) record(0.0, start);
    ++next_sample;
  }
  if (traj.grad_norms.front() <= options.stop_gradient) {
    traj.converged = true;
  } else {
    auto stepper = odeint::make_dense_output(options.abs_tol < 0 ? options.tol : options.abs_tol, options.tol, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(to_std(start), 0.0, std::min(1e-2, options.t_max));
    State buffer(start.size());
    while (stepper.current_time() < options.t_max) {
      const auto [t_prev, t_now] = stepper.do_step(system);
      while (next_sample < samples.size() && samples[next_sample] <= std::min(t_now, options.t_max)) {
        if (samples[next_sample] > t_prev) {
          stepper.calc_state(samples[next_sample], buffer);
          record(samples[next_sample], to_eigen(buffer));
        }
        ++next_sample;
      }
      Vec z;
      double t = t_now;
      if (t_now > options.t_max) {
        stepper.calc_state(options.t_max, buffer);
        z = to_eigen(buffer);
        t = options.t_max;
      } else {
        z = to_eigen(stepper.current_state());
      }
      if (!z.allFinite() || z.head(model.real_dim()).norm() > options.blowup_norm) {
        throw Error(ErrorCode::BlowUp, "flow left the admissible region at t = " + std::to_string(t));
      }
      if (t == t_now) record(t, z);
      if (traj.grad_norms.back() <= options.stop_gradient) {
        traj.converged = true;
        break;
      }
      if (t_now >= options.t_max) break;
    }
  }
  if (records) {
    const Vec last = traj.points.back().packed();
    double best = 1e-6;
    for (const auto& r : *records) {
      const double d = orbit_distance(model, pot.symmetry(), last, r.point.packed());
      if (d <= best) {
        best = d;
        traj.landed_on = r.id;
      }
    }
  }
  return traj;
}

Mat OrbitRecord::node_matrix() const {
  Mat out(static_cast<Eigen::Index>(nodes.size()), nodes.empty() ? 0 : nodes.front().coeffs.size() + 1);
  for (std::size_t j = 0; j < nodes.size(); ++j) out.row(static_cast<Eigen::Index>(j)) = nodes[j].packed().transpose();
  return out;
}

Linearization linearize(const SpectralModel& model, const Potential& pot, const Vec& z) {
  Linearization lin;
  const Vec g = metric_diagonal(model);
  lin.g_sqrt = g.cwiseSqrt();
  const Mat a = euclid_hessian(model, pot, z);
  const Vec gi = lin.g_sqrt.cwiseInverse();
  const Mat m = gi.asDiagonal() * a * gi.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (m + m.transpose()));
  lin.mu = eig.eigenvalues();
  lin.q = eig.eigenvectors();
  return lin;
}

Mat Linearization::unstable_rows() const {
  std::vector<int> keep;
  for (int j = 0; j < mu.size(); ++j) {
    if (mu[j] >= 0) keep.push_back(j);
  }
  Mat rows(static_cast<Eigen::Index>(keep.size()), mu.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    rows.row(static_cast<Eigen::Index>(r)) = (q.col(keep[r]).array() * g_sqrt.array()).matrix().transpose();
  }
  return rows;
}

Mat Linearization::stable_rows() const {
  std::vector<int> keep;
  for (int j = 0; j < mu.size(); ++j) {
    if (mu[j] <= 0) keep.push_back(j);
  }
  Mat rows(static_cast<Eigen::Index>(keep.size()), mu.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    rows.row(static_cast<Eigen::Index>(r)) = (q.col(keep[r]).array() * g_sqrt.array()).matrix().transpose();
  }
  return rows;
}

Mat Linearization::unstable_basis(double slow_factor) const {
  const double slowest = slowest_unstable_rate();
  std::vector<int> keep;
  for (int j = 0; j < mu.size(); ++j) {
    if (mu[j] < 0 && -mu[j] <= slow_factor * slowest) keep.push_back(j);
  }
  Mat basis(mu.size(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    basis.col(static_cast<Eigen::Index>(c)) = (q.col(keep[c]).array() / g_sqrt.array()).matrix();
  }
  return basis;
}

double Linearization::slowest_unstable_rate() const {
  double r = std::numeric_limits<double>::infinity();
  for (int j = 0; j < mu.size(); ++j) {
    if (mu[j] < 0) r = std::min(r, -mu[j]);
  }
  return r;
}

double Linearization::slowest_stable_rate() const {
  double r = std::numeric_limits<double>::infinity();
  for (int j = 0; j < mu.size(); ++j) {
    if (mu[j] > 0) r = std::min(r, mu[j]);
  }
  return r;
}

namespace {

Vec project_to_surface(const SpectralModel& model, const Potential& pot, const Vec& z) {
  const int n = model.real_dim();
  const double norm = z.head(n).norm();
  if (norm < 1e-8) return z;
  Vec out = z;
  try {
    out.head(n) = radial_root(pot, model, z.head(n) / norm) * z.head(n) / norm;
  } catch (const Error&) {
  }
  return out;
}

}  // namespace

std::vector<OrbitRecord> find_connecting_orbits(const SpectralModel& model, const Potential& pot,
                                                const CriticalRecord& source, const CriticalRecord& target,
                                                const OrbitSearch& search) {
  if (source.rel_index - target.rel_index != 1) {
    throw Error(ErrorCode::IndexGapInvalid, "index gap from " + source.id + " to " + target.id + " is " +
                                                std::to_string(source.rel_index - target.rel_index) + ", not 1");
  }
  const int dim = model.real_dim() + 1;
  const Vec zs = source.point.packed();
  const Vec zt = target.point.packed();
  const Linearization ls = linearize(model, pot, zs);
  const Linearization lt = linearize(model, pot, zt);
  const double rate = std::min(ls.slowest_unstable_rate(), lt.slowest_stable_rate());
  if (!std::isfinite(rate) || rate <= 0) {
    throw Error(ErrorCode::IndexGapInvalid, "endpoints lack unstable/stable directions");
  }

  BvpProblem problem;
  problem.dim = dim;
  problem.grid = StretchedGrid{search.m, std::log(1.0 / search.decay) / rate + search.horizon_extension, 0.0,
                               search.beta};
  problem.field = [&](double, const Vec& z) { return flow_packed(model, pot, z); };
  problem.jacobian = [&](double, const Vec& z) { return flow_jacobian(model, pot, z); };
  problem.source = {zs, ls.unstable_rows()};
  problem.target = {zt, lt.stable_rows()};
  const double mid_action = 0.5 * (source.action + target.action);
  problem.anchor = AnchorCondition{
      0.0, mid_action, [&](const Vec& z) { return action_value(model, pot, StatePoint::unpack(z)); },
      [&](const Vec& z) { return euclid_gradient(model, pot, z); }};

  // Orbits generically leave the source tangent to its slowest unstable
  // directions, so initial paths bend that way; starts come in +/- pairs.
  const Mat basis = ls.unstable_basis(1.5);
  const Vec s_nodes = problem.grid.s_nodes();
  const double kappa = rate;
  const double spread = std::max(0.5 * (zs - zt).head(dim - 1).norm(), 0.1);

  std::vector<std::optional<BvpSolution>> results(search.n_starts);
  parallel_for(static_cast<std::size_t>(search.n_starts), [&](std::size_t i) {
    Rng rng = make_rng(search.seed, i / 2);
    Vec v = basis * random_gaussian(rng, static_cast<int>(basis.cols()));
    if (v.norm() > 0) v /= v.norm();
    if (i % 2 == 1) v = -v;
    // a fixed bend keeps Newton in its fast regime; directions supply the variety
    const Vec p1 = 0.5 * (zs + zt) + spread * v;
    Mat init(search.m, dim);
    for (int j = 0; j < search.m; ++j) {
      const double t = problem.grid.time(s_nodes[j]);
      const double sigma = 1.0 / (1.0 + std::exp(-kappa * t));
      Vec z = (1 - sigma) * (1 - sigma) * zs + 2 * sigma * (1 - sigma) * p1 + sigma * sigma * zt;
      z[dim - 1] = (1 - sigma) * zs[dim - 1] + sigma * zt[dim - 1];
      init.row(j) = project_to_surface(model, pot, z).transpose();
    }
    init.row(0) = zs.transpose();
    init.row(search.m - 1) = zt.transpose();
    BvpSolution sol = solve_bvp_refined(problem, init, search.newton, search.tol, search.refine_levels);
    if (sol.converged) results[i] = std::move(sol);
  });

  std::vector<OrbitRecord> orbits;
  std::vector<Mat> accepted;
  for (const auto& r : results) {
    if (!r || !(r->defect <= search.tol)) continue;
    const Mat& nodes = r->nodes;
    const int m = r->grid.m;
    std::vector<double> actions(m);
    for (int j = 0; j < m; ++j) actions[j] = action_value(model, pot, StatePoint::unpack(nodes.row(j).transpose()));
    bool monotone = true;
    for (int j = 1; j < m; ++j) monotone = monotone && actions[j] <= actions[j - 1] + 1e-9;
    const double end_err =
        std::max((nodes.row(0).transpose() - zs).norm(), (nodes.row(m - 1).transpose() - zt).norm());
    if (!monotone || end_err > std::max(search.tol, 1e3 * search.decay)) continue;
    // compare on the base grid so refined and unrefined solutions line up
    Mat probe(search.m, dim);
    for (int j = 0; j < search.m; ++j) {
      probe.row(j) = interpolate_nodes(r->grid, nodes, problem.grid.time(s_nodes[j])).transpose();
    }
    bool duplicate = false;
    for (const Mat& a : accepted) {
      if ((a - probe).cwiseAbs().maxCoeff() <= search.dedup) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    accepted.push_back(probe);
    OrbitRecord orbit;
    orbit.source_id = source.id;
    orbit.target_id = target.id;
    orbit.grid = r->grid;
    const Vec sr = r->grid.s_nodes();
    for (int j = 0; j < m; ++j) {
      orbit.times.push_back(r->grid.time(sr[j]));
      orbit.nodes.push_back(StatePoint::unpack(nodes.row(j).transpose()));
    }
    orbit.residual = r->defect;
    orbit.action_profile = actions;
    orbit.phase_anchor = mid_action;
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

CountTable count_mod2(const OrbitTable& orbits) {
  CountTable out;
  for (const auto& [key, list] : orbits) out[key] = static_cast<int>(list.size() % 2);
  return out;
}

SampledPath sample_orbit(const OrbitRecord& orbit, int count) {
  SampledPath path;
  if (orbit.grid.m == 0) {
    // piecewise records: subsample the stored nodes
    const int n = static_cast<int>(orbit.nodes.size());
    for (int i = 0; i < count && n > 0; ++i) {
      const int j = count == 1 ? 0 : static_cast<int>(std::lround(static_cast<double>(i) * (n - 1) / (count - 1)));
      path.times.push_back(orbit.times[j]);
      path.points.push_back(orbit.nodes[j]);
    }
    return path;
  }
  const Mat nodes = orbit.node_matrix();
  for (int i = 0; i < count; ++i) {
    const double s = count == 1 ? 0.0 : -1.0 + 2.0 * i / (count - 1);
    const double t = orbit.grid.time(s);
    path.times.push_back(t);
    path.points.push_back(StatePoint::unpack(interpolate_nodes(orbit.grid, nodes, t)));
  }
  return path;
}

SampledPath as_path(const Trajectory& trajectory) { return {trajectory.times, trajectory.points}; }

double ps_constant(double window_lo, double window_hi, double starshape_constant) {
  return 1.1 * 2.0 * std::max(std::abs(window_lo), std::abs(window_hi)) / starshape_constant;
}

PsDiagnostic ps_monitor(const SpectralModel& model, const Potential& pot, const SampledPath& path, double window_lo,
                        double window_hi, double epsilon, double c_constant) {
  PsDiagnostic diag;
  diag.epsilon = epsilon;
  const double width = window_hi - window_lo;
  diag.tau_bound = width / (epsilon * epsilon);
  diag.lambda_bound = c_constant + width / epsilon;
  diag.u_bound = diag.lambda_bound;
  const std::size_t n = path.points.size();
  std::vector<double> grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    grad[i] = gradient_h_norm(model, pot, path.points[i].packed());
    diag.max_lambda = std::max(diag.max_lambda, std::abs(path.points[i].multiplier));
    diag.max_u = std::max(diag.max_u, std::sqrt(h_norm2(model, path.points[i].coeffs)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double tau = path.times.back() - path.times[i];
    for (std::size_t j = i; j < n; ++j) {
      if (grad[j] <= epsilon) {
        tau = path.times[j] - path.times[i];
        break;
      }
    }
    diag.tau_values.push_back(tau);
    if (tau > diag.tau_bound) diag.bound_violated = true;
  }
  if (diag.max_lambda > diag.lambda_bound || diag.max_u > diag.u_bound) diag.bound_violated = true;
  return diag;
}

}  // namespace rfh
