#include "rfh/collocation.hpp"

#include "rfh/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace rfh {

Vec StretchedGrid::s_nodes() const {
  Vec s(m);
  for (int j = 0; j < m; ++j) s[j] = -std::cos(std::numbers::pi * j / (m - 1));
  s[0] = -1.0;
  s[m - 1] = 1.0;
  return s;
}

double StretchedGrid::time(double s) const { return center + half_width * std::sinh(beta * s) / std::sinh(beta); }

double StretchedGrid::dtime(double s) const {
  return half_width * beta * std::cosh(beta * s) / std::sinh(beta);
}

double StretchedGrid::s_of_time(double t) const {
  return std::asinh((t - center) / half_width * std::sinh(beta)) / beta;
}

Vec lobatto_weights(int m) {
  Vec w(m);
  for (int j = 0; j < m; ++j) w[j] = (j % 2 == 0 ? 1.0 : -1.0);
  w[0] *= 0.5;
  w[m - 1] *= 0.5;
  return w;
}

Mat differentiation_matrix(const Vec& s, const Vec& w) {
  const int m = static_cast<int>(s.size());
  Mat d = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      d(i, j) = (w[j] / w[i]) / (s[i] - s[j]);
      row += d(i, j);
    }
    d(i, i) = -row;
  }
  return d;
}

Vec lagrange_row(const Vec& s, const Vec& w, double x, Vec* derivative) {
  const int m = static_cast<int>(s.size());
  Vec l = Vec::Zero(m);
  for (int j = 0; j < m; ++j) {
    if (x == s[j]) {
      l[j] = 1.0;
      if (derivative) {
        const Mat d = differentiation_matrix(s, w);
        *derivative = d.row(j).transpose();
      }
      return l;
    }
  }
  Vec a(m);
  for (int j = 0; j < m; ++j) a[j] = w[j] / (x - s[j]);
  const double den = a.sum();
  l = a / den;
  if (derivative) {
    // l_j = a_j / sum a, a_j' = -a_j / (x - s_j)
    Vec da(m);
    for (int j = 0; j < m; ++j) da[j] = -a[j] / (x - s[j]);
    const double dden = da.sum();
    *derivative = (da * den - a * dden) / (den * den);
  }
  return l;
}

namespace {

Vec residual_vector(const BvpProblem& p, const Mat& d, const Vec& s, const Vec& w, const Mat& nodes,
                    int rows_total) {
  const int m = p.grid.m;
  const int dim = p.dim;
  Vec r(rows_total);
  const Mat dz = d * nodes;
  int row = 0;
  for (int i = 1; i < m; ++i) {
    const double t = p.grid.time(s[i]);
    r.segment(row, dim) = dz.row(i).transpose() - p.grid.dtime(s[i]) * p.field(t, nodes.row(i).transpose());
    row += dim;
  }
  const int ns = static_cast<int>(p.source.rows.rows());
  r.segment(row, ns) = p.source.rows * (nodes.row(0).transpose() - p.source.point);
  row += ns;
  const int nt = static_cast<int>(p.target.rows.rows());
  r.segment(row, nt) = p.target.rows * (nodes.row(m - 1).transpose() - p.target.point);
  row += nt;
  if (p.anchor) {
    const Vec l = lagrange_row(s, w, p.grid.s_of_time(p.anchor->time));
    const Vec z = nodes.transpose() * l;
    r[row++] = p.anchor->value(z) - p.anchor->target;
  }
  return r;
}

Mat jacobian_matrix(const BvpProblem& p, const Mat& d, const Vec& s, const Vec& w, const Mat& nodes,
                    int rows_total) {
  const int m = p.grid.m;
  const int dim = p.dim;
  Mat j = Mat::Zero(rows_total, m * dim);
  int row = 0;
  for (int i = 1; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      j.block(row, k * dim, dim, dim).diagonal().setConstant(d(i, k));
    }
    const double t = p.grid.time(s[i]);
    j.block(row, i * dim, dim, dim) -= p.grid.dtime(s[i]) * p.jacobian(t, nodes.row(i).transpose());
    row += dim;
  }
  const int ns = static_cast<int>(p.source.rows.rows());
  j.block(row, 0, ns, dim) = p.source.rows;
  row += ns;
  const int nt = static_cast<int>(p.target.rows.rows());
  j.block(row, (m - 1) * dim, nt, dim) = p.target.rows;
  row += nt;
  if (p.anchor) {
    const Vec l = lagrange_row(s, w, p.grid.s_of_time(p.anchor->time));
    const Vec z = nodes.transpose() * l;
    const Vec g = p.anchor->gradient(z);
    for (int k = 0; k < m; ++k) j.block(row, k * dim, 1, dim) = l[k] * g.transpose();
    ++row;
  }
  return j;
}

Mat unflatten(const Vec& x, int m, int dim) {
  Mat nodes(m, dim);
  for (int k = 0; k < m; ++k) nodes.row(k) = x.segment(k * dim, dim).transpose();
  return nodes;
}

Vec flatten(const Mat& nodes) {
  const int m = static_cast<int>(nodes.rows());
  const int dim = static_cast<int>(nodes.cols());
  Vec x(m * dim);
  for (int k = 0; k < m; ++k) x.segment(k * dim, dim) = nodes.row(k).transpose();
  return x;
}

}  // namespace

double collocation_defect(const BvpProblem& p, const Mat& nodes, int oversampling) {
  const Vec s = p.grid.s_nodes();
  const Vec w = lobatto_weights(p.grid.m);
  const int checks = std::max(1, oversampling * p.grid.m);
  double worst = 0.0;
  for (int c = 0; c < checks; ++c) {
    const double x = -std::cos(std::numbers::pi * (c + 0.5) / checks);
    Vec dl;
    const Vec l = lagrange_row(s, w, x, &dl);
    const Vec z = nodes.transpose() * l;
    const Vec dz = nodes.transpose() * dl;
    // dz/dt - f(t, z), with dz/dt = (dz/ds) / (dt/ds)
    const Vec defect = dz / p.grid.dtime(x) - p.field(p.grid.time(x), z);
    worst = std::max(worst, defect.cwiseAbs().maxCoeff());
  }
  return worst;
}

Vec interpolate_nodes(const StretchedGrid& grid, const Mat& nodes, double t) {
  const Vec s = grid.s_nodes();
  const Vec w = lobatto_weights(grid.m);
  const double x = std::clamp(grid.s_of_time(t), -1.0, 1.0);
  return nodes.transpose() * lagrange_row(s, w, x);
}

BvpSolution solve_bvp(const BvpProblem& p, Mat nodes, const BvpOptions& options) {
  const int m = p.grid.m;
  const int dim = p.dim;
  const int rows_total = (m - 1) * dim + static_cast<int>(p.source.rows.rows()) +
                         static_cast<int>(p.target.rows.rows()) + (p.anchor ? 1 : 0);
  if (rows_total != m * dim) {
    throw Error(ErrorCode::InvalidArgument, "boundary value problem is not square: " + std::to_string(rows_total) +
                                                " equations, " + std::to_string(m * dim) + " unknowns");
  }
  if (nodes.rows() != m || nodes.cols() != dim) throw Error(ErrorCode::DimensionMismatch, "initial node array");

  const Vec s = p.grid.s_nodes();
  const Vec w = lobatto_weights(m);
  const Mat d = differentiation_matrix(s, w);

  BvpSolution sol;
  Vec r = residual_vector(p, d, s, w, nodes, rows_total);
  double rnorm = r.norm();
  for (int it = 0; it < options.max_iterations; ++it) {
    sol.iterations = it;
    if (!std::isfinite(rnorm)) break;
    if (r.cwiseAbs().maxCoeff() <= options.newton_tol) {
      sol.converged = true;
      break;
    }
    const Mat jac = jacobian_matrix(p, d, s, w, nodes, rows_total);
    const Vec delta = jac.partialPivLu().solve(-r);
    if (!delta.allFinite()) break;
    const Vec x = flatten(nodes);
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 20; ++halving) {
      const Mat trial = unflatten(x + step * delta, m, dim);
      const Vec rt = residual_vector(p, d, s, w, trial, rows_total);
      const double tn = rt.norm();
      if (std::isfinite(tn) && tn < (1.0 - 1e-4 * step) * rnorm) {
        nodes = trial;
        r = rt;
        rnorm = tn;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (!sol.converged && r.allFinite() && r.cwiseAbs().maxCoeff() <= options.newton_tol) sol.converged = true;
  sol.nodes = nodes;
  sol.grid = p.grid;
  sol.newton_residual = r.allFinite() ? r.cwiseAbs().maxCoeff() : INFINITY;
  sol.defect = sol.converged ? collocation_defect(p, nodes, options.defect_oversampling) : INFINITY;
  return sol;
}

BvpSolution solve_bvp_refined(BvpProblem problem, Mat initial_nodes, const BvpOptions& options, double defect_tol,
                              int levels) {
  BvpSolution sol = solve_bvp(problem, std::move(initial_nodes), options);
  for (int level = 0; level < levels && sol.converged && sol.defect > defect_tol; ++level) {
    const StretchedGrid coarse = problem.grid;
    problem.grid.m = (3 * coarse.m) / 2;
    const Vec s = problem.grid.s_nodes();
    Mat init(problem.grid.m, problem.dim);
    for (int j = 0; j < problem.grid.m; ++j) {
      init.row(j) = interpolate_nodes(coarse, sol.nodes, problem.grid.time(s[j])).transpose();
    }
    sol = solve_bvp(problem, init, options);
  }
  return sol;
}

int SegmentedGrid::offset(int segment) const {
  if (segment == 0) return 0;
  if (segment == 1) return m_tail;
  return m_tail + m_mid;
}

// Tails: t = t0 - L sinh(beta (1 - s) / 2) / sinh(beta / 2) and the mirror
// image past t1, so nodes cluster at the breakpoints.
double SegmentedGrid::time(int segment, double s) const {
  const double sh = std::sinh(0.5 * beta);
  switch (segment) {
    case 0: return t0 - tail_length * std::sinh(0.5 * beta * (1 - s)) / sh;
    case 1: return 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * s;
    default: return t1 + tail_length * std::sinh(0.5 * beta * (1 + s)) / sh;
  }
}

double SegmentedGrid::dtime(int segment, double s) const {
  const double sh = std::sinh(0.5 * beta);
  switch (segment) {
    case 0: return tail_length * 0.5 * beta * std::cosh(0.5 * beta * (1 - s)) / sh;
    case 1: return 0.5 * (t1 - t0);
    default: return tail_length * 0.5 * beta * std::cosh(0.5 * beta * (1 + s)) / sh;
  }
}

std::pair<int, double> SegmentedGrid::locate(double t) const {
  const double sh = std::sinh(0.5 * beta);
  if (t <= t0) {
    const double x = std::min((t0 - t) / tail_length, 1.0) * sh;
    return {0, 1 - 2 * std::asinh(x) / beta};
  }
  if (t <= t1) return {1, (2 * t - t0 - t1) / (t1 - t0)};
  const double x = std::min((t - t1) / tail_length, 1.0) * sh;
  return {2, 2 * std::asinh(x) / beta - 1};
}

SegmentedGrid SegmentedGrid::refined() const {
  SegmentedGrid g = *this;
  g.m_tail = (3 * m_tail) / 2;
  g.m_mid = (3 * m_mid) / 2;
  return g;
}

std::vector<double> segmented_times(const SegmentedGrid& grid) {
  std::vector<double> out;
  for (int seg = 0; seg < 3; ++seg) {
    StretchedGrid lobatto;
    lobatto.m = grid.m(seg);
    for (double s : lobatto.s_nodes()) out.push_back(grid.time(seg, s));
  }
  return out;
}

namespace {

struct SegmentTables {
  Vec s;
  Vec w;
  Mat d;
};

std::array<SegmentTables, 3> segment_tables(const SegmentedGrid& grid) {
  std::array<SegmentTables, 3> out;
  for (int seg = 0; seg < 3; ++seg) {
    StretchedGrid lobatto;
    lobatto.m = grid.m(seg);
    out[seg].s = lobatto.s_nodes();
    out[seg].w = lobatto_weights(lobatto.m);
    out[seg].d = differentiation_matrix(out[seg].s, out[seg].w);
  }
  return out;
}

// Row layout: ODE rows of every segment (nodes 1..m-1), continuity at the two
// breakpoints, then source and target rows.
Vec segmented_residual(const SegmentedBvp& p, const std::array<SegmentTables, 3>& tab, const Mat& nodes,
                       int rows_total) {
  const int dim = p.dim;
  Vec r(rows_total);
  int row = 0;
  for (int seg = 0; seg < 3; ++seg) {
    const int m = p.grid.m(seg);
    const int off = p.grid.offset(seg);
    const Mat z = nodes.middleRows(off, m);
    const Mat dz = tab[seg].d * z;
    for (int i = 1; i < m; ++i) {
      const double s = tab[seg].s[i];
      r.segment(row, dim) =
          dz.row(i).transpose() - p.grid.dtime(seg, s) * p.field(p.grid.time(seg, s), z.row(i).transpose());
      row += dim;
    }
  }
  for (int seg = 1; seg < 3; ++seg) {
    const int off = p.grid.offset(seg);
    r.segment(row, dim) = (nodes.row(off) - nodes.row(off - 1)).transpose();
    row += dim;
  }
  const int ns = static_cast<int>(p.source.rows.rows());
  r.segment(row, ns) = p.source.rows * (nodes.row(0).transpose() - p.source.point);
  row += ns;
  const int nt = static_cast<int>(p.target.rows.rows());
  r.segment(row, nt) = p.target.rows * (nodes.row(p.grid.total() - 1).transpose() - p.target.point);
  return r;
}

Mat segmented_jacobian(const SegmentedBvp& p, const std::array<SegmentTables, 3>& tab, const Mat& nodes,
                       int rows_total) {
  const int dim = p.dim;
  Mat j = Mat::Zero(rows_total, p.grid.total() * dim);
  int row = 0;
  for (int seg = 0; seg < 3; ++seg) {
    const int m = p.grid.m(seg);
    const int off = p.grid.offset(seg);
    for (int i = 1; i < m; ++i) {
      for (int k = 0; k < m; ++k) j.block(row, (off + k) * dim, dim, dim).diagonal().setConstant(tab[seg].d(i, k));
      const double s = tab[seg].s[i];
      j.block(row, (off + i) * dim, dim, dim) -=
          p.grid.dtime(seg, s) * p.jacobian(p.grid.time(seg, s), nodes.row(off + i).transpose());
      row += dim;
    }
  }
  for (int seg = 1; seg < 3; ++seg) {
    const int off = p.grid.offset(seg);
    j.block(row, off * dim, dim, dim).diagonal().setOnes();
    j.block(row, (off - 1) * dim, dim, dim).diagonal().setConstant(-1.0);
    row += dim;
  }
  const int ns = static_cast<int>(p.source.rows.rows());
  j.block(row, 0, ns, dim) = p.source.rows;
  row += ns;
  const int nt = static_cast<int>(p.target.rows.rows());
  j.block(row, (p.grid.total() - 1) * dim, nt, dim) = p.target.rows;
  return j;
}

}  // namespace

Vec interpolate_segmented(const SegmentedGrid& grid, const Mat& nodes, double t) {
  const auto [seg, x] = grid.locate(t);
  StretchedGrid lobatto;
  lobatto.m = grid.m(seg);
  const Vec s = lobatto.s_nodes();
  const Vec w = lobatto_weights(lobatto.m);
  return nodes.middleRows(grid.offset(seg), lobatto.m).transpose() * lagrange_row(s, w, std::clamp(x, -1.0, 1.0));
}

double segmented_defect(const SegmentedBvp& p, const Mat& nodes, int oversampling) {
  const auto tab = segment_tables(p.grid);
  double worst = 0.0;
  for (int seg = 0; seg < 3; ++seg) {
    const int m = p.grid.m(seg);
    const Mat z = nodes.middleRows(p.grid.offset(seg), m);
    const int checks = std::max(1, oversampling * m);
    for (int c = 0; c < checks; ++c) {
      const double x = -std::cos(std::numbers::pi * (c + 0.5) / checks);
      Vec dl;
      const Vec l = lagrange_row(tab[seg].s, tab[seg].w, x, &dl);
      const Vec defect = (z.transpose() * dl) / p.grid.dtime(seg, x) - p.field(p.grid.time(seg, x), z.transpose() * l);
      worst = std::max(worst, defect.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

SegmentedSolution solve_segmented_bvp(const SegmentedBvp& p, Mat nodes, const BvpOptions& options) {
  const int dim = p.dim;
  const int total = p.grid.total();
  const int rows_total = (total - 3) * dim + 2 * dim + static_cast<int>(p.source.rows.rows()) +
                         static_cast<int>(p.target.rows.rows());
  if (rows_total != total * dim) {
    throw Error(ErrorCode::InvalidArgument, "segmented boundary value problem is not square: " +
                                                std::to_string(rows_total) + " equations, " +
                                                std::to_string(total * dim) + " unknowns");
  }
  if (nodes.rows() != total || nodes.cols() != dim) throw Error(ErrorCode::DimensionMismatch, "initial node array");
  const auto tab = segment_tables(p.grid);

  SegmentedSolution sol;
  Vec r = segmented_residual(p, tab, nodes, rows_total);
  double rnorm = r.norm();
  for (int it = 0; it < options.max_iterations; ++it) {
    sol.iterations = it;
    if (!std::isfinite(rnorm)) break;
    if (r.cwiseAbs().maxCoeff() <= options.newton_tol) {
      sol.converged = true;
      break;
    }
    const Mat jac = segmented_jacobian(p, tab, nodes, rows_total);
    const Vec delta = jac.partialPivLu().solve(-r);
    if (!delta.allFinite()) break;
    const Vec x = flatten(nodes);
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 20; ++halving) {
      const Mat trial = unflatten(x + step * delta, total, dim);
      const Vec rt = segmented_residual(p, tab, trial, rows_total);
      const double tn = rt.norm();
      if (std::isfinite(tn) && tn < (1.0 - 1e-4 * step) * rnorm) {
        nodes = trial;
        r = rt;
        rnorm = tn;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (!sol.converged && r.allFinite() && r.cwiseAbs().maxCoeff() <= options.newton_tol) sol.converged = true;
  sol.nodes = nodes;
  sol.grid = p.grid;
  sol.newton_residual = r.allFinite() ? r.cwiseAbs().maxCoeff() : INFINITY;
  sol.defect = sol.converged ? segmented_defect(p, nodes, options.defect_oversampling) : INFINITY;
  return sol;
}

SegmentedSolution solve_segmented_bvp_refined(SegmentedBvp problem, Mat initial_nodes, const BvpOptions& options,
                                              double defect_tol, int levels) {
  SegmentedSolution sol = solve_segmented_bvp(problem, std::move(initial_nodes), options);
  for (int level = 0; level < levels && sol.converged && sol.defect > defect_tol; ++level) {
    const SegmentedGrid coarse = problem.grid;
    problem.grid = coarse.refined();
    const std::vector<double> times = segmented_times(problem.grid);
    Mat init(problem.grid.total(), problem.dim);
    for (int j = 0; j < problem.grid.total(); ++j) {
      init.row(j) = interpolate_segmented(coarse, sol.nodes, times[j]).transpose();
    }
    sol = solve_segmented_bvp(problem, init, options);
  }
  return sol;
}

}  // namespace rfh
