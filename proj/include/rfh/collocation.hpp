#pragma once

#include "rfh/spectrum.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace rfh {

/// Chebyshev-Lobatto grid on s in [-1, 1], stretched to times
/// t = center + half_width * sinh(beta s) / sinh(beta) so nodes cluster near the center.
struct StretchedGrid {
  int m = 64;
  double half_width = 1.0;
  double center = 0.0;
  double beta = 4.0;

  Vec s_nodes() const;
  double time(double s) const;
  double dtime(double s) const;
  /// Inverse of time(), used to place the anchor.
  double s_of_time(double t) const;
};

/// Barycentric weights of the Chebyshev-Lobatto nodes.
Vec lobatto_weights(int m);
/// Differentiation matrix in s on the Lobatto nodes.
Mat differentiation_matrix(const Vec& s, const Vec& w);
/// Row vector of Lagrange basis values at x (and optionally their derivatives).
Vec lagrange_row(const Vec& s, const Vec& w, double x, Vec* derivative = nullptr);

/// Affine boundary condition rows * (z - point) = 0.
struct EndCondition {
  Vec point;
  Mat rows;
};

/// Scalar phase condition value(z(anchor_time)) = target.
struct AnchorCondition {
  double time = 0.0;
  double target = 0.0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

/// Two-point boundary value problem for z' = field(t, z).
struct BvpProblem {
  int dim = 0;
  StretchedGrid grid;
  std::function<Vec(double, const Vec&)> field;
  std::function<Mat(double, const Vec&)> jacobian;
  EndCondition source;
  EndCondition target;
  std::optional<AnchorCondition> anchor;
};

struct BvpOptions {
  int max_iterations = 40;
  double newton_tol = 1e-10;
  /// Off-node checkpoints per node for the defect estimate.
  int defect_oversampling = 4;
};

struct BvpSolution {
  bool converged = false;
  int iterations = 0;
  /// m x dim, row j is z(t_j).
  Mat nodes;
  /// Max-norm defect |dz/dt - f(t, z)| of the collocation polynomial, evaluated
  /// away from the nodes.
  double defect = 0.0;
  double newton_residual = 0.0;
  /// Grid the nodes live on (may be finer than the problem's after refinement).
  StretchedGrid grid;
};

/// Collocation Newton. The ODE is imposed at nodes 1..m-1; node 0 carries the
/// source condition. Throws InvalidArgument if the system is not square.
BvpSolution solve_bvp(const BvpProblem& problem, Mat initial_nodes, const BvpOptions& options = {});

/// solve_bvp, then while the defect exceeds defect_tol re-solves on grids with
/// 1.5x as many nodes (at most `levels` times), starting from the interpolant.
BvpSolution solve_bvp_refined(BvpProblem problem, Mat initial_nodes, const BvpOptions& options, double defect_tol,
                              int levels);

/// Off-node defect of a node array for the given problem.
double collocation_defect(const BvpProblem& problem, const Mat& nodes, int oversampling = 4);

/// Evaluates the collocation polynomial at time t.
Vec interpolate_nodes(const StretchedGrid& grid, const Mat& nodes, double t);

/// Three Lobatto segments covering (-inf, t0], [t0, t1], [t1, inf), for
/// fields that are only finitely smooth at t0 and t1. The tails are truncated
/// at distance tail_length and sinh-stretched away from the breakpoints.
struct SegmentedGrid {
  int m_tail = 48;
  int m_mid = 24;
  double t0 = 0.0;
  double t1 = 1.0;
  double tail_length = 20.0;
  double beta = 4.0;

  int m(int segment) const { return segment == 1 ? m_mid : m_tail; }
  /// Row of the first node of the segment in the stacked node array.
  int offset(int segment) const;
  int total() const { return 2 * m_tail + m_mid; }
  double time(int segment, double s) const;
  double dtime(int segment, double s) const;
  /// Segment and local coordinate of time t (clamped to the truncated range).
  std::pair<int, double> locate(double t) const;
  SegmentedGrid refined() const;
};

/// z' = field(t, z) on a SegmentedGrid, continuous across the breakpoints.
struct SegmentedBvp {
  int dim = 0;
  SegmentedGrid grid;
  std::function<Vec(double, const Vec&)> field;
  std::function<Mat(double, const Vec&)> jacobian;
  EndCondition source;
  EndCondition target;
};

struct SegmentedSolution {
  bool converged = false;
  int iterations = 0;
  /// grid.total() x dim; segments stacked in time order, breakpoint nodes repeated.
  Mat nodes;
  double defect = 0.0;
  double newton_residual = 0.0;
  SegmentedGrid grid;
};

/// Node times of a SegmentedGrid in stacked order.
std::vector<double> segmented_times(const SegmentedGrid& grid);
Vec interpolate_segmented(const SegmentedGrid& grid, const Mat& nodes, double t);
/// Max off-node defect |dz/dt - f| over all segments.
double segmented_defect(const SegmentedBvp& problem, const Mat& nodes, int oversampling = 4);
SegmentedSolution solve_segmented_bvp(const SegmentedBvp& problem, Mat initial_nodes, const BvpOptions& options = {});
/// As solve_bvp_refined, scaling every segment by 1.5 per level.
SegmentedSolution solve_segmented_bvp_refined(SegmentedBvp problem, Mat initial_nodes, const BvpOptions& options,
                                              double defect_tol, int levels);

}  // namespace rfh
