#pragma once

#include "rfh/collocation.hpp"
#include "rfh/critical.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rfh {

struct Trajectory {
  std::vector<double> times;
  std::vector<StatePoint> points;
  std::vector<double> actions;
  /// H-norm of the gradient at each point.
  std::vector<double> grad_norms;
  bool converged = false;
  std::optional<std::string> landed_on;
};

struct FlowOptions {
  double t_max = 10.0;
  double tol = 1e-10;
  /// Absolute error floor; negative means `tol`. A tiny floor gives relative
  /// accuracy on exponentially small coefficients.
  double abs_tol = -1.0;
  /// Extra output times served by dense interpolation.
  std::vector<double> sample_times;
  /// Stop once ||grad I||_H drops to this value.
  double stop_gradient = 1e-10;
  double blowup_norm = 1e6;
};

/// Adaptive Dormand-Prince integration of the descending flow. When `records`
/// is given, reports the record reached (within 1e-6 after symmetry alignment).
Trajectory integrate_flow(const SpectralModel& model, const Potential& pot, const StatePoint& z0,
                          const FlowOptions& options, const std::vector<CriticalRecord>* records = nullptr);

/// A connecting orbit on a stretched Chebyshev grid.
struct OrbitRecord {
  std::string source_id;
  std::string target_id;
  /// m == 0 marks a piecewise (continuation) orbit; use `times` and `nodes` directly.
  StretchedGrid grid;
  std::vector<double> times;
  std::vector<StatePoint> nodes;
  double residual = 0.0;
  std::vector<double> action_profile;
  double phase_anchor = 0.0;

  Mat node_matrix() const;
};

struct OrbitSearch {
  int n_starts = 8;
  std::uint64_t seed = 0;
  /// Accepted collocation defect.
  double tol = 1e-6;
  int m = 64;
  double beta = 4.0;
  /// Added to the horizon chosen from the endpoint decay rates.
  double horizon_extension = 0.0;
  /// Decay target that fixes the horizon: exp(-rate T) = decay.
  double decay = 1e-8;
  double dedup = 1e-4;
  /// Grid refinements (x1.5 nodes each) tried when the defect exceeds tol.
  int refine_levels = 2;
  BvpOptions newton;
};

/// Linearization data at a critical point: eigenpairs of G^{-1/2} A G^{-1/2}.
struct Linearization {
  Vec mu;
  Mat q;
  Vec g_sqrt;
  /// Rows imposing z - z* in the span of directions with mu < 0 (unstable).
  Mat unstable_rows() const;
  /// Rows imposing z - z* in the span of directions with mu > 0 (stable).
  Mat stable_rows() const;
  /// Columns spanning the unstable directions whose rate is at most
  /// slow_factor times the slowest one, in packed coordinates.
  Mat unstable_basis(double slow_factor = std::numeric_limits<double>::infinity()) const;
  double slowest_unstable_rate() const;
  double slowest_stable_rate() const;
};

Linearization linearize(const SpectralModel& model, const Potential& pot, const Vec& z);

/// Orbits from source to target of the descending flow, modulo time shift.
std::vector<OrbitRecord> find_connecting_orbits(const SpectralModel& model, const Potential& pot,
                                                const CriticalRecord& source, const CriticalRecord& target,
                                                const OrbitSearch& search);

/// Key (source id, target id) -> distinct orbits.
using OrbitTable = std::map<std::pair<std::string, std::string>, std::vector<OrbitRecord>>;
using CountTable = std::map<std::pair<std::string, std::string>, int>;

/// Parity of the number of orbits per pair.
CountTable count_mod2(const OrbitTable& orbits);

struct PsDiagnostic {
  double epsilon = 0.0;
  std::vector<double> tau_values;
  double lambda_bound = 0.0;
  double u_bound = 0.0;
  double tau_bound = 0.0;
  double max_lambda = 0.0;
  double max_u = 0.0;
  bool bound_violated = false;
};

/// Sampled path (times ascending) with its points.
struct SampledPath {
  std::vector<double> times;
  std::vector<StatePoint> points;
};

SampledPath sample_orbit(const OrbitRecord& orbit, int count);
SampledPath as_path(const Trajectory& trajectory);

/// A-priori constant C = 1.1 * 2 max(|a|, |b|) / a_star, a_star the starshape constant.
double ps_constant(double window_lo, double window_hi, double starshape_constant);

/// tau(s) = first t >= 0 with ||grad I(z(s + t))||_H <= epsilon; checks
/// tau <= (b - a) / eps^2 and |lambda|, ||u||_H <= C + (b - a) / eps.
PsDiagnostic ps_monitor(const SpectralModel& model, const Potential& pot, const SampledPath& path,
                        double window_lo, double window_hi, double epsilon, double c_constant);

}  // namespace rfh
