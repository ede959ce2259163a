#pragma once

#include "rfh/functional.hpp"
#include "rfh/inertia.hpp"
#include "rfh/potentials.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rfh {

enum class OrbitType { isolated, circle, pair };

std::string to_string(OrbitType t);
OrbitType orbit_type_from_string(const std::string& name);

/// A located critical point, or the canonical representative of a critical circle.
struct CriticalRecord {
  std::string id;
  StatePoint point;
  double action = 0.0;
  double residual = 0.0;
  Inertia inertia;
  int rel_index = 0;
  OrbitType orbit_type = OrbitType::isolated;
  std::string orbit_id;
  /// (min child, max child) after symmetry breaking.
  std::optional<std::pair<std::string, std::string>> broken_children;
};

struct CriticalSearch {
  double window_lo = -1.0;
  double window_hi = 1.0;
  int n_starts = 200;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  int max_iterations = 60;
  /// Deduplication radius in the E-norm on (coeffs, multiplier).
  double dedup_radius = 1e-6;
};

/// Index into model.labels of the label carrying the largest share of |u|^2.
int dominant_label_index(const SpectralModel& model, const Vec& coeffs);

/// E-distance between z1 and the closest element of the symmetry orbit of z2.
double orbit_distance(const SpectralModel& model, Symmetry sym, const Vec& z1, const Vec& z2);

/// Residual of the critical-point equations: ||L u - lambda grad F||_E + |F(u)|.
double critical_residual(const SpectralModel& model, const Potential& pot, const StatePoint& z);

/// Undeflated damped Newton from z0; returns the converged point or nullopt.
std::optional<Vec> newton_polish(const SpectralModel& model, const Potential& pot, const Vec& z0, double tol,
                                 int max_iterations = 60);

/// Builds a full record (action, residual, inertia, orbit type, index) at z.
CriticalRecord classify_point(const SpectralModel& model, const Potential& pot, const Vec& z);

/// Deflated multistart Newton. Records are sorted by (rel_index, action) and
/// given ids "z0", "z1", ...; z2 potentials return both members of each pair.
std::vector<CriticalRecord> find_critical_points(const SpectralModel& model, const Potential& pot,
                                                 const CriticalSearch& search);

struct MorseOutcome {
  Potential potential;
  std::vector<CriticalRecord> records;
  double strength = 0.0;
};

/// True when every record has only its mandated zero modes.
bool is_morse(const std::vector<CriticalRecord>& records);

/// Escalates a symmetry-respecting generic perturbation (1e-8, 1e-6, 1e-4)
/// until the critical set is Morse.
MorseOutcome ensure_morse(const SpectralModel& model, const Potential& pot, std::vector<CriticalRecord> records,
                          const CriticalSearch& search);

struct BrokenCircles {
  Potential potential;
  /// The circles with broken_children filled in.
  std::vector<CriticalRecord> circles;
  /// Children (isolated records) in circle order: min then max.
  std::vector<CriticalRecord> children;
};

/// Breaks every circle with a localized Re(a_k) bump of the given strength
/// and locates its min and max children.
BrokenCircles break_all_circles(const SpectralModel& model, const Potential& pot,
                                std::vector<CriticalRecord> circles, double strength, double tol = 1e-10);

}  // namespace rfh
