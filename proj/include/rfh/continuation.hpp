#pragma once

#include "rfh/complexes.hpp"
#include "rfh/orbits.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rfh {

/// Uniform partition of the linear homotopy (1 - s) F1 + s F2.
struct HomotopySchedule {
  Potential f1 = Potential::sphere();
  Potential f2 = Potential::sphere();
  std::vector<double> s_values;
  std::vector<Potential> steps;
  double delta = 0.0;
  /// Sampled sup |F1 - F2| and the ball it was sampled on.
  double sup_difference = 0.0;
  double radius = 0.0;
};

/// Fewest uniform steps with sampled per-step sup-difference <= delta, over
/// `samples` points in the ball of twice the larger surface radius. Throws
/// UnboundedDifference above `cap`.
HomotopySchedule make_schedule(const SpectralModel& model, const Potential& f1, const Potential& f2, double delta,
                               std::uint64_t sample_seed, int samples = 10000, double cap = 1e6);

/// Homotopy ramp: quintic smoothstep from 0 at t = 0 to 1 at t = 1.
double eta(double t);

struct NonautonomousSearch {
  int n_starts = 4;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  /// Nodes per tail segment; the middle segment [0, 1] gets half as many.
  int m = 64;
  double beta = 4.0;
  double decay = 1e-8;
  double dedup = 1e-4;
  int refine_levels = 2;
  BvpOptions newton;
};

/// Solutions of z' = -grad I_t(z), F_t = (1 - eta(t)) F_from + eta(t) F_to,
/// leaving `source` (critical for F_from) and arriving at `target` (critical
/// for F_to). Throws IndexMismatch unless the indices agree.
std::vector<OrbitRecord> find_nonautonomous_orbits(const SpectralModel& model, const Potential& f_from,
                                                   const Potential& f_to, const CriticalRecord& source,
                                                   const CriticalRecord& target, const NonautonomousSearch& search);

/// Degree-wise Z2 matrices; phi[k] has rows indexed by the target complex's
/// degree-k generators and columns by the source complex's.
struct ContinuationMap {
  std::map<int, GF2Matrix> phi;
  std::vector<std::string> provenance;
};

/// Throws MissingCounts when a same-degree pair lacks a count.
ContinuationMap build_phi(const ChainComplexData& from, const ChainComplexData& to, const OrbitCounts& counts);

/// d_to phi_k = phi_{k-1} d_from on every degree.
bool is_chain_map(const ContinuationMap& map, const ChainComplexData& from, const ChainComplexData& to);
/// Throws ChainMapViolation naming the first failing degree.
void verify_chain_map(const ContinuationMap& map, const ChainComplexData& from, const ChainComplexData& to);

/// second after first.
ContinuationMap compose(const ContinuationMap& first, const ContinuationMap& second);

struct InducedMapReport {
  std::map<int, int> source_rank;
  std::map<int, int> target_rank;
  /// Rank of the induced map on homology per degree.
  std::map<int, int> image_rank;
  std::vector<int> interior_degrees;
  bool bijective_on_interior = false;
};

/// Image rank = rank [phi Z_from | B_to] - rank B_to, with Z the cycles and B the boundaries.
InducedMapReport induced_map(const ContinuationMap& map, const ChainComplexData& from, const ChainComplexData& to);

}  // namespace rfh
