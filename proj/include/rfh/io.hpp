#pragma once

#include "rfh/complexes.hpp"
#include "rfh/continuation.hpp"
#include "rfh/critical.hpp"
#include "rfh/grading.hpp"
#include "rfh/orbits.hpp"

#include <nlohmann/json.hpp>

namespace rfh {

using Json = nlohmann::ordered_json;

Json to_json(const SpectralModel& model);
/// Rebuilds from kind/truncation and checks the stored eigenvalues to 1e-15 relative.
SpectralModel model_from_json(const Json& j);

Json to_json(const StatePoint& z);
StatePoint state_from_json(const Json& j);

/// {kind, params, symmetry, perturbations[]}.
Json to_json(const Potential& pot);
/// The model is needed to rebuild kernel-reduced custom potentials.
Potential potential_from_json(const Json& j, const SpectralModel& model);

Json to_json(const Inertia& in);
Json to_json(const IndexReport& r);
Json to_json(const CriticalRecord& rec);
CriticalRecord record_from_json(const Json& j);
Json to_json(const std::vector<CriticalRecord>& records);
std::vector<CriticalRecord> records_from_json(const Json& j);

/// Ids, residual, grid, action profile and a coarse node subsample (at most `max_nodes`).
Json to_json(const OrbitRecord& orbit, int max_nodes = 17);
Json to_json(const PsDiagnostic& d);

Json to_json(const GF2Matrix& m);
GF2Matrix gf2_from_json(const Json& j);
Json to_json(const ChainComplexData& cc);
ChainComplexData complex_from_json(const Json& j);
Json to_json(const HomologyTable& h);
HomologyTable homology_from_json(const Json& j);
Json to_json(const ContinuationMap& map);
Json to_json(const InducedMapReport& r);

}  // namespace rfh
