#pragma once

#include "rfh/io.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rfh {

struct SolverSettings {
  double tol = 1e-10;
  /// Accepted collocation defect for connecting orbits.
  double orbit_tol = 1e-6;
  int collocation_nodes = 64;
  int orbit_starts = 6;
  int refine_levels = 2;
  double horizon_extension = 0.0;
  double break_strength = 1e-3;
  double ps_epsilon = 0.1;
};

struct GenericSpec {
  double strength = 0.0;
  std::uint64_t seed = 0;
};

struct ContinuationSpec {
  Json target_potential;
  /// Unset: ps_epsilon / (2 C) with C the a-priori constant of the source potential.
  std::optional<double> delta;
  std::uint64_t sample_seed = 0;
  int samples = 10000;
  int n_starts = 4;
};

struct RunConfig {
  ModelParams model;
  Json potential;
  double window_lo = 0.0;
  double window_hi = 0.0;
  Flavor flavor = Flavor::plain;
  SolverSettings solver;
  int n_starts = 200;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::optional<GenericSpec> perturbation;
  std::optional<ContinuationSpec> continuation;
};

/// Validates a parsed config. Unknown keys and bad values raise
/// ValidationError naming the field path (e.g. "solver.tol").
RunConfig config_from_json(const Json& j);
/// Reads and validates; unreadable or malformed JSON raises ParseError.
RunConfig load_config(const std::string& path);

struct Gates {
  bool boundary_square = true;
  bool residuals = true;
  bool ps_bounds = true;
  bool quotient = true;
  std::vector<std::string> failures;

  bool ok() const { return boundary_square && residuals && ps_bounds && quotient; }
};

/// Everything computed for one potential in one window.
struct ComplexRun {
  SpectralModel model;
  /// Potential the complex belongs to (after generic / symmetry-breaking perturbations).
  Potential potential = Potential::sphere();
  /// Records found for the input potential (circles included).
  std::vector<CriticalRecord> records;
  /// Records generating the plain complex (broken children replace circles).
  std::vector<CriticalRecord> generators;
  std::vector<CriticalRecord> circles;
  double morse_strength = 0.0;
  OrbitTable orbits;
  CountTable counts;
  ChainComplexData complex;
  /// Plain complex on the same generators when the flavor is z2.
  std::optional<ChainComplexData> plain;
  HomologyTable homology;
  double ps_constant = 0.0;
  std::vector<PsDiagnostic> ps;
  Gates gates;
};

ComplexRun compute_complex(const SpectralModel& model, const Potential& pot, const RunConfig& cfg);
ComplexRun compute_complex(const RunConfig& cfg);

/// Orbit search settings derived from the solver block (seed = seed + 1).
OrbitSearch orbit_search(const RunConfig& cfg);

/// Builds the configured model and potential (generic perturbation applied).
SpectralModel make_model(const RunConfig& cfg);
Potential make_potential(const RunConfig& cfg, const SpectralModel& model);

struct ContinuationStep {
  double s_from = 0.0;
  double s_to = 0.0;
  CountTable counts;
  ContinuationMap map;
  bool chain_map = false;
  InducedMapReport induced;
};

struct ContinuationRun {
  HomotopySchedule schedule;
  std::vector<ComplexRun> complexes;
  std::vector<ContinuationStep> steps;
  ContinuationMap composite;
  InducedMapReport composite_induced;
  bool all_chain_maps = false;
};

/// Plain complexes along the schedule and the step maps between them.
ContinuationRun run_continuation(const RunConfig& cfg);

Json critical_points_json(const ComplexRun& run);
Json boundary_json(const ComplexRun& run);
Json homology_json(const ComplexRun& run);
Json diagnostics_json(const ComplexRun& run);
Json continuation_json(const ContinuationRun& run);

/// Writes `name` with two-space indentation and a trailing newline.
void write_json(const std::string& dir, const std::string& name, const Json& j);
/// metadata.json: timestamp, command and config path (kept apart so other artifacts stay byte-stable).
void write_metadata(const std::string& dir, const std::string& command, const std::string& config_path);

/// Runs the full chain and writes critical_points.json, boundary.json,
/// homology.json and diagnostics.json. Returns the gates.
Gates run_pipeline(const RunConfig& cfg, const std::string& out_dir);

/// Prints the graded generator/rank table and writes staircase.csv and
/// orbit_profiles/*.csv next to the artifacts. Throws MissingArtifact.
void emit_report(const std::string& dir, std::ostream& out);

}  // namespace rfh
