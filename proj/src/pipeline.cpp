#include "rfh/pipeline.hpp"

#include "rfh/error.hpp"
#include "rfh/grading.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace rfh {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ValidationError, (path.empty() ? std::string("<root>") : path) + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) invalid(path, "expected an object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; });
    if (!known) invalid(join(path, item.key()), "unknown key");
  }
}

template <class T>
T field(const Json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    invalid(join(path, key), "wrong type");
  }
}

template <class T>
T required(const Json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) invalid(join(path, key), "missing");
  return field<T>(j, key, path, T{});
}

double positive(double v, const std::string& path) {
  if (!(v > 0.0) || !std::isfinite(v)) invalid(path, "must be positive");
  return v;
}

int positive(int v, const std::string& path) {
  if (v < 1) invalid(path, "must be >= 1");
  return v;
}

void validate_potential(const Json& j, const std::string& path) {
  check_keys(j, path, {"kind", "symmetry", "params"});
  const std::string kind_name = required<std::string>(j, "kind", path);
  PotentialKind kind;
  try {
    kind = potential_kind_from_string(kind_name);
    symmetry_from_string(field<std::string>(j, "symmetry", path, "none"));
  } catch (const Error& e) {
    invalid(path, e.what());
  }
  const std::string pp = join(path, "params");
  const Json params = j.value("params", Json::object());
  switch (kind) {
    case PotentialKind::sphere: check_keys(params, pp, {}); break;
    case PotentialKind::ellipsoid: check_keys(params, pp, {"weights"}); break;
    case PotentialKind::p_power: check_keys(params, pp, {"p", "h_cos", "grid_points"}); break;
    case PotentialKind::custom_quadratic_plus: check_keys(params, pp, {"coeffs"}); break;
    case PotentialKind::custom: check_keys(params, pp, {"name", "p", "grid_points"}); break;
    case PotentialKind::linear_blend:
      check_keys(params, pp, {"s", "a", "b"});
      validate_potential(required<Json>(params, "a", pp), join(pp, "a"));
      validate_potential(required<Json>(params, "b", pp), join(pp, "b"));
      break;
    case PotentialKind::cutoff_blend:
      check_keys(params, pp, {"q0", "inner", "outer"});
      validate_potential(required<Json>(params, "inner", pp), join(pp, "inner"));
      validate_potential(required<Json>(params, "outer", pp), join(pp, "outer"));
      break;
  }
}

Potential build_potential(const Json& j, const SpectralModel& model, const std::string& path) {
  try {
    Potential pot = potential_from_json(j, model);
    // one evaluation surfaces parameter/model mismatches at load time
    pot.value(model, Vec::Zero(model.real_dim()));
    return pot;
  } catch (const Error& e) {
    invalid(path, e.what());
  } catch (const nlohmann::json::exception& e) {
    invalid(path, e.what());
  }
}

CriticalSearch critical_search(const RunConfig& cfg) {
  CriticalSearch s;
  s.window_lo = cfg.window_lo;
  s.window_hi = cfg.window_hi;
  s.n_starts = cfg.n_starts;
  s.seed = cfg.seed;
  s.tol = cfg.solver.tol;
  return s;
}

const CriticalRecord& find_record(const std::vector<CriticalRecord>& records, const std::string& id) {
  for (const auto& r : records) {
    if (r.id == id) return r;
  }
  throw Error(ErrorCode::InvalidArgument, "no record with id " + id);
}

bool in_window(const CriticalRecord& r, double lo, double hi) { return r.action >= lo && r.action <= hi; }

void add_failure(Gates& g, const std::string& what) { g.failures.push_back(what); }

}  // namespace

OrbitSearch orbit_search(const RunConfig& cfg) {
  OrbitSearch s;
  s.n_starts = cfg.solver.orbit_starts;
  s.seed = cfg.seed + 1;
  s.tol = cfg.solver.orbit_tol;
  s.m = cfg.solver.collocation_nodes;
  s.horizon_extension = cfg.solver.horizon_extension;
  s.refine_levels = cfg.solver.refine_levels;
  return s;
}

RunConfig config_from_json(const Json& j) {
  check_keys(j, "", {"model", "potential", "window", "flavor", "solver", "n_starts", "seed", "output_dir",
                     "perturbation", "continuation"});
  RunConfig cfg;

  const Json model = required<Json>(j, "model", "");
  check_keys(model, "model", {"kind", "truncation", "complex_structure", "eigenvalues"});
  try {
    cfg.model.kind = model_kind_from_string(required<std::string>(model, "kind", "model"));
  } catch (const Error& e) {
    invalid("model.kind", e.what());
  }
  cfg.model.truncation = required<std::vector<int>>(model, "truncation", "model");
  cfg.model.complex_structure = field<bool>(model, "complex_structure", "model", false);
  if (model.contains("eigenvalues")) {
    cfg.model.eigenvalues = field<std::vector<double>>(model, "eigenvalues", "model", {});
  }
  SpectralModel built;
  try {
    built = build_model(cfg.model);
  } catch (const Error& e) {
    invalid("model", e.what());
  }

  cfg.potential = required<Json>(j, "potential", "");
  validate_potential(cfg.potential, "potential");
  build_potential(cfg.potential, built, "potential");

  const auto window = required<std::vector<double>>(j, "window", "");
  if (window.size() != 2) invalid("window", "expected [a, b]");
  if (!(window[0] < window[1])) invalid("window", "requires a < b");
  cfg.window_lo = window[0];
  cfg.window_hi = window[1];

  try {
    cfg.flavor = flavor_from_string(field<std::string>(j, "flavor", "", "plain"));
  } catch (const Error& e) {
    invalid("flavor", e.what());
  }

  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    check_keys(s, "solver", {"tol", "orbit_tol", "collocation_nodes", "orbit_starts", "refine_levels",
                             "horizon_extension", "symmetry_break_strength", "ps_epsilon"});
    auto& sv = cfg.solver;
    sv.tol = positive(field(s, "tol", "solver", sv.tol), "solver.tol");
    sv.orbit_tol = positive(field(s, "orbit_tol", "solver", sv.orbit_tol), "solver.orbit_tol");
    sv.collocation_nodes = field(s, "collocation_nodes", "solver", sv.collocation_nodes);
    if (sv.collocation_nodes < 8) invalid("solver.collocation_nodes", "must be >= 8");
    sv.orbit_starts = positive(field(s, "orbit_starts", "solver", sv.orbit_starts), "solver.orbit_starts");
    sv.refine_levels = field(s, "refine_levels", "solver", sv.refine_levels);
    if (sv.refine_levels < 0) invalid("solver.refine_levels", "must be >= 0");
    sv.horizon_extension = field(s, "horizon_extension", "solver", sv.horizon_extension);
    if (sv.horizon_extension < 0) invalid("solver.horizon_extension", "must be >= 0");
    sv.break_strength =
        positive(field(s, "symmetry_break_strength", "solver", sv.break_strength), "solver.symmetry_break_strength");
    sv.ps_epsilon = positive(field(s, "ps_epsilon", "solver", sv.ps_epsilon), "solver.ps_epsilon");
  }

  cfg.n_starts = positive(field(j, "n_starts", "", cfg.n_starts), "n_starts");
  cfg.seed = field<std::uint64_t>(j, "seed", "", cfg.seed);
  cfg.output_dir = field<std::string>(j, "output_dir", "", cfg.output_dir);

  if (j.contains("perturbation")) {
    const Json& p = j.at("perturbation");
    check_keys(p, "perturbation", {"strength", "seed"});
    GenericSpec g;
    g.strength = positive(required<double>(p, "strength", "perturbation"), "perturbation.strength");
    g.seed = field<std::uint64_t>(p, "seed", "perturbation", 0);
    cfg.perturbation = g;
  }

  if (j.contains("continuation")) {
    const Json& c = j.at("continuation");
    check_keys(c, "continuation", {"target_potential", "delta", "sample_seed", "samples", "n_starts"});
    ContinuationSpec spec;
    spec.target_potential = required<Json>(c, "target_potential", "continuation");
    validate_potential(spec.target_potential, "continuation.target_potential");
    build_potential(spec.target_potential, built, "continuation.target_potential");
    if (c.contains("delta")) spec.delta = positive(field(c, "delta", "continuation", 0.0), "continuation.delta");
    spec.sample_seed = field<std::uint64_t>(c, "sample_seed", "continuation", 0);
    spec.samples = positive(field(c, "samples", "continuation", spec.samples), "continuation.samples");
    spec.n_starts = positive(field(c, "n_starts", "continuation", spec.n_starts), "continuation.n_starts");
    cfg.continuation = spec;
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return config_from_json(j);
}

SpectralModel make_model(const RunConfig& cfg) { return build_model(cfg.model); }

Potential make_potential(const RunConfig& cfg, const SpectralModel& model) {
  Potential pot = potential_from_json(cfg.potential, model);
  if (cfg.perturbation) pot = perturb_generic(pot, model, cfg.perturbation->strength, cfg.perturbation->seed);
  return pot;
}

ComplexRun compute_complex(const SpectralModel& model, const Potential& pot, const RunConfig& cfg) {
  ComplexRun run;
  run.model = model;
  run.potential = pot;
  const double lo = cfg.window_lo;
  const double hi = cfg.window_hi;
  const CriticalSearch cs = critical_search(cfg);
  run.records = find_critical_points(model, pot, cs);

  std::vector<CriticalRecord> isolated;
  for (const auto& r : run.records) {
    if (r.orbit_type == OrbitType::circle) {
      run.circles.push_back(r);
    } else {
      isolated.push_back(r);
    }
  }
  if (cfg.flavor == Flavor::s1 && pot.symmetry() != Symmetry::s1) {
    throw Error(ErrorCode::ValidationError, "flavor: s1 needs an S1-invariant potential");
  }
  if (cfg.flavor == Flavor::z2) {
    if (pot.symmetry() != Symmetry::z2) throw Error(ErrorCode::ValidationError, "flavor: z2 needs a Z2-even potential");
    if (!run.circles.empty()) throw Error(ErrorCode::ValidationError, "flavor: z2 needs isolated +- pairs");
  }

  if (!run.circles.empty()) {
    BrokenCircles broken = break_all_circles(model, pot, run.circles, cfg.solver.break_strength, cfg.solver.tol);
    run.potential = broken.potential;
    run.circles = std::move(broken.circles);
    run.generators = std::move(isolated);
    for (auto& c : broken.children) run.generators.push_back(std::move(c));
    run.morse_strength = cfg.solver.break_strength;
  } else if (!is_morse(run.records)) {
    MorseOutcome m = ensure_morse(model, pot, run.records, cs);
    run.potential = m.potential;
    run.generators = std::move(m.records);
    run.morse_strength = m.strength;
  } else {
    run.generators = run.records;
  }
  std::stable_sort(run.generators.begin(), run.generators.end(), [](const auto& a, const auto& b) {
    return a.rel_index != b.rel_index ? a.rel_index < b.rel_index : a.action < b.action;
  });

  for (const auto& r : run.generators) {
    if (in_window(r, lo, hi) && !(r.residual <= cfg.solver.tol)) {
      run.gates.residuals = false;
      add_failure(run.gates, "residual " + r.id);
    }
  }

  // Orbit searches: every gap-1 pair among generators for plain/z2; only
  // max children of adjacent-degree circles for s1.
  std::vector<std::pair<const CriticalRecord*, const CriticalRecord*>> pairs;
  if (cfg.flavor == Flavor::s1) {
    for (const auto& src : run.circles) {
      for (const auto& tgt : run.circles) {
        if (src.rel_index != tgt.rel_index + 1 || !in_window(src, lo, hi) || !in_window(tgt, lo, hi)) continue;
        pairs.emplace_back(&find_record(run.generators, src.broken_children->second),
                           &find_record(run.generators, tgt.broken_children->second));
      }
    }
  } else {
    for (const auto& src : run.generators) {
      for (const auto& tgt : run.generators) {
        if (src.rel_index == tgt.rel_index + 1 && in_window(src, lo, hi) && in_window(tgt, lo, hi)) {
          pairs.emplace_back(&src, &tgt);
        }
      }
    }
  }
  const OrbitSearch os = orbit_search(cfg);
  for (const auto& [src, tgt] : pairs) {
    auto orbits = find_connecting_orbits(model, run.potential, *src, *tgt, os);
    run.counts[{src->id, tgt->id}] = static_cast<int>(orbits.size());
    run.orbits[{src->id, tgt->id}] = std::move(orbits);
  }

  const StarshapeReport star = check_starshape(run.potential, model, 512, cfg.seed);
  run.ps_constant = ps_constant(lo, hi, star.min_radial_derivative);
  for (const auto& [key, list] : run.orbits) {
    for (const auto& orbit : list) {
      PsDiagnostic d = ps_monitor(model, run.potential, sample_orbit(orbit, 200), lo, hi, cfg.solver.ps_epsilon,
                                  run.ps_constant);
      if (d.bound_violated) {
        run.gates.ps_bounds = false;
        add_failure(run.gates, "ps bound " + key.first + "->" + key.second);
      }
      run.ps.push_back(std::move(d));
    }
  }

  try {
    switch (cfg.flavor) {
      case Flavor::plain: run.complex = assemble_plain(run.generators, run.counts, lo, hi); break;
      case Flavor::s1: run.complex = assemble_s1(run.circles, run.generators, run.counts, lo, hi); break;
      case Flavor::z2:
        run.complex = assemble_z2(run.generators, run.counts, lo, hi);
        run.plain = assemble_plain(run.generators, run.counts, lo, hi);
        if (!quotient_commutes(*run.plain, run.complex, run.generators)) {
          run.gates.quotient = false;
          add_failure(run.gates, "z2 quotient square does not commute");
        }
        break;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BoundarySquareNonzero) throw;
    run.gates.boundary_square = false;
    add_failure(run.gates, e.what());
    return run;
  }
  run.homology = homology_z2(run.complex);
  return run;
}

ComplexRun compute_complex(const RunConfig& cfg) {
  const SpectralModel model = make_model(cfg);
  return compute_complex(model, make_potential(cfg, model), cfg);
}

ContinuationRun run_continuation(const RunConfig& cfg) {
  if (!cfg.continuation) throw Error(ErrorCode::ValidationError, "continuation: section missing");
  const ContinuationSpec& spec = *cfg.continuation;
  const SpectralModel model = make_model(cfg);
  const Potential f1 = make_potential(cfg, model);
  const Potential f2 = potential_from_json(spec.target_potential, model);
  RunConfig plain = cfg;
  plain.flavor = Flavor::plain;

  double delta = 0.0;
  if (spec.delta) {
    delta = *spec.delta;
  } else {
    const StarshapeReport star = check_starshape(f1, model, 512, cfg.seed);
    delta = cfg.solver.ps_epsilon / (2.0 * ps_constant(cfg.window_lo, cfg.window_hi, star.min_radial_derivative));
  }

  ContinuationRun out;
  out.schedule = make_schedule(model, f1, f2, delta, spec.sample_seed, spec.samples);
  for (const auto& step : out.schedule.steps) out.complexes.push_back(compute_complex(model, step, plain));

  NonautonomousSearch ns;
  ns.n_starts = spec.n_starts;
  ns.seed = cfg.seed + 2;
  ns.tol = cfg.solver.orbit_tol;
  ns.m = cfg.solver.collocation_nodes;
  ns.refine_levels = cfg.solver.refine_levels;

  out.all_chain_maps = true;
  for (std::size_t j = 0; j + 1 < out.complexes.size(); ++j) {
    const ComplexRun& from = out.complexes[j];
    const ComplexRun& to = out.complexes[j + 1];
    ContinuationStep step;
    step.s_from = out.schedule.s_values[j];
    step.s_to = out.schedule.s_values[j + 1];
    for (const auto& [k, src_ids] : from.complex.generators) {
      auto it = to.complex.generators.find(k);
      if (it == to.complex.generators.end()) continue;
      for (const auto& s : src_ids) {
        for (const auto& t : it->second) {
          const auto orbits = find_nonautonomous_orbits(model, from.potential, to.potential,
                                                        find_record(from.generators, s),
                                                        find_record(to.generators, t), ns);
          step.counts[{s, t}] = static_cast<int>(orbits.size());
        }
      }
    }
    step.map = build_phi(from.complex, to.complex, step.counts);
    step.chain_map = is_chain_map(step.map, from.complex, to.complex);
    out.all_chain_maps = out.all_chain_maps && step.chain_map;
    step.induced = induced_map(step.map, from.complex, to.complex);
    out.steps.push_back(std::move(step));
  }

  if (out.steps.empty()) {
    const ChainComplexData& only = out.complexes.front().complex;
    for (const auto& [k, gens] : only.generators) out.composite.phi[k] = GF2Matrix::identity(static_cast<int>(gens.size()));
  } else {
    out.composite = out.steps.front().map;
    for (std::size_t j = 1; j < out.steps.size(); ++j) out.composite = compose(out.composite, out.steps[j].map);
  }
  out.composite_induced = induced_map(out.composite, out.complexes.front().complex, out.complexes.back().complex);
  return out;
}

namespace {

Json counts_json(const CountTable& counts) {
  Json arr = Json::array();
  for (const auto& [key, n] : counts) arr.push_back({{"source", key.first}, {"target", key.second}, {"count", n}});
  return arr;
}

Json gates_json(const Gates& g) {
  return Json{{"boundary_square", g.boundary_square},
              {"residuals", g.residuals},
              {"ps_bounds", g.ps_bounds},
              {"quotient", g.quotient},
              {"ok", g.ok()},
              {"failures", g.failures}};
}

}  // namespace

Json critical_points_json(const ComplexRun& run) {
  Json j;
  j["model"] = to_json(run.model);
  j["potential"] = to_json(run.potential);
  j["morse_strength"] = run.morse_strength;
  j["records"] = to_json(run.records);
  j["circles"] = to_json(run.circles);
  j["generators"] = to_json(run.generators);
  return j;
}

Json boundary_json(const ComplexRun& run) {
  Json j;
  j["complex"] = to_json(run.complex);
  j["plain_complex"] = run.plain ? to_json(*run.plain) : Json(nullptr);
  j["counts"] = counts_json(run.counts);
  return j;
}

Json homology_json(const ComplexRun& run) { return to_json(run.homology); }

Json diagnostics_json(const ComplexRun& run) {
  Json j;
  j["gates"] = gates_json(run.gates);
  j["ps_constant"] = run.ps_constant;
  Json ps = Json::array();
  for (const auto& d : run.ps) ps.push_back(to_json(d));
  j["ps"] = ps;
  Json orbits = Json::array();
  for (const auto& [key, list] : run.orbits) {
    for (const auto& o : list) orbits.push_back(to_json(o));
  }
  j["orbits"] = orbits;
  return j;
}

Json continuation_json(const ContinuationRun& run) {
  Json j;
  j["schedule"] = {{"s_values", run.schedule.s_values},
                   {"delta", run.schedule.delta},
                   {"sup_difference", run.schedule.sup_difference},
                   {"radius", run.schedule.radius}};
  Json complexes = Json::array();
  for (const auto& c : run.complexes) {
    complexes.push_back({{"complex", to_json(c.complex)}, {"homology", to_json(c.homology)}, {"gates", gates_json(c.gates)}});
  }
  j["complexes"] = complexes;
  Json steps = Json::array();
  for (const auto& s : run.steps) {
    steps.push_back({{"s_from", s.s_from},
                     {"s_to", s.s_to},
                     {"counts", counts_json(s.counts)},
                     {"map", to_json(s.map)},
                     {"chain_map", s.chain_map},
                     {"induced", to_json(s.induced)}});
  }
  j["steps"] = steps;
  j["composite"] = to_json(run.composite);
  j["composite_induced"] = to_json(run.composite_induced);
  j["all_chain_maps"] = run.all_chain_maps;
  return j;
}

void write_json(const std::string& dir, const std::string& name, const Json& j) {
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / name);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + (fs::path(dir) / name).string());
  out << j.dump(2) << '\n';
}

void write_metadata(const std::string& dir, const std::string& command, const std::string& config_path) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  write_json(dir, "metadata.json", Json{{"command", command}, {"config", config_path}, {"timestamp", stamp.str()}});
}

Gates run_pipeline(const RunConfig& cfg, const std::string& out_dir) {
  const ComplexRun run = compute_complex(cfg);
  write_json(out_dir, "critical_points.json", critical_points_json(run));
  write_json(out_dir, "boundary.json", boundary_json(run));
  write_json(out_dir, "homology.json", homology_json(run));
  write_json(out_dir, "diagnostics.json", diagnostics_json(run));
  return run.gates;
}

namespace {

Json read_artifact(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingArtifact, path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

std::string safe_name(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return s;
}

}  // namespace

void emit_report(const std::string& dir, std::ostream& out) {
  const fs::path root(dir);
  const Json crit = read_artifact(root / "critical_points.json");
  const Json hom = read_artifact(root / "homology.json");
  const HomologyTable table = homology_from_json(hom);
  const auto gens = records_from_json(crit.at("generators"));

  std::map<int, std::vector<const CriticalRecord*>> by_degree;
  for (const auto& r : gens) {
    if (r.action >= table.window_lo && r.action <= table.window_hi) by_degree[r.rel_index].push_back(&r);
  }
  out << "flavor " << to_string(table.flavor) << ", window [" << table.window_lo << ", " << table.window_hi << "]\n";
  if (by_degree.empty()) out << "warning: no generators in the window\n";
  out << std::left << std::setw(8) << "degree" << std::setw(8) << "gens" << std::setw(8) << "rank" << std::setw(10)
      << "interior" << "generators (multiplier, action)\n";
  std::set<int> degrees;
  for (const auto& [k, v] : by_degree) degrees.insert(k);
  for (const auto& [k, r] : table.ranks) degrees.insert(k);
  const std::set<int> interior(table.interior_degrees.begin(), table.interior_degrees.end());
  for (int k : degrees) {
    const auto rank = table.ranks.find(k);
    out << std::setw(8) << k << std::setw(8) << by_degree[k].size() << std::setw(8)
        << (rank == table.ranks.end() ? 0 : rank->second) << std::setw(10) << (interior.count(k) ? "yes" : "no");
    for (const auto* r : by_degree[k]) {
      out << r->id << " (" << r->point.multiplier << ", " << r->action << ") ";
    }
    out << '\n';
  }

  std::ofstream stair(root / "staircase.csv");
  stair << "id,rel_index,action,multiplier,orbit_type\n";
  stair << std::setprecision(17);
  for (const auto& r : gens) {
    stair << r.id << ',' << r.rel_index << ',' << r.action << ',' << r.point.multiplier << ','
          << to_string(r.orbit_type) << '\n';
  }

  if (fs::exists(root / "diagnostics.json")) {
    const Json diag = read_artifact(root / "diagnostics.json");
    const fs::path prof = root / "orbit_profiles";
    fs::create_directories(prof);
    std::map<std::string, int> seen;
    for (const auto& o : diag.at("orbits")) {
      const std::string key = o.at("source_id").get<std::string>() + "_to_" + o.at("target_id").get<std::string>();
      const int n = seen[key]++;
      std::ofstream csv(prof / (safe_name(key) + "_" + std::to_string(n) + ".csv"));
      csv << "t,action\n" << std::setprecision(17);
      const auto times = o.at("times").get<std::vector<double>>();
      const auto actions = o.at("action_profile").get<std::vector<double>>();
      for (std::size_t i = 0; i < times.size() && i < actions.size(); ++i) csv << times[i] << ',' << actions[i] << '\n';
    }
    out << "gates " << (diag.at("gates").at("ok").get<bool>() ? "OK" : "FAILED") << ", " << diag.at("orbits").size()
        << " orbits\n";
  }

  if (fs::exists(root / "continuation.json")) {
    const Json cont = read_artifact(root / "continuation.json");
    out << std::setw(12) << "step" << std::setw(12) << "s_from" << std::setw(12) << "s_to" << "chain map\n";
    int i = 0;
    for (const auto& s : cont.at("steps")) {
      out << std::setw(12) << i++ << std::setw(12) << s.at("s_from").get<double>() << std::setw(12)
          << s.at("s_to").get<double>() << (s.at("chain_map").get<bool>() ? "OK" : "FAIL") << '\n';
    }
    out << "composite bijective on interior: "
        << (cont.at("composite_induced").at("bijective_on_interior").get<bool>() ? "yes" : "no") << '\n';
  }
}

}  // namespace rfh
