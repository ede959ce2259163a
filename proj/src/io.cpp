#include "rfh/io.hpp"

#include "rfh/error.hpp"
#include "rfh/kernel_reduction.hpp"

#include <algorithm>
#include <cmath>

namespace rfh {

namespace {

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec to_vec(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string mode_name(GenericPerturbation::Mode m) {
  switch (m) {
    case GenericPerturbation::Mode::linear: return "linear";
    case GenericPerturbation::Mode::even: return "even";
    case GenericPerturbation::Mode::s1_even: return "s1_even";
  }
  return "linear";
}

GenericPerturbation::Mode mode_from_name(const std::string& s) {
  if (s == "linear") return GenericPerturbation::Mode::linear;
  if (s == "even") return GenericPerturbation::Mode::even;
  if (s == "s1_even") return GenericPerturbation::Mode::s1_even;
  throw Error(ErrorCode::ParseError, "unknown perturbation mode '" + s + "'");
}

}  // namespace

Json to_json(const SpectralModel& model) {
  Json j;
  j["kind"] = to_string(model.kind);
  j["truncation"] = model.truncation;
  j["labels"] = model.labels;
  j["eigenvalues"] = model.eigenvalues;
  j["complex_structure"] = model.complex_structure;
  j["kernel_dim"] = model.kernel_dim;
  return j;
}

SpectralModel model_from_json(const Json& j) {
  ModelParams params;
  params.kind = model_kind_from_string(j.at("kind").get<std::string>());
  params.truncation = j.at("truncation").get<std::vector<int>>();
  params.complex_structure = j.value("complex_structure", false);
  const auto stored = j.contains("eigenvalues") ? j.at("eigenvalues").get<std::vector<double>>()
                                                : std::vector<double>{};
  SpectralModel model = build_model(params);
  if (!stored.empty() && stored.size() != model.eigenvalues.size()) {
    // explicit spectra only exist for the abstract kind
    params.eigenvalues = stored;
    model = build_model(params);
  }
  for (std::size_t i = 0; i < stored.size(); ++i) {
    if (std::abs(stored[i] - model.eigenvalues[i]) > 1e-15 * std::max(1.0, std::abs(stored[i]))) {
      params.eigenvalues = stored;
      model = build_model(params);
      break;
    }
  }
  return model;
}

Json to_json(const StatePoint& z) { return Json{{"coeffs", to_std(z.coeffs)}, {"multiplier", z.multiplier}}; }

StatePoint state_from_json(const Json& j) { return {to_vec(j.at("coeffs")), j.at("multiplier").get<double>()}; }

Json to_json(const Potential& pot) {
  Json j;
  j["kind"] = to_string(pot.kind());
  Json params = Json::object();
  switch (pot.kind()) {
    case PotentialKind::sphere: break;
    case PotentialKind::ellipsoid: params["weights"] = pot.weights(); break;
    case PotentialKind::p_power:
      params["p"] = pot.exponent();
      params["h_cos"] = pot.h_cos();
      params["grid_points"] = pot.grid_points();
      break;
    case PotentialKind::custom_quadratic_plus: params["coeffs"] = pot.coefficients(); break;
    case PotentialKind::linear_blend:
      params["s"] = pot.blend_parameter();
      params["a"] = to_json(pot.children()[0]);
      params["b"] = to_json(pot.children()[1]);
      break;
    case PotentialKind::cutoff_blend:
      params["q0"] = pot.blend_parameter();
      params["inner"] = to_json(pot.children()[0]);
      params["outer"] = to_json(pot.children()[1]);
      break;
    case PotentialKind::custom: {
      params["name"] = pot.custom_term()->name();
      if (auto k = std::dynamic_pointer_cast<const KernelReducedTerm>(pot.custom_term())) {
        params["p"] = k->problem().p;
        params["grid_points"] = k->problem().grid_points;
      }
      break;
    }
  }
  j["params"] = params;
  j["symmetry"] = to_string(pot.symmetry());
  Json perts = Json::array();
  for (const auto& p : pot.perturbations()) {
    if (const auto* g = std::get_if<GenericPerturbation>(&p)) {
      perts.push_back({{"type", "generic"},
                       {"mode", mode_name(g->mode)},
                       {"strength", g->strength},
                       {"direction", to_std(g->direction)},
                       {"radius", g->radius}});
    } else {
      const auto& s = std::get<SymmetryBreak>(p);
      perts.push_back({{"type", "symmetry_break"},
                       {"strength", s.strength},
                       {"re_slot", s.re_slot},
                       {"im_slot", s.im_slot},
                       {"rho2", s.rho2},
                       {"width", s.width}});
    }
  }
  j["perturbations"] = perts;
  return j;
}

Potential potential_from_json(const Json& j, const SpectralModel& model) {
  const PotentialKind kind = potential_kind_from_string(j.at("kind").get<std::string>());
  const Symmetry sym = symmetry_from_string(j.value("symmetry", std::string("none")));
  const Json params = j.value("params", Json::object());
  auto make = [&]() -> Potential {
    switch (kind) {
      case PotentialKind::sphere: return Potential::sphere(sym);
      case PotentialKind::ellipsoid:
        return Potential::ellipsoid(params.at("weights").get<std::vector<double>>(), sym);
      case PotentialKind::p_power:
        return Potential::p_power(params.at("p").get<double>(),
                                  params.value("h_cos", std::vector<double>{1.0}), params.value("grid_points", 0),
                                  sym);
      case PotentialKind::custom_quadratic_plus:
        return Potential::radial_polynomial(params.at("coeffs").get<std::vector<double>>(), sym);
      case PotentialKind::linear_blend:
        return Potential::linear_blend(potential_from_json(params.at("a"), model),
                                       potential_from_json(params.at("b"), model), params.at("s").get<double>());
      case PotentialKind::cutoff_blend:
        return Potential::cutoff_blend(potential_from_json(params.at("inner"), model),
                                       potential_from_json(params.at("outer"), model), params.at("q0").get<double>());
      case PotentialKind::custom: {
        const std::string name = params.value("name", std::string());
        if (name != "kernel_reduced_p_power") {
          throw Error(ErrorCode::ParseError, "custom potential '" + name + "' cannot be rebuilt");
        }
        return kernel_reduced_potential(
            make_kernel_problem(model, params.value("p", 3.0), params.value("grid_points", 0)), sym);
      }
    }
    return Potential::sphere(sym);
  };
  Potential pot = make();
  if (j.contains("perturbations")) {
    for (const auto& p : j.at("perturbations")) {
      const std::string type = p.at("type").get<std::string>();
      if (type == "generic") {
        GenericPerturbation g;
        g.mode = mode_from_name(p.at("mode").get<std::string>());
        g.strength = p.at("strength").get<double>();
        g.direction = to_vec(p.at("direction"));
        g.radius = p.at("radius").get<double>();
        pot = pot.with_perturbation(g, sym);
      } else if (type == "symmetry_break") {
        SymmetryBreak s;
        s.strength = p.at("strength").get<double>();
        s.re_slot = p.at("re_slot").get<int>();
        s.im_slot = p.at("im_slot").get<int>();
        s.rho2 = p.at("rho2").get<double>();
        s.width = p.value("width", s.width);
        pot = pot.with_perturbation(s, sym);
      } else {
        throw Error(ErrorCode::ParseError, "unknown perturbation type '" + type + "'");
      }
    }
  }
  return pot.with_symmetry(sym);
}

Json to_json(const Inertia& in) { return Json{{"n_neg", in.neg}, {"n_zero", in.zero}, {"n_pos", in.pos}}; }

Json to_json(const IndexReport& r) {
  return Json{{"n_neg_hessian", r.n_neg_hessian}, {"reference_dim", r.reference_dim}, {"rel_index", r.rel_index}};
}

Json to_json(const CriticalRecord& rec) {
  Json j;
  j["id"] = rec.id;
  j["point"] = to_json(rec.point);
  j["action"] = rec.action;
  j["residual"] = rec.residual;
  j["hessian_inertia"] = to_json(rec.inertia);
  j["rel_index"] = rec.rel_index;
  j["orbit_type"] = to_string(rec.orbit_type);
  j["orbit_id"] = rec.orbit_id;
  if (rec.broken_children) {
    j["broken_children"] = {rec.broken_children->first, rec.broken_children->second};
  } else {
    j["broken_children"] = nullptr;
  }
  return j;
}

CriticalRecord record_from_json(const Json& j) {
  CriticalRecord rec;
  rec.id = j.at("id").get<std::string>();
  rec.point = state_from_json(j.at("point"));
  rec.action = j.at("action").get<double>();
  rec.residual = j.at("residual").get<double>();
  const Json& in = j.at("hessian_inertia");
  rec.inertia = {in.at("n_neg").get<int>(), in.at("n_zero").get<int>(), in.at("n_pos").get<int>()};
  rec.rel_index = j.at("rel_index").get<int>();
  rec.orbit_type = orbit_type_from_string(j.at("orbit_type").get<std::string>());
  rec.orbit_id = j.at("orbit_id").get<std::string>();
  if (j.contains("broken_children") && !j.at("broken_children").is_null()) {
    const auto c = j.at("broken_children").get<std::vector<std::string>>();
    if (c.size() != 2) throw Error(ErrorCode::ParseError, "broken_children must list two ids");
    rec.broken_children = std::make_pair(c[0], c[1]);
  }
  return rec;
}

Json to_json(const std::vector<CriticalRecord>& records) {
  Json arr = Json::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  return arr;
}

std::vector<CriticalRecord> records_from_json(const Json& j) {
  std::vector<CriticalRecord> out;
  for (const auto& r : j) out.push_back(record_from_json(r));
  return out;
}

Json to_json(const OrbitRecord& orbit, int max_nodes) {
  Json j;
  j["source_id"] = orbit.source_id;
  j["target_id"] = orbit.target_id;
  j["residual"] = orbit.residual;
  j["phase_anchor"] = orbit.phase_anchor;
  j["grid"] = {{"m", orbit.grid.m},
               {"half_width", orbit.grid.half_width},
               {"center", orbit.grid.center},
               {"beta", orbit.grid.beta}};
  j["times"] = orbit.times;
  j["action_profile"] = orbit.action_profile;
  const int m = static_cast<int>(orbit.nodes.size());
  const int stride = std::max(1, (m - 1) / std::max(1, max_nodes - 1));
  Json nodes = Json::array();
  for (int i = 0; i < m; i += stride) nodes.push_back({{"t", orbit.times[i]}, {"point", to_json(orbit.nodes[i])}});
  if (m > 0 && (m - 1) % stride != 0) nodes.push_back({{"t", orbit.times[m - 1]}, {"point", to_json(orbit.nodes[m - 1])}});
  j["nodes"] = nodes;
  return j;
}

Json to_json(const PsDiagnostic& d) {
  return Json{{"epsilon", d.epsilon},         {"tau_values", d.tau_values}, {"lambda_bound", d.lambda_bound},
              {"u_bound", d.u_bound},         {"tau_bound", d.tau_bound},   {"max_lambda", d.max_lambda},
              {"max_u", d.max_u},             {"bound_violated", d.bound_violated}};
}

Json to_json(const GF2Matrix& m) {
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"bits", m.to_bits()}};
}

GF2Matrix gf2_from_json(const Json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto bits = j.at("bits").get<std::vector<std::string>>();
  if (static_cast<int>(bits.size()) != rows) throw Error(ErrorCode::ParseError, "bit matrix row count");
  return GF2Matrix::from_bits(bits, cols);
}

Json to_json(const ChainComplexData& cc) {
  Json j;
  j["flavor"] = to_string(cc.flavor);
  j["window"] = {cc.window_lo, cc.window_hi};
  Json gens = Json::object();
  for (const auto& [k, g] : cc.generators) gens[std::to_string(k)] = g;
  j["generators"] = gens;
  Json bd = Json::object();
  for (const auto& [k, m] : cc.boundary) bd[std::to_string(k)] = to_json(m);
  j["boundary"] = bd;
  j["provenance"] = cc.provenance;
  return j;
}

ChainComplexData complex_from_json(const Json& j) {
  ChainComplexData cc;
  cc.flavor = flavor_from_string(j.at("flavor").get<std::string>());
  cc.window_lo = j.at("window").at(0).get<double>();
  cc.window_hi = j.at("window").at(1).get<double>();
  for (const auto& [k, g] : j.at("generators").items()) {
    cc.generators[std::stoi(k)] = g.get<std::vector<std::string>>();
  }
  for (const auto& [k, m] : j.at("boundary").items()) cc.boundary[std::stoi(k)] = gf2_from_json(m);
  cc.provenance = j.value("provenance", std::vector<std::string>{});
  return cc;
}

Json to_json(const HomologyTable& h) {
  Json j;
  j["flavor"] = to_string(h.flavor);
  j["window"] = {h.window_lo, h.window_hi};
  Json ranks = Json::object();
  for (const auto& [k, r] : h.ranks) ranks[std::to_string(k)] = r;
  j["ranks"] = ranks;
  j["interior_degrees"] = h.interior_degrees;
  return j;
}

HomologyTable homology_from_json(const Json& j) {
  HomologyTable h;
  h.flavor = flavor_from_string(j.at("flavor").get<std::string>());
  h.window_lo = j.at("window").at(0).get<double>();
  h.window_hi = j.at("window").at(1).get<double>();
  for (const auto& [k, r] : j.at("ranks").items()) h.ranks[std::stoi(k)] = r.get<int>();
  h.interior_degrees = j.at("interior_degrees").get<std::vector<int>>();
  return h;
}

Json to_json(const ContinuationMap& map) {
  Json j;
  Json phi = Json::object();
  for (const auto& [k, m] : map.phi) phi[std::to_string(k)] = to_json(m);
  j["phi"] = phi;
  j["provenance"] = map.provenance;
  return j;
}

Json to_json(const InducedMapReport& r) {
  auto degree_map = [](const std::map<int, int>& m) {
    Json o = Json::object();
    for (const auto& [k, v] : m) o[std::to_string(k)] = v;
    return o;
  };
  return Json{{"source_rank", degree_map(r.source_rank)},
              {"target_rank", degree_map(r.target_rank)},
              {"image_rank", degree_map(r.image_rank)},
              {"interior_degrees", r.interior_degrees},
              {"bijective_on_interior", r.bijective_on_interior}};
}

}  // namespace rfh
