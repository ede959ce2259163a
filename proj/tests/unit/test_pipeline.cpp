#include "oracles.hpp"
#include "rfh/error.hpp"
#include "rfh/io.hpp"
#include "rfh/pipeline.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rfh;
namespace fs = std::filesystem;

namespace {

Json base_config() {
  return Json::parse(R"({
    "model": {"kind": "abstract", "truncation": [2], "complex_structure": false},
    "potential": {"kind": "sphere", "symmetry": "z2"},
    "window": [-2.5, 2.5],
    "flavor": "z2",
    "seed": 4
  })");
}

ErrorCode code_of(const Json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rfh_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config defaults and values") {
  const RunConfig cfg = config_from_json(base_config());
  CHECK(cfg.flavor == Flavor::z2);
  CHECK(cfg.window_lo == -2.5);
  CHECK(cfg.seed == 4);
  CHECK(cfg.n_starts == 200);
  CHECK(cfg.solver.tol == 1e-10);
  CHECK(cfg.solver.collocation_nodes == 64);
  CHECK(cfg.solver.ps_epsilon == 0.1);
  CHECK_FALSE(cfg.perturbation.has_value());
  CHECK_FALSE(cfg.continuation.has_value());
}

TEST_CASE("invalid configs are rejected with a field path") {
  Json j = base_config();
  j["window"] = {2.5, -2.5};
  CHECK(code_of(j) == ErrorCode::ValidationError);

  j = base_config();
  j["foo"] = 1;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("foo"), Error);

  j = base_config();
  j["solver"] = {{"tol", -1.0}};
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("solver.tol"), Error);

  j = base_config();
  j["solver"] = {{"collocation_nodes", 4}};
  CHECK(code_of(j) == ErrorCode::ValidationError);

  j = base_config();
  j["potential"] = {{"kind", "ellipsoid"}, {"params", {{"weights", {1.0, 2.0}}}}};
  CHECK(code_of(j) == ErrorCode::ValidationError);

  j = base_config();
  j["flavor"] = "q";
  CHECK(code_of(j) == ErrorCode::ValidationError);

  const fs::path dir = scratch("bad_json");
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << "{ not json";
  try {
    load_config((dir / "c.json").string());
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), Error);
}

TEST_CASE("report needs the stage artifacts") {
  const fs::path dir = scratch("empty_report");
  fs::create_directories(dir);
  std::ostringstream out;
  try {
    emit_report(dir.string(), out);
    FAIL("expected MissingArtifact");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingArtifact);
  }
}

TEST_CASE("pipeline is deterministic for a fixed seed and round-trips its artifacts") {
  const RunConfig cfg = config_from_json(base_config());
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const Gates ga = run_pipeline(cfg, a.string());
  const Gates gb = run_pipeline(cfg, b.string());
  CHECK(ga.ok());
  CHECK(gb.ok());
  for (const char* name : {"critical_points.json", "boundary.json", "homology.json", "diagnostics.json"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
  }

  const Json crit = Json::parse(slurp(a / "critical_points.json"));
  const Json hom = Json::parse(slurp(a / "homology.json"));
  CHECK(to_json(homology_from_json(hom)) == hom);
  const Json bnd = Json::parse(slurp(a / "boundary.json"));
  CHECK(to_json(complex_from_json(bnd["complex"])) == bnd["complex"]);
  REQUIRE(crit.contains("records"));
  CHECK(to_json(records_from_json(crit["records"])) == crit["records"]);

  std::ostringstream out;
  CHECK_NOTHROW(emit_report(a.string(), out));
  CHECK(fs::exists(a / "staircase.csv"));
  CHECK(out.str().find("degree") != std::string::npos);
}
