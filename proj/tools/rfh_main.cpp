#include "rfh/error.hpp"
#include "rfh/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

int exit_code_for(rfh::ErrorCode code) {
  using rfh::ErrorCode;
  switch (code) {
    case ErrorCode::ValidationError:
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::MissingArtifact:
      return 2;
    case ErrorCode::BoundarySquareNonzero:
    case ErrorCode::ChainMapViolation:
      return 3;
    default:
      return 4;
  }
}

void print_homology(const rfh::HomologyTable& h) {
  std::cout << "homology (" << rfh::to_string(h.flavor) << ")";
  for (const auto& [k, r] : h.ranks) std::cout << "  H" << k << "=" << r;
  std::cout << "\ninterior degrees:";
  for (int k : h.interior_degrees) std::cout << ' ' << k;
  std::cout << '\n';
}

int report_gates(const rfh::Gates& g) {
  for (const auto& f : g.failures) std::cerr << "gate failed: " << f << '\n';
  return g.ok() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rabinowitz-Floer style homology of truncated spectral models"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  const char* names[] = {"spectrum", "critical", "complex", "homology", "continuation", "report"};
  const char* help[] = {"build the truncated model and list its spectrum",
                        "locate critical points in the action window",
                        "assemble the chain complex and write all artifacts",
                        "homology ranks (reuses boundary.json in --out when present)",
                        "continuation maps along a homotopy schedule",
                        "print the generator/rank table and write plot data"};
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    auto* opt = sub->add_option("--config", config_path, "JSON run configuration");
    if (std::string(names[i]) != "report") opt->required();
    sub->add_option("--out", out_dir, "artifact directory (default: output_dir from the config)");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (command == "report") {
      if (out_dir.empty()) {
        if (config_path.empty()) throw rfh::Error(rfh::ErrorCode::ValidationError, "report needs --out or --config");
        out_dir = rfh::load_config(config_path).output_dir;
      }
      rfh::emit_report(out_dir, std::cout);
      return 0;
    }

    const rfh::RunConfig cfg = rfh::load_config(config_path);
    if (out_dir.empty()) out_dir = cfg.output_dir;
    rfh::write_metadata(out_dir, command, config_path);

    if (command == "spectrum") {
      const rfh::SpectralModel model = rfh::make_model(cfg);
      rfh::write_json(out_dir, "spectrum.json", rfh::to_json(model));
      std::cout << "real dimension " << model.real_dim() << ", negative dimension " << model.negative_dim()
                << ", kernel " << model.kernel_dim << '\n';
      for (std::size_t i = 0; i < model.labels.size(); ++i) {
        std::cout << model.labels[i] << '\t' << model.eigenvalues[i] << '\n';
      }
      return 0;
    }

    if (command == "critical") {
      const rfh::SpectralModel model = rfh::make_model(cfg);
      const rfh::Potential pot = rfh::make_potential(cfg, model);
      rfh::CriticalSearch search;
      search.window_lo = cfg.window_lo;
      search.window_hi = cfg.window_hi;
      search.n_starts = cfg.n_starts;
      search.seed = cfg.seed;
      search.tol = cfg.solver.tol;
      const auto records = rfh::find_critical_points(model, pot, search);
      rfh::Json j;
      j["model"] = rfh::to_json(model);
      j["potential"] = rfh::to_json(pot);
      j["records"] = rfh::to_json(records);
      j["generators"] = rfh::to_json(records);
      rfh::write_json(out_dir, "critical_points.json", j);
      for (const auto& r : records) {
        std::cout << r.id << "\tindex " << r.rel_index << "\taction " << r.action << "\t" << rfh::to_string(r.orbit_type)
                  << '\n';
      }
      return 0;
    }

    if (command == "homology") {
      const auto boundary = std::filesystem::path(out_dir) / "boundary.json";
      if (std::filesystem::exists(boundary)) {
        std::ifstream in(boundary);
        const rfh::ChainComplexData cc = rfh::complex_from_json(rfh::Json::parse(in).at("complex"));
        rfh::verify_boundary_square(cc);
        const rfh::HomologyTable h = rfh::homology_z2(cc);
        rfh::write_json(out_dir, "homology.json", rfh::to_json(h));
        print_homology(h);
        return 0;
      }
    }

    if (command == "complex" || command == "homology") {
      const rfh::Gates gates = rfh::run_pipeline(cfg, out_dir);
      std::ifstream in(std::filesystem::path(out_dir) / "homology.json");
      print_homology(rfh::homology_from_json(rfh::Json::parse(in)));
      return report_gates(gates);
    }

    // continuation
    const rfh::ContinuationRun run = rfh::run_continuation(cfg);
    rfh::write_json(out_dir, "continuation.json", rfh::continuation_json(run));
    std::cout << run.steps.size() << " steps, chain maps " << (run.all_chain_maps ? "OK" : "FAILED")
              << ", induced map bijective on interior: " << (run.composite_induced.bijective_on_interior ? "yes" : "no")
              << '\n';
    rfh::Gates gates;
    for (const auto& c : run.complexes) {
      gates.boundary_square = gates.boundary_square && c.gates.boundary_square;
      gates.residuals = gates.residuals && c.gates.residuals;
      gates.ps_bounds = gates.ps_bounds && c.gates.ps_bounds;
      for (const auto& f : c.gates.failures) gates.failures.push_back(f);
    }
    const int rc = report_gates(gates);
    if (!run.all_chain_maps || !run.composite_induced.bijective_on_interior) {
      std::cerr << "gate failed: continuation map\n";
      return 3;
    }
    return rc;
  } catch (const rfh::Error& e) {
    std::cerr << e.what() << '\n';
    const int code = exit_code_for(e.code());
    if (!out_dir.empty() && command != "report") {
      try {
        rfh::write_json(out_dir, "failure.json",
                        rfh::Json{{"command", command}, {"code", std::string(rfh::to_string(e.code()))},
                                  {"message", e.what()}, {"exit_code", code}});
      } catch (const std::exception&) {
      }
    }
    return code;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 4;
  }
}
