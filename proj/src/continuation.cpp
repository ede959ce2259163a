#include "rfh/continuation.hpp"

#include "rfh/error.hpp"
#include "rfh/functional.hpp"
#include "rfh/parallel.hpp"
#include "rfh/random.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

namespace rfh {

HomotopySchedule make_schedule(const SpectralModel& model, const Potential& f1, const Potential& f2, double delta,
                               std::uint64_t sample_seed, int samples, double cap) {
  if (!(delta > 0)) throw Error(ErrorCode::InvalidArgument, "schedule delta must be positive");
  const StarshapeReport r1 = check_starshape(f1, model, 64, sample_seed);
  const StarshapeReport r2 = check_starshape(f2, model, 64, sample_seed + 1);
  HomotopySchedule schedule;
  schedule.f1 = f1;
  schedule.f2 = f2;
  schedule.delta = delta;
  schedule.radius = 2.0 * std::max(r1.max_radius, r2.max_radius);
  schedule.sup_difference = sampled_sup_difference(f1, f2, model, schedule.radius, samples, sample_seed);
  if (!std::isfinite(schedule.sup_difference) || schedule.sup_difference > cap) {
    throw Error(ErrorCode::UnboundedDifference,
                "sampled |F1 - F2| reaches " + std::to_string(schedule.sup_difference));
  }
  // the blend is linear in s, so a uniform step of width h changes F by h * sup|F1 - F2|
  const int n = std::max(1, static_cast<int>(std::ceil(schedule.sup_difference / delta - 1e-12)));
  for (int j = 0; j <= n; ++j) {
    const double s = static_cast<double>(j) / n;
    schedule.s_values.push_back(s);
    if (j == 0) {
      schedule.steps.push_back(f1);
    } else if (j == n) {
      schedule.steps.push_back(f2);
    } else {
      schedule.steps.push_back(Potential::linear_blend(f1, f2, s));
    }
  }
  return schedule;
}

double eta(double t) { return smoothstep(t).v; }

std::vector<OrbitRecord> find_nonautonomous_orbits(const SpectralModel& model, const Potential& f_from,
                                                   const Potential& f_to, const CriticalRecord& source,
                                                   const CriticalRecord& target, const NonautonomousSearch& search) {
  if (source.rel_index != target.rel_index) {
    throw Error(ErrorCode::IndexMismatch, source.id + " has index " + std::to_string(source.rel_index) + ", " +
                                              target.id + " has " + std::to_string(target.rel_index));
  }
  const int dim = model.real_dim() + 1;
  const Vec zs = source.point.packed();
  const Vec zt = target.point.packed();
  const Linearization ls = linearize(model, f_from, zs);
  const Linearization lt = linearize(model, f_to, zt);
  const double rate = std::min(ls.slowest_unstable_rate(), lt.slowest_stable_rate());
  if (!std::isfinite(rate) || rate <= 0) {
    throw Error(ErrorCode::IndexMismatch, "endpoints lack unstable/stable directions");
  }

  auto field_at = [&](double t) {
    const double e = eta(t);
    if (e <= 0.0) return f_from;
    if (e >= 1.0) return f_to;
    return Potential::linear_blend(f_from, f_to, e);
  };

  // eta is only C^2 at t = 0 and t = 1, so those are segment breakpoints
  SegmentedBvp problem;
  problem.dim = dim;
  problem.grid.m_tail = search.m;
  problem.grid.m_mid = std::max(8, search.m / 2);
  problem.grid.tail_length = std::log(1.0 / search.decay) / rate;
  problem.grid.beta = search.beta;
  problem.field = [&](double t, const Vec& z) { return flow_packed(model, field_at(t), z); };
  problem.jacobian = [&](double t, const Vec& z) { return flow_jacobian(model, field_at(t), z); };
  problem.source = {zs, ls.unstable_rows()};
  problem.target = {zt, lt.stable_rows()};

  const Mat basis = ls.unstable_basis();
  const std::vector<double> node_times = segmented_times(problem.grid);
  const int total = problem.grid.total();
  const double spread = std::max(0.5 * (zs - zt).head(dim - 1).norm(), 0.1);

  std::vector<std::optional<SegmentedSolution>> results(search.n_starts);
  parallel_for(static_cast<std::size_t>(search.n_starts), [&](std::size_t i) {
    // start 0 is the direct interpolation; later starts bend through the source's unstable directions
    Vec p1 = 0.5 * (zs + zt);
    if (i > 0 && basis.cols() > 0) {
      Rng rng = make_rng(search.seed, i);
      Vec v = basis * random_gaussian(rng, static_cast<int>(basis.cols()));
      if (v.norm() > 0) v /= v.norm();
      p1 += random_uniform(rng, 0.3, 1.5) * spread * v;
    }
    Mat init(total, dim);
    for (int j = 0; j < total; ++j) {
      const double sigma = 1.0 / (1.0 + std::exp(-rate * (node_times[j] - 0.5)));
      Vec z = (1 - sigma) * (1 - sigma) * zs + 2 * sigma * (1 - sigma) * p1 + sigma * sigma * zt;
      z[dim - 1] = (1 - sigma) * zs[dim - 1] + sigma * zt[dim - 1];
      init.row(j) = z.transpose();
    }
    init.row(0) = zs.transpose();
    init.row(total - 1) = zt.transpose();
    SegmentedSolution sol =
        solve_segmented_bvp_refined(problem, init, search.newton, search.tol, search.refine_levels);
    if (sol.converged) results[i] = std::move(sol);
  });

  std::vector<OrbitRecord> orbits;
  std::vector<Mat> accepted;
  for (const auto& r : results) {
    if (!r || !(r->defect <= search.tol)) continue;
    const Mat& nodes = r->nodes;
    const int m = r->grid.total();
    const double end_err =
        std::max((nodes.row(0).transpose() - zs).norm(), (nodes.row(m - 1).transpose() - zt).norm());
    if (end_err > std::max(search.tol, 1e3 * search.decay)) continue;
    Mat probe(total, dim);
    for (int j = 0; j < total; ++j) probe.row(j) = interpolate_segmented(r->grid, nodes, node_times[j]).transpose();
    const bool duplicate = std::any_of(accepted.begin(), accepted.end(), [&](const Mat& a) {
      return (a - probe).cwiseAbs().maxCoeff() <= search.dedup;
    });
    if (duplicate) continue;
    accepted.push_back(probe);
    OrbitRecord orbit;
    orbit.source_id = source.id;
    orbit.target_id = target.id;
    // piecewise grid: the record carries explicit times and no single stretched grid
    orbit.grid.m = 0;
    const std::vector<double> times = segmented_times(r->grid);
    for (int j = 0; j < m; ++j) {
      orbit.times.push_back(times[j]);
      orbit.nodes.push_back(StatePoint::unpack(nodes.row(j).transpose()));
      orbit.action_profile.push_back(action_value(model, field_at(times[j]), orbit.nodes.back()));
    }
    orbit.residual = r->defect;
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

ContinuationMap build_phi(const ChainComplexData& from, const ChainComplexData& to, const OrbitCounts& counts) {
  ContinuationMap map;
  std::set<int> degrees;
  for (const auto& [k, g] : from.generators) degrees.insert(k);
  for (const auto& [k, g] : to.generators) degrees.insert(k);
  for (int k : degrees) {
    GF2Matrix phi(to.count(k), from.count(k));
    for (int c = 0; c < phi.cols(); ++c) {
      for (int r = 0; r < phi.rows(); ++r) {
        const std::string& src = from.generators.at(k)[c];
        const std::string& tgt = to.generators.at(k)[r];
        auto it = counts.find({src, tgt});
        if (it == counts.end()) throw Error(ErrorCode::MissingCounts, "no continuation count " + src + " -> " + tgt);
        phi.set(r, c, it->second % 2 != 0);
        map.provenance.push_back(src + "->" + tgt + ":" + std::to_string(it->second));
      }
    }
    map.phi[k] = phi;
  }
  return map;
}

namespace {

GF2Matrix phi_at(const ContinuationMap& map, const ChainComplexData& from, const ChainComplexData& to, int k) {
  auto it = map.phi.find(k);
  if (it != map.phi.end()) return it->second;
  return GF2Matrix(to.count(k), from.count(k));
}

std::optional<int> first_violation(const ContinuationMap& map, const ChainComplexData& from,
                                   const ChainComplexData& to) {
  for (const auto& [k, phi] : map.phi) {
    const GF2Matrix lhs = to.boundary_at(k) * phi;
    const GF2Matrix rhs = phi_at(map, from, to, k - 1) * from.boundary_at(k);
    if (!(lhs == rhs)) return k;
  }
  return std::nullopt;
}

}  // namespace

bool is_chain_map(const ContinuationMap& map, const ChainComplexData& from, const ChainComplexData& to) {
  return !first_violation(map, from, to).has_value();
}

void verify_chain_map(const ContinuationMap& map, const ChainComplexData& from, const ChainComplexData& to) {
  if (auto k = first_violation(map, from, to)) {
    throw Error(ErrorCode::ChainMapViolation, "d phi != phi d in degree " + std::to_string(*k));
  }
}

ContinuationMap compose(const ContinuationMap& first, const ContinuationMap& second) {
  ContinuationMap out;
  for (const auto& [k, a] : first.phi) {
    auto it = second.phi.find(k);
    if (it == second.phi.end()) continue;
    out.phi[k] = it->second * a;
  }
  out.provenance = first.provenance;
  out.provenance.insert(out.provenance.end(), second.provenance.begin(), second.provenance.end());
  return out;
}

InducedMapReport induced_map(const ContinuationMap& map, const ChainComplexData& from, const ChainComplexData& to) {
  InducedMapReport report;
  const HomologyTable h_from = homology_z2(from);
  const HomologyTable h_to = homology_z2(to);
  std::set<int> degrees;
  for (const auto& [k, r] : h_from.ranks) degrees.insert(k);
  for (const auto& [k, r] : h_to.ranks) degrees.insert(k);
  for (int k : degrees) {
    report.source_rank[k] = h_from.ranks.count(k) ? h_from.ranks.at(k) : 0;
    report.target_rank[k] = h_to.ranks.count(k) ? h_to.ranks.at(k) : 0;
    if (from.count(k) == 0 || to.count(k) == 0) {
      report.image_rank[k] = 0;
      continue;
    }
    const GF2Matrix cycles = from.boundary_at(k).kernel_basis();
    const GF2Matrix b_to = to.count(k + 1) > 0 ? to.boundary_at(k + 1) : GF2Matrix(to.count(k), 0);
    const GF2Matrix image = phi_at(map, from, to, k) * cycles;
    report.image_rank[k] = image.hconcat(b_to).rank() - b_to.rank();
  }
  std::set<int> interior_to(h_to.interior_degrees.begin(), h_to.interior_degrees.end());
  for (int k : h_from.interior_degrees) {
    if (interior_to.count(k)) report.interior_degrees.push_back(k);
  }
  report.bijective_on_interior = true;
  for (int k : report.interior_degrees) {
    const int img = report.image_rank[k];
    if (img != report.source_rank[k] || img != report.target_rank[k]) report.bijective_on_interior = false;
  }
  return report;
}

}  // namespace rfh
