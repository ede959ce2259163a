#include "rfh/critical.hpp"

#include "rfh/error.hpp"
#include "rfh/grading.hpp"
#include "rfh/parallel.hpp"
#include "rfh/random.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace rfh {

std::string to_string(OrbitType t) {
  switch (t) {
    case OrbitType::isolated: return "isolated";
    case OrbitType::circle: return "circle";
    case OrbitType::pair: return "pair";
  }
  return "isolated";
}

OrbitType orbit_type_from_string(const std::string& name) {
  if (name == "isolated") return OrbitType::isolated;
  if (name == "circle") return OrbitType::circle;
  if (name == "pair") return OrbitType::pair;
  throw Error(ErrorCode::InvalidArgument, "unknown orbit type '" + name + "'");
}

int dominant_label_index(const SpectralModel& model, const Vec& coeffs) {
  const int per = model.slots_per_label();
  int best = 0;
  double best_mass = -1.0;
  for (int l = 0; l < static_cast<int>(model.labels.size()); ++l) {
    const double mass = coeffs.segment(l * per, per).squaredNorm();
    if (mass > best_mass) {
      best_mass = mass;
      best = l;
    }
  }
  return best;
}

namespace {

// Member of the symmetry orbit of z2 closest to z1.
Vec nearest_member(const SpectralModel& model, Symmetry sym, const Vec& z1, const Vec& z2) {
  const int n = model.real_dim();
  switch (sym) {
    case Symmetry::none:
      return z2;
    case Symmetry::z2: {
      Vec flipped = z2;
      flipped.head(n) = -z2.head(n);
      return (z1 - z2).squaredNorm() <= (z1 - flipped).squaredNorm() ? z2 : flipped;
    }
    case Symmetry::s1: {
      if (!model.complex_structure) return z2;
      std::complex<double> acc = 0.0;
      for (int i = 0; i + 1 < n; i += 2) {
        acc += std::conj(std::complex<double>(z2[i], z2[i + 1])) * std::complex<double>(z1[i], z1[i + 1]);
      }
      Vec out = z2;
      out.head(n) = rotate_phase(model, z2.head(n), std::arg(acc));
      return out;
    }
  }
  return z2;
}

struct NewtonResult {
  bool converged = false;
  Vec z;
};

Vec min_norm_solve(const Mat& j, const Vec& rhs) {
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(j.rows(), j.cols());
  cod.setThreshold(1e-9);
  cod.compute(j);
  return cod.solve(rhs);
}

// Damped Newton on the Euclidean gradient, optionally deflated against the
// symmetry orbits of `known`.
NewtonResult deflated_newton(const SpectralModel& model, const Potential& pot, Vec z, double tol, int max_iter,
                             const std::vector<Vec>* known) {
  const Symmetry sym = pot.symmetry();
  auto deflation = [&](const Vec& x, Vec* grad_log) {
    double m = 1.0;
    if (grad_log) grad_log->setZero(x.size());
    if (!known) return m;
    for (const Vec& k : *known) {
      const Vec diff = x - nearest_member(model, sym, x, k);
      const double d2 = std::max(diff.squaredNorm(), 1e-300);
      m *= 1.0 / d2 + 1.0;
      if (grad_log) *grad_log += -2.0 * diff / (d2 * (1.0 + d2));
    }
    return m;
  };

  for (int it = 0; it < max_iter; ++it) {
    const Vec g = euclid_gradient(model, pot, z);
    const double gnorm = g.norm();
    if (!std::isfinite(gnorm)) return {false, z};
    if (gnorm <= tol) return {true, z};
    const Mat h = euclid_hessian(model, pot, z);
    Vec delta = min_norm_solve(h, -g);
    if (!delta.allFinite()) return {false, z};

    Vec grad_log;
    const double m0 = deflation(z, &grad_log);
    if (known && !known->empty()) {
      const double kappa = grad_log.dot(delta);
      if (std::abs(1.0 - kappa) > 1e-8) delta /= (1.0 - kappa);
    }
    const double cap = 10.0 * (1.0 + z.norm());
    if (delta.norm() > cap) delta *= cap / delta.norm();

    const double merit0 = m0 * gnorm;
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving) {
      const Vec trial = z + step * delta;
      const double gt = euclid_gradient(model, pot, trial).norm();
      if (std::isfinite(gt) && deflation(trial, nullptr) * gt < merit0) {
        z = trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return {false, z};
  }
  return {euclid_gradient(model, pot, z).norm() <= tol, z};
}

Vec canonical_circle_point(const SpectralModel& model, const Vec& z) {
  const int n = model.real_dim();
  const int l = dominant_label_index(model, z.head(n));
  const double theta = std::atan2(z[2 * l + 1], z[2 * l]);
  Vec out = z;
  out.head(n) = rotate_phase(model, z.head(n), -theta);
  out[2 * l + 1] = 0.0;
  return out;
}

bool less_record(const CriticalRecord& a, const CriticalRecord& b) {
  if (a.rel_index != b.rel_index) return a.rel_index < b.rel_index;
  if (std::abs(a.action - b.action) > 1e-9) return a.action < b.action;
  const Vec za = a.point.packed();
  const Vec zb = b.point.packed();
  for (int i = 0; i < za.size(); ++i) {
    if (std::abs(za[i] - zb[i]) > 1e-9) return za[i] > zb[i];
  }
  return false;
}

}  // namespace

double orbit_distance(const SpectralModel& model, Symmetry sym, const Vec& z1, const Vec& z2) {
  return (z1 - nearest_member(model, sym, z1, z2)).norm();
}

double critical_residual(const SpectralModel& model, const Potential& pot, const StatePoint& z) {
  return euclid_gradient(model, pot, z.packed()).norm();
}

std::optional<Vec> newton_polish(const SpectralModel& model, const Potential& pot, const Vec& z0, double tol,
                                 int max_iterations) {
  NewtonResult r = deflated_newton(model, pot, z0, tol, max_iterations, nullptr);
  if (!r.converged) return std::nullopt;
  return r.z;
}

CriticalRecord classify_point(const SpectralModel& model, const Potential& pot, const Vec& z_in) {
  const int n = model.real_dim();
  Vec z = z_in;
  const Mat h = euclid_hessian(model, pot, z);
  CriticalRecord rec;
  rec.inertia = symmetric_inertia(h);
  rec.orbit_type = pot.symmetry() == Symmetry::z2 ? OrbitType::pair : OrbitType::isolated;

  if (model.complex_structure && pot.symmetry() == Symmetry::s1 && rec.inertia.zero == 1) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(h);
    int k = 0;
    eig.eigenvalues().cwiseAbs().minCoeff(&k);
    Vec jz = Vec::Zero(n + 1);
    jz.head(n) = phase_generator(model, z.head(n));
    if (jz.norm() > 0) {
      const double cosine = std::abs(eig.eigenvectors().col(k).dot(jz)) / jz.norm();
      if (cosine >= 0.99) {
        rec.orbit_type = OrbitType::circle;
        z = canonical_circle_point(model, z);
      }
    }
  }
  rec.point = StatePoint::unpack(z);
  rec.action = action_value(model, pot, rec.point);
  rec.residual = critical_residual(model, pot, rec.point);
  const int allowed = rec.orbit_type == OrbitType::circle ? 1 : rec.inertia.zero;
  rec.rel_index = index_from_inertia(model, rec.inertia, allowed).rel_index;
  return rec;
}

std::vector<CriticalRecord> find_critical_points(const SpectralModel& model, const Potential& pot,
                                                 const CriticalSearch& search) {
  if (!(search.window_lo < search.window_hi)) throw Error(ErrorCode::InvalidArgument, "window must satisfy a < b");
  if (search.n_starts < 1) throw Error(ErrorCode::InvalidArgument, "n_starts must be >= 1");
  if (!(search.tol > 0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");

  const int n = model.real_dim();
  const int labels = static_cast<int>(model.labels.size());
  const int per = model.slots_per_label();
  const Symmetry sym = pot.symmetry();
  constexpr int kBatch = 8;

  std::vector<Vec> known;
  for (int first = 0; first < search.n_starts; first += kBatch) {
    const int count = std::min(kBatch, search.n_starts - first);
    std::vector<std::optional<Vec>> found(count);
    const std::vector<Vec> snapshot = known;
    parallel_for(count, [&](std::size_t b) {
      const int start = first + static_cast<int>(b);
      Rng rng = make_rng(search.seed, static_cast<std::uint64_t>(start));
      Vec d = random_gaussian(rng, n);
      const int boost = static_cast<int>(random_uniform(rng, 0.0, labels)) % labels;
      d.segment(boost * per, per) += 4.0 * random_gaussian(rng, per);
      d /= d.norm();
      double r = 0.0;
      try {
        r = radial_root(pot, model, d);
      } catch (const Error&) {
        return;
      }
      const Vec u = r * d;
      const double radial = pot.jet(model, u, JetOrder::gradient).grad.dot(u);
      const double target = random_uniform(rng, search.window_lo, search.window_hi);
      Vec z(n + 1);
      z.head(n) = u;
      z[n] = radial != 0.0 ? 2.0 * target / radial : target;
      NewtonResult res = deflated_newton(model, pot, z, 1e-3 * std::sqrt(search.tol), search.max_iterations,
                                         &snapshot);
      if (!res.converged) return;
      NewtonResult polished = deflated_newton(model, pot, res.z, search.tol, 20, nullptr);
      if (polished.converged) found[b] = polished.z;
    });
    for (const auto& f : found) {
      if (!f) continue;
      bool duplicate = false;
      for (const Vec& k : known) {
        if (orbit_distance(model, sym, *f, k) <= search.dedup_radius) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) known.push_back(*f);
    }
  }

  std::vector<CriticalRecord> out;
  std::vector<std::vector<CriticalRecord>> groups;
  for (const Vec& z : known) {
    std::vector<CriticalRecord> group{classify_point(model, pot, z)};
    if (sym == Symmetry::z2) {
      Vec mirror = z;
      mirror.head(n) = -z.head(n);
      group.push_back(classify_point(model, pot, mirror));
    }
    const double action = group.front().action;
    if (action < search.window_lo || action > search.window_hi) continue;
    if (group.front().residual > search.tol) continue;
    std::sort(group.begin(), group.end(), less_record);
    groups.push_back(std::move(group));
  }
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return less_record(a.front(), b.front()); });
  int next_id = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (auto& rec : groups[g]) {
      rec.id = "z" + std::to_string(next_id++);
      rec.orbit_id = "o" + std::to_string(g);
      out.push_back(rec);
    }
  }
  std::stable_sort(out.begin(), out.end(), less_record);
  return out;
}

bool is_morse(const std::vector<CriticalRecord>& records) {
  for (const auto& r : records) {
    const int mandated = r.orbit_type == OrbitType::circle ? 1 : 0;
    if (r.inertia.zero != mandated) return false;
  }
  return true;
}

MorseOutcome ensure_morse(const SpectralModel& model, const Potential& pot, std::vector<CriticalRecord> records,
                          const CriticalSearch& search) {
  if (is_morse(records)) return {pot, std::move(records), 0.0};
  for (double strength : {1e-8, 1e-6, 1e-4}) {
    Potential perturbed = perturb_generic(pot, model, strength, search.seed ^ 0x6d6f727365ULL);
    auto recs = find_critical_points(model, perturbed, search);
    if (is_morse(recs)) return {perturbed, std::move(recs), strength};
  }
  throw Error(ErrorCode::PersistentDegeneracy, "critical set stays degenerate after 3 perturbation escalations");
}

BrokenCircles break_all_circles(const SpectralModel& model, const Potential& pot,
                                std::vector<CriticalRecord> circles, double strength, double tol) {
  Potential perturbed = pot;
  for (const auto& c : circles) {
    perturbed = break_symmetry(perturbed.with_symmetry(Symmetry::s1), model, c, strength);
  }
  perturbed = perturbed.with_symmetry(Symmetry::none);

  BrokenCircles out{perturbed, {}, {}};
  const int n = model.real_dim();
  for (auto& c : circles) {
    std::vector<CriticalRecord> kids;
    for (double phase : {0.0, std::acos(-1.0)}) {
      Vec z0 = c.point.packed();
      z0.head(n) = rotate_phase(model, z0.head(n), phase);
      auto z = newton_polish(model, perturbed, z0, tol);
      if (!z) throw Error(ErrorCode::NewtonStagnation, "child of circle " + c.id + " not found");
      kids.push_back(classify_point(model, perturbed, *z));
    }
    if (kids[0].rel_index > kids[1].rel_index) std::swap(kids[0], kids[1]);
    if (kids[0].rel_index == kids[1].rel_index) {
      throw Error(ErrorCode::DegenerateHessian, "children of circle " + c.id + " share an index");
    }
    kids[0].id = c.id + "-";
    kids[1].id = c.id + "+";
    for (auto& k : kids) k.orbit_id = c.id;
    c.broken_children = std::make_pair(kids[0].id, kids[1].id);
    out.children.push_back(kids[0]);
    out.children.push_back(kids[1]);
  }
  out.circles = std::move(circles);
  return out;
}

}  // namespace rfh
