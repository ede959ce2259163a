#include "rfh/kernel_reduction.hpp"

#include "rfh/error.hpp"

#include <cmath>

namespace rfh {

KernelProblem make_kernel_problem(const SpectralModel& model, double p, int grid_points) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "kernel reduction needs p > 1");
  if (model.complex_structure) throw Error(ErrorCode::InvalidArgument, "kernel reduction expects a real model");
  KernelProblem kp;
  kp.model = model;
  kp.p = p;
  kp.grid_points = grid_points > 0 ? grid_points : default_grid_points(model);
  if (kp.grid_points < 4.0 * model.max_frequency()) {
    throw Error(ErrorCode::QuadratureUnderresolved, "kernel quadrature grid below 4 x max frequency");
  }
  kp.eigen_modes = std::make_shared<FieldSampler>(sample_modes(model, kp.grid_points, false));
  if (model.kernel_dim > 0) {
    kp.kernel_modes = std::make_shared<FieldSampler>(sample_modes(model, kp.grid_points, true));
  }
  return kp;
}

namespace {

struct Field {
  Vec w;       // u + v on the grid
  Vec weight;  // quadrature weights
};

Field combined(const KernelProblem& kp, const Vec& u, const Vec& v) {
  Field f;
  f.weight = kp.eigen_modes->weights;
  f.w = kp.eigen_modes->channels[0] * u;
  if (kp.model.kernel_dim > 0) f.w += kp.kernel_modes->channels[0] * v;
  return f;
}

double k_value(const KernelProblem& kp, const Field& f) {
  return f.weight.dot(f.w.cwiseAbs().array().pow(kp.p + 1.0).matrix()) / (kp.p + 1.0);
}

/// weight * |w|^{p-1} w, the density of the first variation.
Vec first_density(const KernelProblem& kp, const Field& f) {
  return (f.weight.array() * f.w.cwiseAbs().array().pow(kp.p - 1.0) * f.w.array()).matrix();
}

/// weight * p |w|^{p-1}, the density of the second variation.
Vec second_density(const KernelProblem& kp, const Field& f) {
  return (f.weight.array() * kp.p * f.w.cwiseAbs().array().pow(kp.p - 1.0)).matrix();
}

}  // namespace

KernelMinimum minimize_kernel_part(const KernelProblem& kp, const Vec& u, double tol, int max_iterations) {
  KernelMinimum out;
  const int kd = kp.model.kernel_dim;
  out.v = Vec::Zero(kd);
  if (kd == 0 || u.norm() == 0.0) return out;
  const Mat& basis = kp.kernel_modes->channels[0];
  Field f = combined(kp, u, out.v);
  double value = k_value(kp, f);
  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it;
    const Vec g = basis.transpose() * first_density(kp, f);
    out.gradient_norm = g.norm();
    if (out.gradient_norm <= tol) return out;
    Mat h = basis.transpose() * second_density(kp, f).asDiagonal() * basis;
    // tiny shift keeps the solve defined where |w| vanishes on large sets
    h.diagonal().array() += 1e-14 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
    const Vec step = h.ldlt().solve(-g);
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      const Vec trial = out.v + t * step;
      const Field ft = combined(kp, u, trial);
      const double vt = k_value(kp, ft);
      if (vt <= value + 1e-4 * t * g.dot(step) || (halving > 0 && std::abs(vt - value) < 1e-15 * std::abs(value))) {
        out.v = trial;
        f = ft;
        value = vt;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  const Vec g = basis.transpose() * first_density(kp, f);
  out.gradient_norm = g.norm();
  if (out.gradient_norm > tol) {
    throw Error(ErrorCode::NonConvergence,
                "kernel minimization stalled at gradient norm " + std::to_string(out.gradient_norm));
  }
  return out;
}

double orthogonality_residual(const KernelProblem& kp, const Vec& u, const Vec& v) {
  if (kp.model.kernel_dim == 0) return 0.0;
  const Field f = combined(kp, u, v);
  return (kp.kernel_modes->channels[0].transpose() * first_density(kp, f)).cwiseAbs().maxCoeff();
}

QJet q_jet(const KernelProblem& kp, const Vec& u, JetOrder order) {
  QJet out;
  out.v = minimize_kernel_part(kp, u).v;
  const Field f = combined(kp, u, out.v);
  out.value = k_value(kp, f);
  if (order == JetOrder::value) return out;
  const Mat& eb = kp.eigen_modes->channels[0];
  out.grad = eb.transpose() * first_density(kp, f);
  if (order != JetOrder::hessian) return out;
  const Vec d2 = second_density(kp, f);
  out.hess = eb.transpose() * d2.asDiagonal() * eb;
  if (kp.model.kernel_dim > 0) {
    const Mat& kb = kp.kernel_modes->channels[0];
    const Mat a_uv = eb.transpose() * d2.asDiagonal() * kb;
    const Mat a_vv = kb.transpose() * d2.asDiagonal() * kb;
    // implicit differentiation of the first-order condition in v
    out.hess -= a_uv * a_vv.completeOrthogonalDecomposition().solve(a_uv.transpose());
  }
  return out;
}

PotentialJet KernelReducedTerm::evaluate(const SpectralModel& model, const Vec& u, JetOrder order) const {
  if (u.size() != kp_.model.real_dim() || model.real_dim() != kp_.model.real_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "kernel-reduced potential used with a different model");
  }
  const QJet q = q_jet(kp_, u, order);
  PotentialJet out;
  out.value = q.value - 1.0 / (kp_.p + 1.0);
  out.grad = q.grad;
  out.hess = q.hess;
  return out;
}

Potential kernel_reduced_potential(const KernelProblem& kp, Symmetry sym) {
  return Potential::custom(std::make_shared<KernelReducedTerm>(kp), sym);
}

}  // namespace rfh
