#pragma once

#include "rfh/potentials.hpp"

#include <memory>

namespace rfh {

/// Inner minimization over the kernel block of a model with kernel_dim > 0
/// (or an empty kernel, where everything reduces to the plain p-power term).
struct KernelProblem {
  SpectralModel model;
  double p = 3.0;
  int grid_points = 0;
  std::shared_ptr<const FieldSampler> eigen_modes;
  std::shared_ptr<const FieldSampler> kernel_modes;
};

KernelProblem make_kernel_problem(const SpectralModel& model, double p, int grid_points = 0);

struct KernelMinimum {
  Vec v;
  int iterations = 0;
  double gradient_norm = 0.0;
};

/// v(u) = argmin_v K_u(v), K_u(v) = (1/(p+1)) int |u + v|^{p+1}, by damped
/// Newton to gradient norm <= tol. Throws NonConvergence.
KernelMinimum minimize_kernel_part(const KernelProblem& kp, const Vec& u, double tol = 1e-10,
                                   int max_iterations = 100);

/// max_j |int |u+v|^{p-1} (u+v) h_j| over the kernel basis.
double orthogonality_residual(const KernelProblem& kp, const Vec& u, const Vec& v);

struct QJet {
  double value = 0.0;
  Vec grad;
  /// A_uu - A_uv A_vv^{-1} A_vu, the Hessian of the reduced functional.
  Mat hess;
  Vec v;
};

/// Q(u) = K_u(v(u)); the gradient uses the envelope formula
/// <Q'(u), h> = int |u+v|^{p-1} (u+v) h.
QJet q_jet(const KernelProblem& kp, const Vec& u, JetOrder order = JetOrder::gradient);

/// F(u) = Q(u) - 1/(p+1), registered as a custom potential.
class KernelReducedTerm : public CustomTerm {
 public:
  explicit KernelReducedTerm(KernelProblem kp) : kp_(std::move(kp)) {}
  PotentialJet evaluate(const SpectralModel& model, const Vec& u, JetOrder order) const override;
  std::string name() const override { return "kernel_reduced_p_power"; }
  const KernelProblem& problem() const { return kp_; }

 private:
  KernelProblem kp_;
};

/// Custom potential wrapping KernelReducedTerm; Q is even, so the default symmetry is z2.
Potential kernel_reduced_potential(const KernelProblem& kp, Symmetry sym = Symmetry::z2);

}  // namespace rfh
