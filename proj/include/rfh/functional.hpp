#pragma once

#include "rfh/potentials.hpp"
#include "rfh/spectrum.hpp"

namespace rfh {

/// Action value with its H-gradient and Euclidean Hessian over (coeffs, multiplier).
struct ActionJet {
  double value = 0.0;
  StatePoint grad_h;
  Mat hess_euclid;
};

/// I(u, lambda) = 1/2 sum lambda_i a_i^2 - lambda F(u).
ActionJet action_jet(const SpectralModel& model, const Potential& pot, const StatePoint& z,
                     JetOrder order = JetOrder::hessian);
double action_value(const SpectralModel& model, const Potential& pot, const StatePoint& z);

/// Descending flow vector field, equal to -grad_h.
StatePoint flow_field(const SpectralModel& model, const Potential& pot, const StatePoint& z);

/// Packed variants used by the solvers: z = [coeffs; multiplier].
Vec euclid_gradient(const SpectralModel& model, const Potential& pot, const Vec& z);
Vec flow_packed(const SpectralModel& model, const Potential& pot, const Vec& z);
/// Jacobian of flow_packed, i.e. -G^{-1} hess_euclid.
Mat flow_jacobian(const SpectralModel& model, const Potential& pot, const Vec& z);
Mat euclid_hessian(const SpectralModel& model, const Potential& pot, const Vec& z);

/// Diagonal of the H x R metric G = diag(|lambda_i|; 1).
Vec metric_diagonal(const SpectralModel& model);
/// ||v||_H with v packed.
double h_norm_packed(const SpectralModel& model, const Vec& v);

}  // namespace rfh
