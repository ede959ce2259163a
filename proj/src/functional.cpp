#include "rfh/functional.hpp"

namespace rfh {

Vec metric_diagonal(const SpectralModel& model) {
  Vec g(model.real_dim() + 1);
  g.head(model.real_dim()) = model.metric_weights();
  g[model.real_dim()] = 1.0;
  return g;
}

double h_norm_packed(const SpectralModel& model, const Vec& v) {
  return std::sqrt((metric_diagonal(model).array() * v.array().square()).sum());
}

ActionJet action_jet(const SpectralModel& model, const Potential& pot, const StatePoint& z, JetOrder order) {
  check_conforms(model, z);
  const int n = model.real_dim();
  const Vec lam = model.slot_eigenvalues();
  const PotentialJet f = pot.jet(model, z.coeffs, order);
  ActionJet out;
  out.value = 0.5 * (lam.array() * z.coeffs.array().square()).sum() - z.multiplier * f.value;
  if (order == JetOrder::value) return out;
  const Vec w = model.metric_weights();
  out.grad_h.coeffs = ((lam.array() * z.coeffs.array() - z.multiplier * f.grad.array()) / w.array()).matrix();
  out.grad_h.multiplier = -f.value;
  if (order == JetOrder::hessian) {
    Mat h = Mat::Zero(n + 1, n + 1);
    h.topLeftCorner(n, n) = -z.multiplier * f.hess;
    h.diagonal().head(n) += lam;
    h.col(n).head(n) = -f.grad;
    h.row(n).head(n) = -f.grad.transpose();
    out.hess_euclid = std::move(h);
  }
  return out;
}

double action_value(const SpectralModel& model, const Potential& pot, const StatePoint& z) {
  return action_jet(model, pot, z, JetOrder::value).value;
}

StatePoint flow_field(const SpectralModel& model, const Potential& pot, const StatePoint& z) {
  const ActionJet j = action_jet(model, pot, z, JetOrder::gradient);
  return {-j.grad_h.coeffs, -j.grad_h.multiplier};
}

Vec euclid_gradient(const SpectralModel& model, const Potential& pot, const Vec& z) {
  const int n = model.real_dim();
  const PotentialJet f = pot.jet(model, z.head(n), JetOrder::gradient);
  Vec g(n + 1);
  g.head(n) = (model.slot_eigenvalues().array() * z.head(n).array()).matrix() - z[n] * f.grad;
  g[n] = -f.value;
  return g;
}

Vec flow_packed(const SpectralModel& model, const Potential& pot, const Vec& z) {
  return -(euclid_gradient(model, pot, z).array() / metric_diagonal(model).array()).matrix();
}

Mat euclid_hessian(const SpectralModel& model, const Potential& pot, const Vec& z) {
  return action_jet(model, pot, StatePoint::unpack(z)).hess_euclid;
}

Mat flow_jacobian(const SpectralModel& model, const Potential& pot, const Vec& z) {
  const Vec g = metric_diagonal(model);
  return -(g.cwiseInverse().asDiagonal() * euclid_hessian(model, pot, z));
}

}  // namespace rfh
