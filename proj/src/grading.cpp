#include "rfh/grading.hpp"

#include "rfh/error.hpp"

namespace rfh {

IndexReport index_from_inertia(const SpectralModel& model, const Inertia& inertia, int allowed_zero) {
  if (inertia.zero > allowed_zero) {
    throw Error(ErrorCode::DegenerateHessian,
                "Hessian has " + std::to_string(inertia.zero) + " zero modes, " + std::to_string(allowed_zero) +
                    " allowed");
  }
  IndexReport rep;
  rep.n_neg_hessian = inertia.neg;
  rep.reference_dim = model.negative_dim() + 1;
  rep.rel_index = rep.n_neg_hessian - rep.reference_dim;
  return rep;
}

IndexReport relative_index(const SpectralModel& model, const Potential& pot, const CriticalRecord& rec) {
  const Inertia inertia = symmetric_inertia(euclid_hessian(model, pot, rec.point.packed()));
  return index_from_inertia(model, inertia, rec.orbit_type == OrbitType::circle ? 1 : 0);
}

}  // namespace rfh
