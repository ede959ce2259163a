#pragma once

#include "rfh/critical.hpp"

namespace rfh {

struct IndexReport {
  int n_neg_hessian = 0;
  int reference_dim = 0;
  int rel_index = 0;
};

/// Relative index against H^- x R: n_neg(Hessian) - (dim H^- + 1), real dimensions.
IndexReport relative_index(const SpectralModel& model, const Potential& pot, const CriticalRecord& rec);

/// Same count from a precomputed inertia; throws DegenerateHessian when the
/// zero count exceeds `allowed_zero`.
IndexReport index_from_inertia(const SpectralModel& model, const Inertia& inertia, int allowed_zero);

}  // namespace rfh
