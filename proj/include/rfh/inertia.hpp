#pragma once

#include "rfh/spectrum.hpp"

namespace rfh {

struct Inertia {
  int neg = 0;
  int zero = 0;
  int pos = 0;
};

/// Sylvester inertia of a symmetric matrix from a Bunch-Kaufman LDL^T
/// factorization. Block eigenvalues with magnitude <= rel_tol * max|A_ij|
/// count as zero.
Inertia symmetric_inertia(const Mat& a, double rel_tol = 1e-10);

}  // namespace rfh
