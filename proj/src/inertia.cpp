#include "rfh/inertia.hpp"

#include <cmath>

namespace rfh {

namespace {

void symmetric_swap(Mat& a, int i, int j) {
  if (i == j) return;
  a.row(i).swap(a.row(j));
  a.col(i).swap(a.col(j));
}

void classify(double ev, double tol, Inertia& out) {
  if (std::abs(ev) <= tol) {
    ++out.zero;
  } else if (ev < 0) {
    ++out.neg;
  } else {
    ++out.pos;
  }
}

}  // namespace

Inertia symmetric_inertia(const Mat& input, double rel_tol) {
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  const int n = static_cast<int>(input.rows());
  Mat a = 0.5 * (input + input.transpose());
  const double scale = a.cwiseAbs().maxCoeff();
  const double tol = rel_tol * (scale > 0 ? scale : 1.0);
  Inertia out;

  int k = 0;
  while (k < n) {
    const double absakk = std::abs(a(k, k));
    int imax = k;
    double colmax = 0.0;
    if (k + 1 < n) colmax = a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&imax), imax += k + 1;

    int block = 1;
    if (std::max(absakk, colmax) == 0.0) {
      ++out.zero;
      ++k;
      continue;
    }
    if (absakk < alpha * colmax) {
      double rowmax = 0.0;
      for (int j = k; j < n; ++j) {
        if (j != imax) rowmax = std::max(rowmax, std::abs(a(imax, j)));
      }
      if (absakk >= alpha * colmax * (colmax / rowmax)) {
        // keep the 1x1 pivot at k
      } else if (std::abs(a(imax, imax)) >= alpha * rowmax) {
        symmetric_swap(a, k, imax);
      } else {
        symmetric_swap(a, k + 1, imax);
        block = 2;
      }
    }

    const int rest = n - k - block;
    if (block == 1) {
      const double d = a(k, k);
      classify(d, tol, out);
      if (rest > 0) {
        const Vec l = a.col(k).tail(rest) / d;
        a.bottomRightCorner(rest, rest).noalias() -= l * a.row(k).tail(rest);
      }
    } else {
      const Eigen::Matrix2d d = a.block(k, k, 2, 2);
      const double mean = 0.5 * (d(0, 0) + d(1, 1));
      const double rad = std::hypot(0.5 * (d(0, 0) - d(1, 1)), d(0, 1));
      classify(mean - rad, tol, out);
      classify(mean + rad, tol, out);
      if (rest > 0) {
        const Mat c = a.block(k + 2, k, rest, 2);
        const Mat l = c * d.inverse();
        a.bottomRightCorner(rest, rest).noalias() -= l * c.transpose();
      }
    }
    k += block;
  }
  return out;
}

}  // namespace rfh
