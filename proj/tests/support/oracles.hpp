#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's solvers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Bits = std::vector<std::vector<int>>;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Vec gaussian(std::mt19937_64& g, int n) {
  std::normal_distribution<double> d(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = d(g);
  return v;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// Naive Gaussian elimination over Z2 on int entries.
inline int gf2_rank(Bits m) {
  int rank = 0;
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r) {
      if (m[r][c] & 1) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(m[pivot], m[rank]);
    for (int r = 0; r < rows; ++r) {
      if (r != rank && (m[r][c] & 1)) {
        for (int k = 0; k < cols; ++k) m[r][k] ^= m[rank][k];
      }
    }
    ++rank;
  }
  return rank;
}

/// Basis of {x : m x = 0} over Z2 as column vectors, by naive row reduction.
inline std::vector<std::vector<int>> gf2_kernel(Bits m, int cols) {
  const int rows = static_cast<int>(m.size());
  std::vector<int> pivot_col;
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r) {
      if (m[r][c] & 1) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(m[pivot], m[rank]);
    for (int r = 0; r < rows; ++r) {
      if (r != rank && (m[r][c] & 1)) {
        for (int k = 0; k < cols; ++k) m[r][k] ^= m[rank][k];
      }
    }
    pivot_col.push_back(c);
    ++rank;
  }
  std::vector<std::vector<int>> basis;
  for (int free = 0; free < cols; ++free) {
    if (std::find(pivot_col.begin(), pivot_col.end(), free) != pivot_col.end()) continue;
    std::vector<int> x(cols, 0);
    x[free] = 1;
    for (int r = 0; r < rank; ++r) x[pivot_col[r]] = m[r][free] & 1;
    basis.push_back(x);
  }
  return basis;
}

inline Bits gf2_mul(const Bits& a, const Bits& b) {
  const int n = static_cast<int>(a.size());
  const int k = static_cast<int>(b.size());
  const int m = k ? static_cast<int>(b[0].size()) : 0;
  Bits out(n, std::vector<int>(m, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      int s = 0;
      for (int l = 0; l < k; ++l) s ^= (a[i][l] & b[l][j]);
      out[i][j] = s;
    }
  return out;
}

inline Bits random_bits(std::mt19937_64& g, int rows, int cols, double density = 0.5) {
  std::bernoulli_distribution d(density);
  Bits m(rows, std::vector<int>(cols));
  for (auto& row : m)
    for (auto& x : row) x = d(g) ? 1 : 0;
  return m;
}

/// Central difference of a scalar function along v.
inline double directional_fd(const std::function<double(const Vec&)>& f, const Vec& x, const Vec& v, double h) {
  return (f(x + h * v) - f(x - h * v)) / (2.0 * h);
}

/// Central-difference Jacobian of a vector function, column by column.
inline Mat jacobian_fd(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
  const Vec f0 = f(x);
  Mat j(f0.size(), x.size());
  for (int c = 0; c < x.size(); ++c) {
    Vec e = Vec::Zero(x.size());
    e[c] = h;
    j.col(c) = (f(x + e) - f(x - e)) / (2.0 * h);
  }
  return j;
}

/// Eigenvalue sign counts of a symmetric matrix by a full eigensolve.
struct Counts {
  int neg = 0, zero = 0, pos = 0;
};

inline Counts eigen_counts(const Mat& a, double tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  Counts c;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double e = es.eigenvalues()[i];
    if (std::abs(e) <= tol * scale) {
      ++c.zero;
    } else if (e < 0) {
      ++c.neg;
    } else {
      ++c.pos;
    }
  }
  return c;
}

/// Classical RK4 with a fixed step, used as an independent ODE oracle.
inline Vec rk4(const std::function<Vec(const Vec&)>& f, Vec z, double t_end, int steps) {
  const double h = t_end / steps;
  for (int i = 0; i < steps; ++i) {
    const Vec k1 = f(z);
    const Vec k2 = f(z + 0.5 * h * k1);
    const Vec k3 = f(z + 0.5 * h * k2);
    const Vec k4 = f(z + h * k3);
    z += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return z;
}

}  // namespace oracle
