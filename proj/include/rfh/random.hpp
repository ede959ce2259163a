#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace rfh {

using Rng = std::mt19937_64;

/// Independent stream for sub-task `index` of a run seeded with `seed`.
inline Rng make_rng(std::uint64_t seed, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
  return Rng(seq);
}

inline Eigen::VectorXd random_gaussian(Rng& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

inline Eigen::VectorXd random_unit(Rng& rng, int dim) {
  Eigen::VectorXd v = random_gaussian(rng, dim);
  while (v.norm() < 1e-12) v = random_gaussian(rng, dim);
  return v / v.norm();
}

inline double random_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

}  // namespace rfh
