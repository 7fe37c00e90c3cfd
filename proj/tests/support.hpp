#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace gaitlab::testing {

// Fixed-seed generator so every run draws the same samples.
inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20240611ULL);
  return engine;
}

inline double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng());
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) m(i, k) = uniform(-scale, scale);
  }
  return m;
}

}  // namespace gaitlab::testing
