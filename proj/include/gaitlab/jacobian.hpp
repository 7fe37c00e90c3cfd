#pragma once

#include <functional>

#include <Eigen/Core>

#include "gaitlab/parallel.hpp"

namespace gaitlab {

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central differences, J(i, j) = (f(x + h e_j)_i - f(x - h e_j)_i) / (2 h_j).
/// Columns are independent and are distributed over threads under kParallel;
/// both paths produce bit-identical matrices.
Eigen::MatrixXd numeric_jacobian(const VectorMap& f, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& steps, Execution ex = Execution::kSerial);

Eigen::MatrixXd numeric_jacobian(const VectorMap& f, const Eigen::VectorXd& x, double h,
                                 Execution ex = Execution::kSerial);

}  // namespace gaitlab
