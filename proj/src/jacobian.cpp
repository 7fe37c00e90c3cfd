#include "gaitlab/jacobian.hpp"

#include <vector>

#include "gaitlab/error.hpp"

namespace gaitlab {

Eigen::MatrixXd numeric_jacobian(const VectorMap& f, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& steps, Execution ex) {
  const auto n = x.size();
  if (steps.size() != n || !(steps.array() > 0.0).all()) {
    throw Error(ErrorCode::kInvalidArgument, "one positive step per coordinate is required");
  }
  std::vector<Eigen::VectorXd> columns(static_cast<std::size_t>(n));
  for_each_index(static_cast<std::size_t>(n), ex, [&](std::size_t j) {
    const auto jj = static_cast<Eigen::Index>(j);
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp(jj) += steps(jj);
    xm(jj) -= steps(jj);
    columns[j] = (f(xp) - f(xm)) / (xp(jj) - xm(jj));
  });
  const auto m = columns.empty() ? 0 : columns.front().size();
  Eigen::MatrixXd jac(m, n);
  for (Eigen::Index j = 0; j < n; ++j) jac.col(j) = columns[static_cast<std::size_t>(j)];
  return jac;
}

Eigen::MatrixXd numeric_jacobian(const VectorMap& f, const Eigen::VectorXd& x, double h,
                                 Execution ex) {
  return numeric_jacobian(f, x, Eigen::VectorXd::Constant(x.size(), h), ex);
}

}  // namespace gaitlab
