#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace gaitlab {

using Spectrum = std::vector<std::complex<double>>;

/// Partial-pivot Gaussian elimination. Throws SingularMatrix when a pivot
/// falls below 1e-12 times the largest entry of `a`.
Eigen::VectorXd solve_dense(const Eigen::Ref<const Eigen::MatrixXd>& a,
                            const Eigen::Ref<const Eigen::VectorXd>& b);

/// Multi right-hand-side variant; each column of `b` is solved independently
/// against one factorization.
Eigen::MatrixXd solve_dense_multi(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                  const Eigen::Ref<const Eigen::MatrixXd>& b);

/// 1-norm condition number estimate ||A||_1 ||A^-1||_1 from an explicit
/// inverse. Only meant for the small decoupling matrices of the controller.
double condition_number_1(const Eigen::Ref<const Eigen::MatrixXd>& a);

struct EigenOptions {
  int max_iterations_per_eigenvalue = 30;
  bool balance = true;
};

/// All eigenvalues of a real square matrix (balancing, Householder reduction
/// to Hessenberg form, Francis double-shift QR).
///
/// Ordering is deterministic: decreasing modulus, then decreasing real part,
/// then decreasing imaginary part. Complex eigenvalues come in exact
/// conjugate pairs.
Spectrum eigenvalues(const Eigen::Ref<const Eigen::MatrixXd>& a, const EigenOptions& options = {});

double spectral_radius(const Spectrum& spectrum);

}  // namespace gaitlab
