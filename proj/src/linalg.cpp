#include "gaitlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gaitlab/error.hpp"

namespace gaitlab {
namespace {

constexpr double kPivotTolerance = 1e-12;

struct LuFactors {
  Eigen::MatrixXd lu;
  std::vector<int> perm;
};

LuFactors factorize(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  const auto n = a.rows();
  if (a.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "solve_dense needs a square matrix");
  }
  if (!a.allFinite()) {
    throw Error(ErrorCode::kNonFiniteState, "matrix has non-finite entries");
  }
  LuFactors f{a, std::vector<int>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) f.perm[static_cast<std::size_t>(i)] = i;

  const double scale = a.cwiseAbs().maxCoeff();
  const double tol = kPivotTolerance * (scale > 0.0 ? scale : 1.0);
  auto& m = f.lu;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(m(i, k)) > best) {
        best = std::abs(m(i, k));
        piv = i;
      }
    }
    if (best <= tol || scale == 0.0) {
      throw Error(ErrorCode::kSingularMatrix,
                  "pivot " + std::to_string(best) + " at column " + std::to_string(k));
    }
    if (piv != k) {
      m.row(k).swap(m.row(piv));
      std::swap(f.perm[static_cast<std::size_t>(k)], f.perm[static_cast<std::size_t>(piv)]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double l = m(i, k) / m(k, k);
      m(i, k) = l;
      for (int j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  return f;
}

void substitute(const LuFactors& f, Eigen::Ref<Eigen::VectorXd> x) {
  const auto n = f.lu.rows();
  for (int i = 1; i < n; ++i) {
    double s = x(i);
    for (int j = 0; j < i; ++j) s -= f.lu(i, j) * x(j);
    x(i) = s;
  }
  for (auto i = n - 1; i >= 0; --i) {
    double s = x(i);
    for (auto j = i + 1; j < n; ++j) s -= f.lu(i, j) * x(j);
    x(i) = s / f.lu(i, i);
  }
}

void balance(Eigen::MatrixXd& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const auto n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

void reduce_to_hessenberg(Eigen::MatrixXd& a) {
  const auto n = a.rows();
  for (int k = 0; k + 2 < n; ++k) {
    Eigen::VectorXd v = a.block(k + 1, k, n - k - 1, 1);
    const double norm = v.norm();
    if (norm == 0.0) continue;
    const double alpha = v(0) > 0.0 ? -norm : norm;
    v(0) -= alpha;
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    v /= vnorm;
    // H = I - 2 v v^T on rows/cols k+1..n-1.
    auto rows = a.block(k + 1, k, n - k - 1, n - k);
    rows -= 2.0 * v * (v.transpose() * rows);
    auto cols = a.block(0, k + 1, n, n - k - 1);
    cols -= 2.0 * (cols * v) * v.transpose();
    a(k + 1, k) = alpha;
    for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

double sign_of(double magnitude, double sign_source) {
  return sign_source >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr lineage).
Spectrum hessenberg_qr(Eigen::MatrixXd& a, int max_its) {
  const int n = static_cast<int>(a.rows());
  Spectrum w(static_cast<std::size_t>(n));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  }
  int nn = n - 1;
  double t = 0.0;
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double ww = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        w[static_cast<std::size_t>(nn)] = {x + t, 0.0};
        --nn;
      } else {
        y = a(nn - 1, nn - 1);
        ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + ww;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            const double hi = x + z;
            const double lo = z != 0.0 ? x - ww / z : hi;
            w[static_cast<std::size_t>(nn - 1)] = {hi, 0.0};
            w[static_cast<std::size_t>(nn)] = {lo, 0.0};
          } else {
            w[static_cast<std::size_t>(nn)] = {x + p, -z};
            w[static_cast<std::size_t>(nn - 1)] = {x + p, z};
          }
          nn -= 2;
        } else {
          if (its == max_its) {
            throw Error(ErrorCode::kNoConvergence,
                        "QR iteration stalled at index " + std::to_string(nn));
          }
          if (its == 10 || its == 20) {
            // Exceptional shift.
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k + 1 != nn) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k + 1 != nn) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

}  // namespace

Eigen::VectorXd solve_dense(const Eigen::Ref<const Eigen::MatrixXd>& a,
                            const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (b.size() != a.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "right-hand side has wrong length");
  }
  const auto f = factorize(a);
  Eigen::VectorXd x(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) x(i) = b(f.perm[static_cast<std::size_t>(i)]);
  substitute(f, x);
  return x;
}

Eigen::MatrixXd solve_dense_multi(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                  const Eigen::Ref<const Eigen::MatrixXd>& b) {
  if (b.rows() != a.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "right-hand side has wrong row count");
  }
  const auto f = factorize(a);
  Eigen::MatrixXd x(b.rows(), b.cols());
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    Eigen::VectorXd col(b.rows());
    for (Eigen::Index i = 0; i < b.rows(); ++i) col(i) = b(f.perm[static_cast<std::size_t>(i)], c);
    substitute(f, col);
    x.col(c) = col;
  }
  return x;
}

double condition_number_1(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  const auto n = a.rows();
  Eigen::MatrixXd inv;
  try {
    inv = solve_dense_multi(a, Eigen::MatrixXd::Identity(n, n));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSingularMatrix) return std::numeric_limits<double>::infinity();
    throw;
  }
  const double na = a.cwiseAbs().colwise().sum().maxCoeff();
  const double ni = inv.cwiseAbs().colwise().sum().maxCoeff();
  return na * ni;
}

Spectrum eigenvalues(const Eigen::Ref<const Eigen::MatrixXd>& a, const EigenOptions& options) {
  const auto n = a.rows();
  if (a.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "eigenvalues needs a square matrix");
  }
  if (!a.allFinite()) {
    throw Error(ErrorCode::kNonFiniteState, "matrix has non-finite entries");
  }
  if (n == 0) return {};
  Eigen::MatrixXd h = a;
  if (options.balance) balance(h);
  reduce_to_hessenberg(h);
  Spectrum w = hessenberg_qr(h, options.max_iterations_per_eigenvalue);
  std::stable_sort(w.begin(), w.end(), [](const auto& lhs, const auto& rhs) {
    const double ml = std::abs(lhs);
    const double mr = std::abs(rhs);
    if (ml != mr) return ml > mr;
    if (lhs.real() != rhs.real()) return lhs.real() > rhs.real();
    return lhs.imag() > rhs.imag();
  });
  return w;
}

double spectral_radius(const Spectrum& spectrum) {
  double rho = 0.0;
  for (const auto& z : spectrum) rho = std::max(rho, std::abs(z));
  return rho;
}

}  // namespace gaitlab
