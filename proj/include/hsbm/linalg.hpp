#pragma once

// Small dense linear-algebra helpers on top of Eigen.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hsbm {

/// Flips each column so that its largest-magnitude entry is positive; ties go
/// to the lowest row index. Returns the applied signs.
inline Eigen::VectorXd fix_column_signs(Eigen::Ref<Eigen::MatrixXd> vectors)
{
  Eigen::VectorXd signs = Eigen::VectorXd::Ones(vectors.cols());
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (vectors.rows() > 0 && vectors(best, c) < 0.0) {
      vectors.col(c) *= -1.0;
      signs(c) = -1.0;
    }
  }
  return signs;
}

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
struct SymmetricEigen
{
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

inline SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver failed");
  SymmetricEigen out{solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
  fix_column_signs(out.vectors);
  return out;
}

/// Thin SVD A = X S V^T with singular values descending and the sign
/// convention applied to V (X absorbs the compensating flips).
struct ThinSvd
{
  Eigen::MatrixXd left;
  Eigen::VectorXd values;
  Eigen::MatrixXd right;
};

inline ThinSvd thin_svd(const Eigen::MatrixXd& a)
{
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  const Eigen::VectorXd signs = fix_column_signs(out.right);
  out.left = out.left * signs.asDiagonal();
  return out;
}

/// Largest singular value via a dense SVD.
inline double spectral_norm(const Eigen::MatrixXd& a)
{
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

/// Spectral norm of a symmetric matrix, max |eigenvalue|.
inline double symmetric_spectral_norm(const Eigen::MatrixXd& a)
{
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Spectral norm of a symmetric matrix by power iteration on A^2 with a fixed,
/// deterministic start vector. Stops when the Rayleigh quotient settles to
/// `tolerance` relative.
inline double power_iteration_norm(const Eigen::MatrixXd& a, double tolerance = 1e-14, int max_iterations = 100000)
{
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd y = a * (a * x);
    const double rayleigh = x.dot(y);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    x = y / norm;
    if (it > 0 && std::abs(rayleigh - estimate) <= tolerance * std::abs(rayleigh)) {
      estimate = rayleigh;
      break;
    }
    estimate = rayleigh;
  }
  return std::sqrt(std::max(0.0, estimate));
}

/// Maximum Euclidean row norm.
inline double two_to_infinity_norm(const Eigen::MatrixXd& a)
{
  if (a.rows() == 0) return 0.0;
  return a.rowwise().norm().maxCoeff();
}

/// Orthogonal W minimizing ||a - target * W||_F, from the SVD of target^T a.
inline Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& a, const Eigen::MatrixXd& target)
{
  if (a.rows() != target.rows() || a.cols() != target.cols())
    throw std::invalid_argument("procrustes_align: shape mismatch");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(target.transpose() * a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

/// Orthogonal polar factor of a square matrix (U V^T from its SVD).
inline Eigen::MatrixXd polar_factor(const Eigen::MatrixXd& a)
{
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

} // namespace hsbm
