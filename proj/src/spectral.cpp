#include "hopfnet/spectral.hpp"

#include <cmath>
#include <string>

#include "hopfnet/error.hpp"

namespace hopfnet {

void normalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double mag = std::abs(vectors(i, k));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (vectors(arg, k) < 0.0) vectors.col(k) = -vectors.col(k);
  }
}

Spectrum eigendecompose(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "matrix must be square and nonempty");
  const double defect = symmetry_defect(m);
  if (!(defect <= kSymTol))
    throw Error(ErrorCode::NotSymmetric,
                "max |M_ij - M_ji| = " + std::to_string(defect) + " exceeds tolerance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    const auto cap = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>::m_maxIterations * m.rows();
    throw Error(ErrorCode::ConvergenceFailure,
                "tridiagonal QR did not converge within " + std::to_string(cap) + " iterations");
  }

  // Solver output is ascending; reverse into descending order.
  Spectrum s;
  s.eigenvalues = solver.eigenvalues().reverse();
  s.vectors = solver.eigenvectors().rowwise().reverse();
  normalize_signs(s.vectors);
  return s;
}

Spectrum eigendecompose(const CouplingMatrix& m) { return eigendecompose(m.entries); }

GammaSet gamma_set(const Spectrum& s) {
  const Eigen::Index n = s.n();
  if (n < 2 || s.vectors.rows() != n || s.vectors.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "spectrum needs n >= 2 and an n x n basis");
  if (s.gap() < kDegenerateLeadingTol)
    throw Error(ErrorCode::DegenerateLeading,
                "lambda_1 - lambda_2 = " + std::to_string(s.gap()) + " is below tolerance");
  for (Eigen::Index k = 1; k < n; ++k)
    if (!(s.eigenvalues(k) < 0.0))
      throw Error(ErrorCode::NonNegativeBulk, "lambda_" + std::to_string(k + 1) + " = " +
                                                  std::to_string(s.eigenvalues(k)) + " >= 0");

  const Eigen::VectorXd w = s.vectors.col(0).array().square().matrix();

  GammaSet g;
  g.gamma_quartic = w.squaredNorm();
  g.gamma_cross = s.vectors.rightCols(n - 1).transpose() * w;
  g.weighted_sum = 0.0;
  for (Eigen::Index k = 1; k < n; ++k) {
    const double c = g.gamma_cross(k - 1);
    g.weighted_sum += c * c * bulk_weight(s.eigenvalues(k));
  }
  return g;
}

}  // namespace hopfnet
