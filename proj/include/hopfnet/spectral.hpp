#pragma once

#include <Eigen/Dense>

#include "hopfnet/network.hpp"

namespace hopfnet {

/// Gap below which the leading eigenvector is treated as ill-defined.
inline constexpr double kDegenerateLeadingTol = 1e-8;

/// Eigenvalues sorted descending; column k of `vectors` is the unit
/// eigenvector for eigenvalues[k]. Each column's largest-magnitude entry is
/// positive (first index wins ties).
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd vectors;

  Eigen::Index n() const { return eigenvalues.size(); }
  double leading() const { return eigenvalues(0); }
  Eigen::VectorXd leading_vector() const { return vectors.col(0); }
  double gap() const { return n() > 1 ? eigenvalues(0) - eigenvalues(1) : 0.0; }
};

/// Eigenvector moments of the leading mode.
///
/// With w_phi = V_{phi,1}^2 and c_k = <v_k, w>:
///   gamma_quartic = |w|^2 = sum_phi V_{phi,1}^4
///   gamma_cross   = (c_2, ..., c_N)
///   weighted_sum  = sum_{k>=2} c_k^2 (-lambda_k) / (4 lambda_k^2 + 9)
struct GammaSet {
  double gamma_quartic = 0.0;
  Eigen::VectorXd gamma_cross;
  double weighted_sum = 0.0;
};

Spectrum eigendecompose(const CouplingMatrix& m);
Spectrum eigendecompose(const Eigen::MatrixXd& m);

/// Flip each column so its largest-magnitude entry is positive.
void normalize_signs(Eigen::MatrixXd& vectors);

GammaSet gamma_set(const Spectrum& s);

/// Weight (-lambda) / (4 lambda^2 + 9) applied to each bulk mode.
inline double bulk_weight(double lambda) { return -lambda / (4.0 * lambda * lambda + 9.0); }

}  // namespace hopfnet
