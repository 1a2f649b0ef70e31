#include "hopfnet/network.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "hopfnet/error.hpp"
#include "hopfnet/spectral.hpp"

namespace hopfnet {

namespace {

// All sampling goes through mt19937_64; reproducibility is bit-exact only
// for a fixed standard library implementation.
using Rng = std::mt19937_64;

Eigen::MatrixXd haar_orthogonal(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = normal(rng);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const auto& r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

double draw_bulk(const BulkSpec& bulk, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (bulk.distribution) {
    case BulkDistribution::UniformOnInterval:
      return -bulk.d_min - (bulk.d_max - bulk.d_min) * unit(rng);
    case BulkDistribution::SemicircleScaled: {
      // x-coordinate of a uniform point in the unit disk is semicircle-distributed on [-1, 1].
      const double radius = std::sqrt(unit(rng));
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      const double t = radius * std::cos(angle);
      const double centre = -0.5 * (bulk.d_min + bulk.d_max);
      const double half_width = 0.5 * (bulk.d_max - bulk.d_min);
      return centre + half_width * t;
    }
  }
  return -bulk.d_min;
}

void symmetrize(Eigen::MatrixXd& m) {
  const Eigen::MatrixXd t = m.transpose();
  m = 0.5 * (m + t);
}

}  // namespace

void check_bulk(const BulkSpec& bulk) {
  if (!(std::isfinite(bulk.d_min) && std::isfinite(bulk.d_max)) || !(bulk.d_min > 0.0) ||
      !(bulk.d_max > bulk.d_min))
    throw Error(ErrorCode::InvalidBulk, "need 0 < d_min < d_max, got d_min=" +
                                            std::to_string(bulk.d_min) +
                                            " d_max=" + std::to_string(bulk.d_max));
}

double symmetry_defect(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

CouplingMatrix build_spectral(int n, const BulkSpec& bulk, double leading, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::InvalidSize, "n must be >= 2, got " + std::to_string(n));
  check_bulk(bulk);
  if (!(leading > -bulk.d_min + kEigTol))
    throw Error(ErrorCode::LeadingInsideBulk,
                "leading=" + std::to_string(leading) + " must exceed -d_min=" +
                    std::to_string(-bulk.d_min));

  Rng rng(seed);
  const Eigen::MatrixXd q = haar_orthogonal(n, rng);
  Eigen::VectorXd d(n);
  d(0) = leading;
  for (int k = 1; k < n; ++k) d(k) = draw_bulk(bulk, rng);

  CouplingMatrix m;
  m.entries = q * d.asDiagonal() * q.transpose();
  symmetrize(m.entries);
  m.leading_target = leading;
  m.construction = Construction::SpectralSynthesis;
  m.bulk = bulk;
  return m;
}

CouplingMatrix build_wigner_deflated(int n, double entry_std, double shift, double leading,
                                     std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::InvalidSize, "n must be >= 2, got " + std::to_string(n));
  if (!(entry_std >= 0.0) || !(shift > 0.0))
    throw Error(ErrorCode::InvalidValue, "entry_std must be >= 0 and shift > 0");

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double off_std = entry_std / std::sqrt(static_cast<double>(n));
  const double diag_std = std::numbers::sqrt2 * off_std;  // doubled variance on the diagonal
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j) {
    a(j, j) = diag_std * normal(rng) - shift;
    for (int i = j + 1; i < n; ++i) {
      a(i, j) = off_std * normal(rng);
      a(j, i) = a(i, j);
    }
  }

  const Spectrum s = eigendecompose(a);
  if (s.eigenvalues(1) >= 0.0)
    throw Error(ErrorCode::BulkNotNegative,
                "second eigenvalue " + std::to_string(s.eigenvalues(1)) +
                    " >= 0; increase shift (currently " + std::to_string(shift) + ")");
  if (!(leading > s.eigenvalues(1) + kEigTol))
    throw Error(ErrorCode::LeadingInsideBulk,
                "leading=" + std::to_string(leading) + " does not exceed the bulk edge " +
                    std::to_string(s.eigenvalues(1)));

  const Eigen::VectorXd u = s.leading_vector();
  CouplingMatrix m;
  m.entries = a + (leading - s.leading()) * u * u.transpose();
  symmetrize(m.entries);
  m.leading_target = leading;
  m.construction = Construction::WignerDeflated;
  return m;
}

ValidationReport validate_coupling(const CouplingMatrix& m) {
  ValidationReport report;
  if (m.entries.rows() != m.entries.cols() || m.entries.rows() < 1) {
    report.symmetry_defect = std::numeric_limits<double>::infinity();
    return report;
  }
  report.symmetry_defect = symmetry_defect(m.entries);
  report.symmetric = report.symmetry_defect <= kSymTol;

  // Layout is inspected on the symmetric part so the report stays informative
  // even when the symmetry check has already failed.
  Eigen::MatrixXd sym = m.entries;
  symmetrize(sym);
  const Spectrum s = eigendecompose(sym);
  const Eigen::Index n = s.n();

  Eigen::Index near = -1;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(s.eigenvalues(k) - m.leading_target) <= kEigTol) {
      ++report.eigenvalues_near_target;
      if (near < 0) near = k;
    }
  }
  report.leading = s.leading();
  report.gap = s.gap();

  report.rest_negative = true;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k == near) continue;
    const double lambda = s.eigenvalues(k);
    if (!(lambda < 0.0)) report.rest_negative = false;
    if (m.bulk && (lambda < -m.bulk->d_max - kEigTol || lambda > -m.bulk->d_min + kEigTol))
      report.rest_in_bulk = false;
  }
  // The controlled eigenvalue has to be the top one to act as the bifurcation parameter.
  if (near > 0) report.rest_negative = false;
  return report;
}

}  // namespace hopfnet
