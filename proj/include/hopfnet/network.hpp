#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace hopfnet {

/// Absolute tolerance on max |M_ij - M_ji|.
inline constexpr double kSymTol = 1e-12;
/// Absolute tolerance for eigenvalue placement checks.
inline constexpr double kEigTol = 1e-8;

enum class Construction { SpectralSynthesis, WignerDeflated, InputPlusConnectivity };
enum class BulkDistribution { UniformOnInterval, SemicircleScaled };

/// Bulk eigenvalues are drawn from [-d_max, -d_min].
struct BulkSpec {
  double d_min = 0.5;
  double d_max = 3.0;
  BulkDistribution distribution = BulkDistribution::UniformOnInterval;

  bool operator==(const BulkSpec&) const = default;
};

void check_bulk(const BulkSpec& bulk);

struct CouplingMatrix {
  Eigen::MatrixXd entries;
  double leading_target = 0.0;
  Construction construction = Construction::SpectralSynthesis;
  std::optional<BulkSpec> bulk;  // set when the bulk interval is part of the contract

  Eigen::Index n() const { return entries.rows(); }
};

struct ValidationReport {
  double symmetry_defect = 0.0;
  bool symmetric = false;
  int eigenvalues_near_target = 0;  // must be exactly 1
  bool rest_negative = false;
  bool rest_in_bulk = true;  // vacuous without a configured bulk
  double leading = 0.0;
  double gap = 0.0;  // lambda_1 - lambda_2

  bool passed() const {
    return symmetric && eigenvalues_near_target == 1 && rest_negative && rest_in_bulk;
  }
};

/// M = Q D Q^T with Q Haar-distributed and D = diag(leading, bulk draws).
CouplingMatrix build_spectral(int n, const BulkSpec& bulk, double leading, std::uint64_t seed);

/// Wigner matrix shifted by -shift*I whose top eigenvalue is then moved to
/// `leading` by a rank-one update along its eigenvector.
CouplingMatrix build_wigner_deflated(int n, double entry_std, double shift, double leading,
                                     std::uint64_t seed);

ValidationReport validate_coupling(const CouplingMatrix& m);

double symmetry_defect(const Eigen::MatrixXd& m);

}  // namespace hopfnet
