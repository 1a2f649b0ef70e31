#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hopfnet/error.hpp"
#include "hopfnet/network.hpp"
#include "hopfnet/spectral.hpp"
#include "oracle.hpp"

using namespace hopfnet;

namespace {

Spectrum rotation_fixture() {
  const double t = std::numbers::pi / 6.0;
  Spectrum s;
  s.eigenvalues = Eigen::Vector2d(0.0, -1.0);
  s.vectors.resize(2, 2);
  s.vectors << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return s;
}

void check_spectrum_invariants(const Eigen::MatrixXd& m, const Spectrum& s) {
  const Eigen::Index n = s.n();
  const Eigen::MatrixXd gram = s.vectors.transpose() * s.vectors;
  CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-9);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lam = s.eigenvalues(k);
    CHECK((m * s.vectors.col(k) - lam * s.vectors.col(k)).norm() <= 1e-8 * (1.0 + std::abs(lam)));
    if (k > 0) CHECK(s.eigenvalues(k - 1) >= s.eigenvalues(k));
    Eigen::Index arg = 0;
    s.vectors.col(k).cwiseAbs().maxCoeff(&arg);
    CHECK(s.vectors(arg, k) > 0.0);
  }
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("diagonal matrix decomposes to identity columns") {
    const Spectrum s = eigendecompose(Eigen::MatrixXd(Eigen::Vector2d(0.0, -1.0).asDiagonal()));
    CHECK(s.eigenvalues(0) == 0.0);
    CHECK(s.eigenvalues(1) == -1.0);
    CHECK((s.vectors - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("2x2 closed form with sign normalisation") {
    Eigen::MatrixXd m(2, 2);
    m << -1.0, 0.5, 0.5, -1.0;
    const Spectrum s = eigendecompose(m);
    CHECK(s.eigenvalues(0) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(s.eigenvalues(1) == doctest::Approx(-1.5).epsilon(1e-14));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(s.vectors(0, 0) - r) < 1e-14);
    CHECK(std::abs(s.vectors(1, 0) - r) < 1e-14);
    // Equal magnitudes: the first index carries the positive sign.
    CHECK(std::abs(s.vectors(0, 1) - r) < 1e-14);
    CHECK(std::abs(s.vectors(1, 1) + r) < 1e-14);
  }

  TEST_CASE("eigendecompose agrees with the Jacobi oracle and keeps its invariants") {
    const CouplingMatrix m = build_spectral(50, BulkSpec{0.5, 3.0}, 0.0, 17);
    const Spectrum s = eigendecompose(m);
    check_spectrum_invariants(m.entries, s);
    const auto ref = oracle::jacobi(oracle::from_eigen(m.entries));
    for (Eigen::Index k = 0; k < 50; ++k) CHECK(std::abs(s.eigenvalues(k) - ref.values[k]) <= 1e-9);
  }

  TEST_CASE("eigendecompose rejects asymmetric input") {
    Eigen::MatrixXd m(2, 2);
    m << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(eigendecompose(m), Error);
    try {
      eigendecompose(m);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotSymmetric);
    }
  }

  TEST_CASE("uncoupled network has trivial gammas") {
    Eigen::VectorXd d(4);
    d << 0.0, -1.0, -2.0, -3.0;
    const GammaSet g = gamma_set(eigendecompose(Eigen::MatrixXd(d.asDiagonal())));
    CHECK(g.gamma_quartic == 1.0);
    CHECK(g.gamma_cross.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.weighted_sum == 0.0);
  }

  TEST_CASE("2x2 rotation gammas match hand values and the brute-force oracle") {
    const Spectrum s = rotation_fixture();
    const GammaSet g = gamma_set(s);
    CHECK(g.gamma_quartic == doctest::Approx(0.625).epsilon(1e-14));
    CHECK(g.gamma_cross(0) == doctest::Approx(-0.15849).epsilon(1e-4));
    CHECK(g.weighted_sum == doctest::Approx(0.0019322).epsilon(1e-4));

    const double t = std::numbers::pi / 6.0;
    const double closed = std::sin(t) * std::cos(t) * (std::sin(t) - std::cos(t));
    CHECK(std::abs(g.gamma_cross(0) - closed) < 1e-15);
    CHECK(std::abs(g.weighted_sum - closed * closed / 13.0) < 1e-15);

    const auto brute = oracle::brute_gammas({0.0, -1.0}, {{std::cos(t), std::sin(t)}, {-std::sin(t), std::cos(t)}});
    CHECK(std::abs(brute.quartic - g.gamma_quartic) < 1e-15);
    CHECK(std::abs(brute.weighted - g.weighted_sum) < 1e-15);
  }

  TEST_CASE("uniform leading vector gives quartic 1/n and vanishing cross terms") {
    // Helmert-like basis: first column is the all-ones direction.
    const int n = 6;
    Eigen::MatrixXd h = Eigen::MatrixXd::Random(n, n);
    h.col(0).setConstant(1.0);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(h);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    if (q(0, 0) < 0) q.col(0) = -q.col(0);
    Eigen::VectorXd d(n);
    d << 0.0, -0.5, -1.0, -1.5, -2.0, -2.5;
    Eigen::MatrixXd m = q * d.asDiagonal() * q.transpose();
    m = 0.5 * (m + Eigen::MatrixXd(m.transpose()));
    const GammaSet g = gamma_set(eigendecompose(m));
    CHECK(g.gamma_quartic == doctest::Approx(1.0 / n).epsilon(1e-12));
    CHECK(g.gamma_cross.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(g.weighted_sum < 1e-24);
  }

  TEST_CASE("gamma_set refuses non-negative bulk and degenerate leading") {
    Eigen::VectorXd d(3);
    d << 0.5, 0.0, -1.0;
    try {
      gamma_set(eigendecompose(Eigen::MatrixXd(d.asDiagonal())));
      FAIL("expected NonNegativeBulk");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonNegativeBulk);
    }
    d << -1.0, -1.0, -2.0;
    try {
      gamma_set(eigendecompose(Eigen::MatrixXd(d.asDiagonal())));
      FAIL("expected DegenerateLeading");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateLeading);
    }
  }

  TEST_CASE("gammas are sign invariant under eigenvector flips") {
    const CouplingMatrix m = build_spectral(20, BulkSpec{}, 0.0, 4);
    Spectrum s = eigendecompose(m);
    const GammaSet g = gamma_set(s);
    s.vectors.col(0) = -s.vectors.col(0);
    s.vectors.col(3) = -s.vectors.col(3);
    const GammaSet flipped = gamma_set(s);
    CHECK(flipped.gamma_quartic == doctest::Approx(g.gamma_quartic).epsilon(1e-14));
    CHECK(flipped.weighted_sum == doctest::Approx(g.weighted_sum).epsilon(1e-14));
  }

  TEST_CASE("Parseval: coordinates of w = v1^2 in the eigenbasis") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Spectrum s = eigendecompose(build_spectral(50, BulkSpec{}, 0.0, seed));
      const GammaSet g = gamma_set(s);
      const double c1 = s.vectors.col(0).array().cube().sum();
      CHECK(std::abs(c1 * c1 + g.gamma_cross.squaredNorm() - g.gamma_quartic) <= 1e-10);
    }
  }

  TEST_CASE("Haar eigenvectors: n * gamma_quartic concentrates near 3") {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
      total += 200.0 * gamma_set(eigendecompose(build_spectral(200, BulkSpec{}, 0.0, seed))).gamma_quartic;
    const double mean = total / 100.0;
    CHECK(mean >= 2.7);
    CHECK(mean <= 3.3);
  }

  TEST_CASE("weighted sum is positive for random normal networks") {
    for (std::uint64_t seed = 0; seed < 100; ++seed)
      CHECK(gamma_set(eigendecompose(build_spectral(50, BulkSpec{}, 0.0, seed))).weighted_sum > 0.0);
  }
}
