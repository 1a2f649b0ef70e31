#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "hopfnet/error.hpp"
#include "hopfnet/network.hpp"
#include "hopfnet/spectral.hpp"
#include "oracle.hpp"

using namespace hopfnet;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected hopfnet::Error");
  return ErrorCode::InvalidValue;
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("spectral synthesis 2x2 places the leading eigenvalue and one bulk value") {
    const BulkSpec bulk{1.0, 2.0, BulkDistribution::UniformOnInterval};
    const CouplingMatrix m = build_spectral(2, bulk, 0.0, 7);
    CHECK(symmetry_defect(m.entries) == 0.0);
    const auto ev = oracle::eigenvalues(m.entries);
    CHECK(std::abs(ev[0]) < 1e-12);
    CHECK(ev[1] <= -1.0 + 1e-12);
    CHECK(ev[1] >= -2.0 - 1e-12);
  }

  TEST_CASE("spectral synthesis rejects bad inputs") {
    const BulkSpec bulk{0.5, 3.0, BulkDistribution::UniformOnInterval};
    CHECK(code_of([&] { build_spectral(1, bulk, 0.0, 1); }) == ErrorCode::InvalidSize);
    CHECK(code_of([&] { build_spectral(5, bulk, -0.5, 1); }) == ErrorCode::LeadingInsideBulk);
    CHECK(code_of([&] { build_spectral(5, bulk, -0.7, 1); }) == ErrorCode::LeadingInsideBulk);
    CHECK(code_of([&] { build_spectral(5, BulkSpec{2.0, 1.0}, 0.0, 1); }) == ErrorCode::InvalidBulk);
    CHECK(code_of([&] { build_spectral(5, BulkSpec{0.0, 1.0}, 0.0, 1); }) == ErrorCode::InvalidBulk);
  }

  TEST_CASE("n=50 spectral synthesis round-trips through an independent eigensolver") {
    const BulkSpec bulk{0.5, 3.0, BulkDistribution::UniformOnInterval};
    const CouplingMatrix m = build_spectral(50, bulk, 0.01, 42);
    const ValidationReport r = validate_coupling(m);
    CHECK(r.passed());
    const auto ev = oracle::eigenvalues(m.entries);
    CHECK(std::abs(ev[0] - 0.01) < 1e-10);
    CHECK(r.gap >= bulk.d_min + 0.01 - 1e-10);
  }

  TEST_CASE("spectral synthesis spectrum equals the sampled diagonal for many sizes and seeds") {
    // Recreate the sampled diagonal independently: same generator, same draw order.
    for (int n : {2, 3, 10, 50, 200}) {
      const int seeds = n == 200 ? 10 : 100;
      for (int seed = 0; seed < seeds; ++seed) {
        const BulkSpec bulk{0.5, 3.0, BulkDistribution::UniformOnInterval};
        const CouplingMatrix m = build_spectral(n, bulk, 0.0, static_cast<std::uint64_t>(seed));
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int i = 0; i < n * n; ++i) (void)normal(rng);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> d{0.0};
        for (int k = 1; k < n; ++k) d.push_back(-0.5 - 2.5 * unit(rng));
        std::sort(d.rbegin(), d.rend());
        const Spectrum s = eigendecompose(m);
        double worst = 0.0;
        for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(s.eigenvalues(k) - d[static_cast<std::size_t>(k)]));
        REQUIRE(worst <= 1e-9);
      }
    }
  }

  TEST_CASE("semicircle bulk stays inside its interval") {
    const BulkSpec bulk{1.0, 4.0, BulkDistribution::SemicircleScaled};
    const CouplingMatrix m = build_spectral(80, bulk, 0.0, 3);
    CHECK(validate_coupling(m).passed());
  }

  TEST_CASE("construction is deterministic per seed") {
    const BulkSpec bulk;
    const auto a = build_spectral(30, bulk, 0.0, 99);
    const auto b = build_spectral(30, bulk, 0.0, 99);
    const auto c = build_spectral(30, bulk, 0.0, 100);
    CHECK(a.entries == b.entries);
    CHECK(a.entries != c.entries);
    CHECK(build_wigner_deflated(30, 1.0, 3.0, 0.0, 5).entries ==
          build_wigner_deflated(30, 1.0, 3.0, 0.0, 5).entries);
  }

  TEST_CASE("wigner deflation with zero noise") {
    const CouplingMatrix m = build_wigner_deflated(2, 0.0, 1.0, 0.0, 1);
    const auto ev = oracle::eigenvalues(m.entries);
    CHECK(std::abs(ev[0]) < 1e-12);
    CHECK(std::abs(ev[1] + 1.0) < 1e-12);
  }

  TEST_CASE("wigner deflation moves only the top eigenvalue") {
    const CouplingMatrix m = build_wigner_deflated(50, 1.0, 3.0, 0.0, 1);
    const auto ev = oracle::eigenvalues(m.entries);
    CHECK(std::abs(ev[0]) < 1e-10);
    for (std::size_t k = 1; k < ev.size(); ++k) CHECK(ev[k] < 0.0);
    CHECK(validate_coupling(m).passed());

    // Rebuild A = W - shift I from the same draws and compare bulks.
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = 50;
    const double off = 1.0 / std::sqrt(50.0);
    Eigen::MatrixXd a(n, n);
    for (int j = 0; j < n; ++j) {
      a(j, j) = std::sqrt(2.0) * off * normal(rng) - 3.0;
      for (int i = j + 1; i < n; ++i) a(i, j) = a(j, i) = off * normal(rng);
    }
    const auto ea = oracle::eigenvalues(a);
    double worst = 0.0;
    for (std::size_t k = 1; k < ea.size(); ++k) worst = std::max(worst, std::abs(ea[k] - ev[k]));
    CHECK(worst <= 1e-9);
  }

  TEST_CASE("wigner deflation refuses a bulk that reaches zero") {
    CHECK(code_of([] { build_wigner_deflated(50, 1.0, 0.1, 0.0, 1); }) == ErrorCode::BulkNotNegative);
    CHECK(code_of([] { build_wigner_deflated(1, 1.0, 3.0, 0.0, 1); }) == ErrorCode::InvalidSize);
  }

  TEST_CASE("validate_coupling flags injected defects") {
    CouplingMatrix m = build_spectral(4, BulkSpec{}, 0.0, 11);
    m.entries(0, 1) += 1e-3;
    const ValidationReport r = validate_coupling(m);
    CHECK(r.symmetry_defect == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK_FALSE(r.passed());

    CouplingMatrix neg;
    neg.entries = -Eigen::MatrixXd::Identity(3, 3);
    neg.leading_target = 0.0;
    const ValidationReport rn = validate_coupling(neg);
    CHECK(rn.eigenvalues_near_target == 0);
    CHECK_FALSE(rn.passed());
  }

  TEST_CASE("validate_coupling fails when the target is not the top eigenvalue") {
    CouplingMatrix m;
    m.entries = Eigen::Vector3d(1.0, 0.0, -1.0).asDiagonal();
    m.leading_target = 0.0;
    CHECK_FALSE(validate_coupling(m).passed());
  }
}
