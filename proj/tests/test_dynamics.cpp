#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "hopfnet/dynamics.hpp"
#include "hopfnet/error.hpp"
#include "hopfnet/lyapunov.hpp"

using namespace hopfnet;

namespace {

OscillatorNetwork harmonic() {
  OscillatorNetwork net;
  net.a = 0.0;
  net.b = 0.0;
  net.m.entries = Eigen::MatrixXd::Zero(1, 1);
  return net;
}

StateVector unit_state() { return {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1)}; }

double end_error(double dt, double t_end) {
  IntegrateOptions opts;
  opts.dt_max = dt;
  opts.t_end = t_end;
  const Trajectory tr = integrate(harmonic(), unit_state(), opts);
  return std::hypot(tr.final_state.x(0) - std::cos(t_end), tr.final_state.y(0) + std::sin(t_end));
}

AmplitudeSettings quick() {
  AmplitudeSettings s;
  s.dt_max = 0.01;
  s.t_transient = 1000.0;
  s.t_measure = 200.0;
  return s;
}

CouplingMatrix small_base() { return build_spectral(10, BulkSpec{}, 0.0, 3); }

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("right-hand side examples") {
    OscillatorNetwork net;
    net.a = 1.0;
    net.b = -1.0;
    net.m.entries = Eigen::Matrix2d{{0.0, 0.1}, {0.1, 0.0}};
    const StateVector s{Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 0.0)};
    const StateVector d = rhs(net, s);
    CHECK(d.x(0) == doctest::Approx(0.0));
    CHECK(d.x(1) == doctest::Approx(0.1));
    CHECK(d.y(0) == -1.0);
    CHECK(d.y(1) == 0.0);

    const StateVector s2{Eigen::Vector2d(2.0, -1.0), Eigen::Vector2d(0.5, 3.0)};
    const StateVector d2 = rhs(net, s2);
    CHECK(d2.x(0) == doctest::Approx(0.5 + 4.0 - 8.0 - 0.1));
    CHECK(d2.x(1) == doctest::Approx(3.0 + 1.0 + 1.0 + 0.2));
    CHECK(d2.y(0) == -2.0);
    CHECK(d2.y(1) == 1.0);
  }

  TEST_CASE("origin is an exact fixed point") {
    OscillatorNetwork net;
    net.a = 3.0;
    net.m = build_spectral(6, BulkSpec{}, 0.1, 5);
    const StateVector d = rhs(net, StateVector::zero(6));
    CHECK(d.x.cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.y.cwiseAbs().maxCoeff() == 0.0);
    IntegrateOptions opts;
    opts.t_end = 5.0;
    const Trajectory tr = integrate(net, StateVector::zero(6), opts);
    CHECK(tr.final_state.max_abs() == 0.0);
  }

  TEST_CASE("dimension mismatch") {
    OscillatorNetwork net;
    net.m.entries = Eigen::MatrixXd::Zero(3, 3);
    try {
      rhs(net, StateVector::zero(2));
      FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
  }

  TEST_CASE("harmonic oscillator: period, energy, order") {
    CHECK(end_error(1e-3, 2.0 * M_PI) < 1e-6);

    IntegrateOptions opts;
    opts.dt_max = 1e-3;
    opts.t_end = 100.0;
    double drift = 0.0;
    integrate(harmonic(), unit_state(), opts,
              [&](double, const auto& x, const auto& y) {
                drift = std::max(drift, std::abs(x(0) * x(0) + y(0) * y(0) - 1.0));
              });
    CHECK(drift <= 1e-5);

    const double order = std::log2(end_error(0.1, 10.0) / end_error(0.05, 10.0));
    CHECK(order >= 3.5);
  }

  TEST_CASE("step lands exactly on t_end and sampling follows stride") {
    IntegrateOptions opts;
    opts.dt_max = 0.3;
    opts.t_end = 1.0;
    opts.stride = 2;
    const Trajectory tr = integrate(harmonic(), unit_state(), opts);
    CHECK(tr.final_time == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(!tr.times.empty());
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("escape is reported with a time") {
    OscillatorNetwork net = harmonic();
    net.m.entries(0, 0) = 1.0;  // linear growth
    IntegrateOptions opts;
    opts.dt_max = 0.01;
    opts.t_end = 100.0;
    const Trajectory tr = integrate(net, unit_state(), opts);
    CHECK(tr.status == RunStatus::Escaped);
    REQUIRE(tr.escape_time);
    CHECK(*tr.escape_time < 100.0);
  }

  TEST_CASE("a -> -a is the symmetry x -> -x, y -> -y") {
    OscillatorNetwork plus;
    plus.a = 0.7;
    plus.m = build_spectral(5, BulkSpec{}, 0.02, 11);
    OscillatorNetwork minus = plus;
    minus.a = -0.7;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal(0.0, 0.3);
    StateVector s{Eigen::VectorXd(5), Eigen::VectorXd(5)};
    for (int i = 0; i < 5; ++i) {
      s.x(i) = normal(rng);
      s.y(i) = normal(rng);
    }
    IntegrateOptions opts;
    opts.dt_max = 0.01;
    opts.t_end = 20.0;
    const StateVector p = integrate(plus, s, opts).final_state;
    const StateVector m = integrate(minus, {-s.x, -s.y}, opts).final_state;
    CHECK((p.x + m.x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p.y + m.y).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("family moves only the leading eigenvalue") {
    const NetworkFamily fam(0.0, -1.0, small_base());
    const Spectrum s0 = eigendecompose(fam.at(0.0).m.entries);
    const Spectrum s1 = eigendecompose(fam.at(0.07).m.entries);
    CHECK(s1.leading() == doctest::Approx(0.07).epsilon(1e-12));
    for (Eigen::Index k = 1; k < s0.n(); ++k)
      CHECK(s1.eigenvalues(k) == doctest::Approx(s0.eigenvalues(k)).epsilon(1e-10));
  }

  TEST_CASE("steady amplitude: decay, limit cycle, escape") {
    const CouplingMatrix base = small_base();
    const NetworkFamily sup(0.0, -1.0, base);
    const AmplitudeSettings s = quick();

    const StateVector init{s.init_scale * sup.v1(), Eigen::VectorXd::Zero(10)};
    CHECK(steady_amplitude(sup.at(-0.1), sup.v1(), init, s).outcome == Outcome::DecayedToOrigin);

    const AmplitudeMeasure cyc = steady_amplitude(sup.at(0.05), sup.v1(), init, s);
    REQUIRE(cyc.outcome == Outcome::LimitCycle);
    REQUIRE(cyc.amplitude);
    REQUIRE(cyc.period_estimate);
    CHECK(*cyc.period_estimate == doctest::Approx(2.0 * M_PI).epsilon(0.1));
    // Weakly nonlinear prediction r^2 = lambda / (2 |l1 / n|).
    const GammaSet g = gamma_set(eigendecompose(base));
    const double predicted = std::sqrt(0.05 / (2.0 * 0.375 * g.gamma_quartic));
    CHECK(*cyc.amplitude == doctest::Approx(predicted).epsilon(0.1));

    const double gamma = gamma_threshold(g);
    const NetworkFamily sub(3.0 * gamma, -1.0, base);
    const AmplitudeMeasure esc = steady_amplitude(sub.at(0.05), sub.v1(), init, s);
    CHECK(esc.outcome == Outcome::Escaped);
    CHECK(esc.escape_time);
  }

  TEST_CASE("zero initial condition stays at the origin") {
    const NetworkFamily fam(0.0, -1.0, small_base());
    AmplitudeSettings s = quick();
    s.t_transient = 10.0;
    s.t_measure = 10.0;
    const AmplitudeMeasure m = steady_amplitude(fam.at(0.05), fam.v1(), StateVector::zero(10), s);
    CHECK(m.outcome == Outcome::DecayedToOrigin);
  }

  TEST_CASE("sweep argument errors") {
    const NetworkFamily fam(0.0, -1.0, small_base());
    const std::vector<double> empty;
    try {
      amplitude_sweep(fam, empty, SweepProtocol::FreshSmallInit, quick());
      FAIL("expected EmptyGrid");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyGrid);
    }
    AmplitudeSettings bad = quick();
    bad.dt_max = 0.0;
    try {
      check_settings(bad);
      FAIL("expected InvalidValue");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidValue);
    }
  }

  TEST_CASE("all-negative grid decays under every protocol") {
    const NetworkFamily fam(0.0, -1.0, small_base());
    AmplitudeSettings s = quick();
    s.t_transient = 300.0;
    s.t_measure = 100.0;
    const std::vector<double> grid{-0.3, -0.2, -0.1};
    for (auto p : {SweepProtocol::FreshSmallInit, SweepProtocol::ContinuationUp,
                   SweepProtocol::ContinuationDown}) {
      const SweepResult r = amplitude_sweep(fam, grid, p, s, 2);
      REQUIRE(r.measures.size() == 3);
      for (const auto& m : r.measures) CHECK(m.outcome == Outcome::DecayedToOrigin);
      CHECK_FALSE(r.fit);
    }
  }

  TEST_CASE("threaded fresh sweep matches serial") {
    const NetworkFamily fam(0.0, -1.0, small_base());
    AmplitudeSettings s = quick();
    s.t_transient = 200.0;
    s.t_measure = 100.0;
    const std::vector<double> grid{-0.05, 0.02, 0.05};
    const SweepResult a = amplitude_sweep(fam, grid, SweepProtocol::FreshSmallInit, s, 1);
    const SweepResult b = amplitude_sweep(fam, grid, SweepProtocol::FreshSmallInit, s, 3);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(a.measures[i].outcome == b.measures[i].outcome);
      CHECK(a.measures[i].amplitude == b.measures[i].amplitude);
    }
  }

  TEST_CASE("least squares") {
    const std::vector<double> xs{1, 2, 3, 4};
    const std::vector<double> ys{3, 5, 7, 9};
    const LinearFit f = least_squares(xs, ys);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r_squared == doctest::Approx(1.0));
  }

  TEST_CASE("numeric classification needs points above zero") {
    SweepResult fresh;
    fresh.lambda_grid = {-0.02, -0.01};
    fresh.measures.resize(2);
    fresh.measures[0].outcome = Outcome::DecayedToOrigin;
    fresh.measures[1].outcome = Outcome::DecayedToOrigin;
    const NumericEvidence ev = classify_numeric({}, {}, fresh, {}, AmplitudeSettings{});
    CHECK(ev.classification == NumericClass::Inconclusive);
    CHECK_FALSE(ev.reason.empty());
  }

  TEST_CASE("exclusion band") {
    CHECK(outside_exclusion_band(0.5, 1.0));
    CHECK_FALSE(outside_exclusion_band(0.9, 1.0));
    CHECK_FALSE(outside_exclusion_band(-1.1, 1.0));
    CHECK(outside_exclusion_band(-1.5, 1.0));
  }
}
