#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hopfnet/network.hpp"
#include "hopfnet/spectral.hpp"

namespace hopfnet {

/// x_i' = y_i + a x_i^2 + b x_i^3 + (M x)_i,  y_i' = -x_i.
struct OscillatorNetwork {
  double a = 0.0;
  double b = -1.0;
  CouplingMatrix m;

  Eigen::Index n() const { return m.n(); }
};

struct StateVector {
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  static StateVector zero(Eigen::Index n) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  }
  Eigen::Index n() const { return x.size(); }
  double max_abs() const;
};

StateVector rhs(const OscillatorNetwork& net, const StateVector& s);

struct IntegrateOptions {
  double dt_max = 1e-3;
  double t_end = 1.0;
  double escape_bound = 8.0;
  int stride = 10;  // record every `stride` steps
};

enum class RunStatus { Completed, Escaped };

struct Trajectory {
  RunStatus status = RunStatus::Completed;
  std::vector<double> times;
  std::vector<StateVector> samples;
  StateVector final_state;
  double final_time = 0.0;
  std::optional<double> escape_time;
};

/// Called at t = 0, every `stride` steps, and at the final step.
using SampleObserver =
    std::function<void(double t, const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y)>;

struct IntegrationEnd {
  RunStatus status = RunStatus::Completed;
  StateVector final_state;
  double final_time = 0.0;
};

/// Fixed-step classical RK4. The step is t_end / ceil(t_end / dt_max), so the
/// run lands exactly on t_end. Stops early (Escaped) as soon as any |x_i| or
/// |y_i| exceeds escape_bound; throws NonFiniteState if the state overflows
/// first.
IntegrationEnd integrate(const OscillatorNetwork& net, const StateVector& init,
                         const IntegrateOptions& options, const SampleObserver& observer);

Trajectory integrate(const OscillatorNetwork& net, const StateVector& init,
                     const IntegrateOptions& options);

struct AmplitudeSettings {
  double dt_max = 1e-3;
  int stride = 10;
  double t_transient = 500.0;
  double t_measure = 500.0;
  double decay_tol = 1e-5;
  double cycle_tol = 0.02;
  double escape_bound = 8.0;
  double departure_radius = 1.0;
  double init_scale = 1e-3;
  double init_scale_large = 5.0;
  double fit_tol_fraction = 0.2;
  double min_r_squared = 0.95;

  bool operator==(const AmplitudeSettings&) const = default;
};

/// Throws InvalidValue naming the first non-positive setting.
void check_settings(const AmplitudeSettings& s);

enum class Outcome { DecayedToOrigin, LimitCycle, Escaped, Inconclusive };

std::string_view to_string(Outcome o);

struct AmplitudeMeasure {
  Outcome outcome = Outcome::Inconclusive;
  std::optional<double> amplitude;  // present iff LimitCycle
  std::optional<double> period_estimate;
  std::optional<double> escape_time;
};

struct AmplitudeRun {
  AmplitudeMeasure measure;
  StateVector final_state;
  /// x at the last leading-mode peak: inside the measurement window for a
  /// limit cycle, inside the departure radius for an escape. Empty otherwise.
  Eigen::VectorXd snapshot_x;
};

/// Integrate for t_transient + t_measure and read the leading-mode projection
/// p(t) = v1^T x(t) over the measurement window.
AmplitudeRun measure_run(const OscillatorNetwork& net, const Eigen::VectorXd& v1,
                         const StateVector& init, const AmplitudeSettings& settings);

AmplitudeMeasure steady_amplitude(const OscillatorNetwork& net, const Eigen::VectorXd& v1,
                                  const StateVector& init, const AmplitudeSettings& settings);

/// One network with its leading eigenvalue left free: at(lambda) moves only
/// the top eigenvalue (rank-one update along v1), leaving the bulk fixed.
class NetworkFamily {
 public:
  NetworkFamily(double a, double b, const CouplingMatrix& base);

  OscillatorNetwork at(double lambda) const;
  const Eigen::VectorXd& v1() const { return v1_; }
  const Spectrum& spectrum() const { return spectrum_; }
  double a() const { return a_; }
  double b() const { return b_; }
  Eigen::Index n() const { return base_.rows(); }

 private:
  double a_;
  double b_;
  Eigen::MatrixXd base_;
  Spectrum spectrum_;
  Eigen::VectorXd v1_;
};

enum class SweepProtocol { FreshSmallInit, ContinuationUp, ContinuationDown };

std::string_view to_string(SweepProtocol p);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope x + intercept; needs >= 2 distinct x.
LinearFit least_squares(std::span<const double> xs, std::span<const double> ys);

struct SweepResult {
  std::vector<double> lambda_grid;
  SweepProtocol protocol = SweepProtocol::FreshSmallInit;
  double init_scale = 0.0;
  std::vector<AmplitudeMeasure> measures;
  std::optional<LinearFit> fit;  // amplitude^2 vs lambda over LimitCycle points with lambda > 0
};

/// amplitude^2 vs lambda fit, when at least four LimitCycle points with
/// lambda > 0 exist.
std::optional<LinearFit> fit_amplitude_squared(const SweepResult& sweep);

/// Fresh runs start from init_scale * v1 in x and are independent, so they
/// are spread over `threads` workers; continuation runs chain final states in
/// grid order (descending for ContinuationDown). Output is in grid order
/// regardless of scheduling.
SweepResult amplitude_sweep(const NetworkFamily& family, std::span<const double> grid,
                            SweepProtocol protocol, const AmplitudeSettings& settings,
                            int threads = 1);

enum class NumericClass { Supercritical, Subcritical, Inconclusive };

std::string_view to_string(NumericClass c);

struct NumericEvidence {
  NumericClass classification = NumericClass::Inconclusive;
  bool decays_below_and_cycles_above = false;
  bool escapes_above = false;
  std::vector<double> bistable_lambdas;  // small init decays, large init escapes
  std::optional<LinearFit> fit;
  bool fit_accepted = false;
  bool hysteresis = false;  // up-sweep decays where down-sweep does not
  std::string reason;
};

/// `probes` holds large-init runs; its grid may be any subset of fresh's.
/// `up` and `down` only feed the hysteresis evidence and may be empty.
NumericEvidence classify_numeric(const SweepResult& up, const SweepResult& down,
                                 const SweepResult& fresh, const SweepResult& probes,
                                 const AmplitudeSettings& settings);

/// True when |a| is more than `fraction` (relative) away from threshold.
bool outside_exclusion_band(double a, double threshold, double fraction = 0.2);

}  // namespace hopfnet
