#include "hopfnet/recognition.hpp"

#include <cmath>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "hopfnet/error.hpp"
#include "hopfnet/lyapunov.hpp"
#include "hopfnet/spectral.hpp"

namespace hopfnet {

std::string_view to_string(NetworkMode m) {
  switch (m) {
    case NetworkMode::GAS: return "GAS";
    case NetworkMode::NH: return "NH";
    case NetworkMode::Quiescent: return "Quiescent";
    case NetworkMode::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

void check_input_spec(const InputNetworkSpec& spec) {
  const Eigen::Index n = spec.n();
  if (n < 1 || spec.c.rows() != n || spec.c.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "r has length " + std::to_string(n) +
                                                  " but C is " + std::to_string(spec.c.rows()) +
                                                  "x" + std::to_string(spec.c.cols()));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (spec.c(i, j) < 0.0)
        throw Error(ErrorCode::DaleViolation, "C(" + std::to_string(i) + "," +
                                                  std::to_string(j) +
                                                  ") = " + std::to_string(spec.c(i, j)));
  const double defect = symmetry_defect(spec.c);
  if (!(defect <= kSymTol))
    throw Error(ErrorCode::AsymmetricC, "max |C_ij - C_ji| = " + std::to_string(defect));
}

OscillatorNetwork assemble_input_network(const InputNetworkSpec& spec, double a, double b) {
  check_input_spec(spec);
  OscillatorNetwork net;
  net.a = a;
  net.b = b;
  net.m.entries = spec.c;
  net.m.entries.diagonal() += spec.r;
  net.m.construction = Construction::InputPlusConnectivity;
  net.m.leading_target = eigendecompose(net.m).leading();
  return net;
}

bool is_irreducible(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::queue<Eigen::Index> frontier;
  frontier.push(0);
  seen[0] = true;
  Eigen::Index reached = 1;
  while (!frontier.empty()) {
    const Eigen::Index i = frontier.front();
    frontier.pop();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || seen[static_cast<std::size_t>(j)]) continue;
      if (m(i, j) != 0.0 || m(j, i) != 0.0) {
        seen[static_cast<std::size_t>(j)] = true;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == n;
}

PerronReport perron_check(const CouplingMatrix& m) {
  PerronReport report;
  report.irreducible = is_irreducible(m.entries);
  const Spectrum s = eigendecompose(m);
  report.leading = s.leading();
  report.gap = s.gap();
  report.eigenvector_positive = (s.vectors.col(0).array() > kPosTol).all();
  return report;
}

InputNetworkSpec tune_input_to_criticality(const InputNetworkSpec& spec, double target) {
  check_input_spec(spec);
  Eigen::MatrixXd m = spec.c;
  m.diagonal() += spec.r;
  const double shift = target - eigendecompose(m).leading();
  InputNetworkSpec tuned = spec;
  tuned.r.array() += shift;
  return tuned;
}

InputNetworkSpec random_input_spec(int n, double density, double weight, double r_min,
                                   double r_max, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::InvalidSize, "n must be >= 2");
  if (!(density >= 0.0 && density <= 1.0) || !(weight > 0.0) || !(r_min <= r_max))
    throw Error(ErrorCode::InvalidValue, "need 0 <= density <= 1, weight > 0, r_min <= r_max");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  InputNetworkSpec spec;
  spec.c = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      const bool edge = i == j + 1 || unit(rng) < density;
      const double w = weight * unit(rng);
      if (edge) spec.c(i, j) = spec.c(j, i) = w;
    }
  spec.r.resize(n);
  for (int i = 0; i < n; ++i) spec.r(i) = r_min + (r_max - r_min) * unit(rng);
  return spec;
}

double alignment(const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  const double nx = x.norm(), nv = v.norm();
  if (nx == 0.0 || nv == 0.0) return 0.0;
  return std::abs(x.dot(v)) / (nx * nv);
}

TypeDemoReport type_demo(const InputNetworkSpec& spec, double a, double b, double lambda_on,
                         std::uint64_t seed, const AmplitudeSettings& settings) {
  if (!(b < 0.0))
    throw Error(ErrorCode::PreconditionViolation, "type demo needs b < 0 (supercritical subunits)");
  check_input_spec(spec);
  if (!is_irreducible(spec.c))
    throw Error(ErrorCode::PreconditionViolation, "connectivity C is reducible");

  const OscillatorNetwork critical = assemble_input_network(tune_input_to_criticality(spec, 0.0), a, b);
  const Spectrum s0 = eigendecompose(critical.m);
  const GammaSet g = gamma_set(s0);

  TypeDemoReport report;
  report.gamma = gamma_threshold(g);
  report.threshold = report.gamma * std::sqrt(-b);
  if (!outside_exclusion_band(a, report.threshold))
    throw Error(ErrorCode::PreconditionViolation,
                "|a| = " + std::to_string(std::abs(a)) + " is within 20% of the threshold " +
                    std::to_string(report.threshold));

  const OscillatorNetwork net =
      assemble_input_network(tune_input_to_criticality(spec, lambda_on), a, b);
  const Spectrum s = eigendecompose(net.m);
  report.leading = s.leading();
  report.gap = s.gap();
  const Eigen::VectorXd v1 = s.leading_vector();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd direction(net.n());
  for (Eigen::Index i = 0; i < net.n(); ++i) direction(i) = normal(rng);
  const StateVector init{settings.init_scale * direction.normalized(),
                         Eigen::VectorXd::Zero(net.n())};

  const AmplitudeRun run = measure_run(net, v1, init, settings);
  switch (run.measure.outcome) {
    case Outcome::LimitCycle:
      report.mode = NetworkMode::GAS;
      report.amplitude = run.measure.amplitude;
      break;
    case Outcome::Escaped:
      report.mode = NetworkMode::NH;
      report.escape_time = run.measure.escape_time;
      break;
    case Outcome::DecayedToOrigin: report.mode = NetworkMode::Quiescent; break;
    case Outcome::Inconclusive: report.mode = NetworkMode::Inconclusive; break;
  }
  if (run.snapshot_x.size()) report.alignment = alignment(run.snapshot_x, v1);
  return report;
}

}  // namespace hopfnet
