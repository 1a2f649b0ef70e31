#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "hopfnet/dynamics.hpp"
#include "hopfnet/network.hpp"

namespace hopfnet {

/// Strict positivity threshold for Perron vector components.
inline constexpr double kPosTol = 1e-10;

/// M = diag(r) + C with C nonnegative (Dale) and symmetric (Hebbian).
struct InputNetworkSpec {
  Eigen::VectorXd r;
  Eigen::MatrixXd c;

  Eigen::Index n() const { return r.size(); }
};

/// Throws DimensionMismatch, DaleViolation or AsymmetricC.
void check_input_spec(const InputNetworkSpec& spec);

OscillatorNetwork assemble_input_network(const InputNetworkSpec& spec, double a, double b);

struct PerronReport {
  double leading = 0.0;
  double gap = 0.0;
  bool eigenvector_positive = false;
  bool irreducible = false;
};

/// Measures, does not assert: irreducibility from the off-diagonal pattern,
/// then gap and Perron-vector positivity from the spectrum.
PerronReport perron_check(const CouplingMatrix& m);

/// Connected graph on the nonzero off-diagonal pattern.
bool is_irreducible(const Eigen::MatrixXd& m);

/// Uniform input shift r -> r + s 1 placing the leading eigenvalue of R + C on target.
InputNetworkSpec tune_input_to_criticality(const InputNetworkSpec& spec, double target);

/// Random Dale/Hebbian spec: each pair (i, j) is connected with probability
/// `density` with weight U(0, weight); a chain i -- i+1 with weight U(0, weight)
/// is always present so C is irreducible. Inputs r_i ~ U(r_min, r_max).
InputNetworkSpec random_input_spec(int n, double density, double weight, double r_min,
                                   double r_max, std::uint64_t seed);

enum class NetworkMode { GAS, NH, Quiescent, Inconclusive };

std::string_view to_string(NetworkMode m);

struct TypeDemoReport {
  NetworkMode mode = NetworkMode::Inconclusive;
  double alignment = 0.0;
  std::optional<double> amplitude;
  std::optional<double> escape_time;
  double leading = 0.0;  // after tuning
  double gap = 0.0;
  double gamma = 0.0;
  double threshold = 0.0;  // gamma sqrt(-b)
};

/// Tunes the leading eigenvalue to lambda_on, runs one measurement from a
/// small random initial condition (direction drawn from `seed`, norm
/// settings.init_scale) and reads off the network type: a limit cycle is
/// GAS, an escape is NH, decay is Quiescent. gamma is evaluated on the
/// spectrum at criticality.
TypeDemoReport type_demo(const InputNetworkSpec& spec, double a, double b, double lambda_on,
                         std::uint64_t seed, const AmplitudeSettings& settings);

/// |cos| of the angle between x and v.
double alignment(const Eigen::VectorXd& x, const Eigen::VectorXd& v);

}  // namespace hopfnet
