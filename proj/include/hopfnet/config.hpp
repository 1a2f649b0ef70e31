#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hopfnet/dynamics.hpp"
#include "hopfnet/network.hpp"

namespace hopfnet {

enum class Command { Build, Classify, Sweep, Verify, Demo };

std::string_view to_string(Command c);

/// How the "a" key is read: as-is, or as a multiple of the critical ratio gamma.
enum class AUnits { Absolute, Gamma };

struct WignerParams {
  double entry_std = 1.0;
  double shift = 3.0;
  bool operator==(const WignerParams&) const = default;
};

/// Generator for random Dale/Hebbian input networks (see random_input_spec).
struct InputParams {
  double density = 0.2;
  double weight = 1.0;
  double r_min = -1.0;
  double r_max = 0.0;
  bool operator==(const InputParams&) const = default;
};

struct ExperimentConfig {
  Command command = Command::Classify;
  int n = 0;
  double a = 0.0;
  double b = -1.0;
  AUnits a_units = AUnits::Absolute;
  Construction construction = Construction::SpectralSynthesis;
  BulkSpec bulk;
  double leading = 0.0;
  WignerParams wigner;
  InputParams input;
  std::optional<std::string> matrix_file;
  std::optional<std::string> input_spec_file;
  std::vector<double> lambda_grid;
  SweepProtocol protocol = SweepProtocol::FreshSmallInit;
  double lambda_on = 0.02;
  AmplitudeSettings dynamics;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "out";
  int threads = 1;  // 0 = hardware concurrency
  bool export_trajectory = false;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Strict JSON ingestion: unknown keys are rejected at every level; missing
/// optional keys keep the defaults above. Throws ParseError (with line and
/// column), UnknownKey, MissingRequired or InvalidValue.
ExperimentConfig parse_config(std::string_view text);

nlohmann::json config_to_json(const ExperimentConfig& config);
std::string serialize_config(const ExperimentConfig& config);

/// Runs the configured experiment and writes report.json plus data files
/// into output_dir. Files are staged and moved into place only on success.
/// Returns 0 on success, 2 when a verify run finds analytic and numeric
/// classifications disagreeing, 1 on any error (diagnostic written to `diag`).
int execute(const ExperimentConfig& config, std::ostream& diag);

}  // namespace hopfnet
