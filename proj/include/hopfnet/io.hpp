#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"

#include "hopfnet/dynamics.hpp"
#include "hopfnet/lyapunov.hpp"
#include "hopfnet/network.hpp"
#include "hopfnet/recognition.hpp"
#include "hopfnet/spectral.hpp"

namespace hopfnet {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// CSV layout: first line is n, then n rows of n comma-separated values.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& in);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// Columns t, x_1..x_n, y_1..y_n.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Columns lambda, outcome, amplitude, period (empty cell when absent).
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

nlohmann::json to_json(const GammaSet& g);
nlohmann::json to_json(const BifurcationReport& r);
nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const LinearFit& f);
nlohmann::json to_json(const SweepResult& s);  // protocol metadata and fit summary
nlohmann::json to_json(const NumericEvidence& e);
nlohmann::json to_json(const PerronReport& r);
nlohmann::json to_json(const TypeDemoReport& r);

/// {"r": [...], "c": [[...], ...]}
InputNetworkSpec input_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InputNetworkSpec& spec);

}  // namespace hopfnet
