#include "hopfnet/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hopfnet/error.hpp"

namespace hopfnet {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

namespace {

double parse_double(std::string_view text, int line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
  return v;
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty matrix file");
  const double nd = parse_double(line, 1);
  const auto n = static_cast<Eigen::Index>(nd);
  if (nd != static_cast<double>(n) || n < 1)
    throw Error(ErrorCode::ParseError, "line 1: header must be a positive integer");

  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int lineno = static_cast<int>(i) + 2;
    if (!std::getline(in, line))
      throw Error(ErrorCode::ParseError, "expected " + std::to_string(n) + " rows, got " +
                                             std::to_string(i));
    std::string_view rest(line);
    Eigen::Index j = 0;
    while (true) {
      const auto comma = rest.find(',');
      if (j >= n)
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": too many columns");
      m(i, j++) = parse_double(rest.substr(0, comma), lineno);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (j != n)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(n) + " columns, got " +
                                             std::to_string(j));
  }
  return m;
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_matrix_csv(in);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const Eigen::Index n = traj.samples.empty() ? 0 : traj.samples.front().n();
  out << 't';
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",y_" << i;
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_double(traj.times[k]);
    for (double v : traj.samples[k].x) out << ',' << format_double(v);
    for (double v : traj.samples[k].y) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "lambda,outcome,amplitude,period\n";
  for (std::size_t i = 0; i < sweep.lambda_grid.size(); ++i) {
    const auto& m = sweep.measures[i];
    out << format_double(sweep.lambda_grid[i]) << ',' << to_string(m.outcome) << ',';
    if (m.amplitude) out << format_double(*m.amplitude);
    out << ',';
    if (m.period_estimate) out << format_double(*m.period_estimate);
    out << '\n';
  }
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const GammaSet& g) {
  return {{"gamma_quartic", g.gamma_quartic},
          {"gamma_cross", std::vector<double>(g.gamma_cross.begin(), g.gamma_cross.end())},
          {"weighted_sum", g.weighted_sum}};
}

json to_json(const BifurcationReport& r) {
  return {{"classification", std::string(to_string(r.classification))},
          {"l1_subunit", r.l1_subunit},
          {"l1_full", r.l1_full},
          {"term_b", r.term_b},
          {"term_a", r.term_a},
          {"gamma", optional_number(r.gamma)},
          {"threshold", optional_number(r.threshold)},
          {"degeneracy_band", r.degeneracy_band}};
}

json to_json(const ValidationReport& r) {
  return {{"passed", r.passed()},
          {"symmetry_defect", r.symmetry_defect},
          {"symmetric", r.symmetric},
          {"eigenvalues_near_target", r.eigenvalues_near_target},
          {"rest_negative", r.rest_negative},
          {"rest_in_bulk", r.rest_in_bulk},
          {"leading", r.leading},
          {"gap", r.gap}};
}

json to_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

json to_json(const SweepResult& s) {
  return {{"protocol", std::string(to_string(s.protocol))},
          {"init_scale", s.init_scale},
          {"points", s.lambda_grid.size()},
          {"fit", s.fit ? to_json(*s.fit) : json(nullptr)}};
}

json to_json(const NumericEvidence& e) {
  return {{"classification", std::string(to_string(e.classification))},
          {"decays_below_and_cycles_above", e.decays_below_and_cycles_above},
          {"escapes_above", e.escapes_above},
          {"bistable_lambdas", e.bistable_lambdas},
          {"fit", e.fit ? to_json(*e.fit) : json(nullptr)},
          {"fit_accepted", e.fit_accepted},
          {"hysteresis", e.hysteresis},
          {"reason", e.reason}};
}

json to_json(const PerronReport& r) {
  return {{"leading", r.leading},
          {"gap", r.gap},
          {"eigenvector_positive", r.eigenvector_positive},
          {"irreducible", r.irreducible}};
}

json to_json(const TypeDemoReport& r) {
  return {{"mode", std::string(to_string(r.mode))},
          {"alignment", r.alignment},
          {"amplitude", optional_number(r.amplitude)},
          {"escape_time", optional_number(r.escape_time)},
          {"leading", r.leading},
          {"gap", r.gap},
          {"gamma", r.gamma},
          {"threshold", r.threshold}};
}

InputNetworkSpec input_spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "input spec must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "r" && key != "c") throw Error(ErrorCode::UnknownKey, "input spec key '" + key + "'");
  if (!j.contains("r") || !j.contains("c"))
    throw Error(ErrorCode::MissingRequired, "input spec needs \"r\" and \"c\"");
  try {
    const auto r = j.at("r").get<std::vector<double>>();
    const auto c = j.at("c").get<std::vector<std::vector<double>>>();
    InputNetworkSpec spec;
    const auto n = static_cast<Eigen::Index>(r.size());
    spec.r = Eigen::Map<const Eigen::VectorXd>(r.data(), n);
    spec.c.resize(static_cast<Eigen::Index>(c.size()), n);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i].size() != r.size())
        throw Error(ErrorCode::DimensionMismatch, "row " + std::to_string(i) + " of c has " +
                                                      std::to_string(c[i].size()) + " entries");
      for (std::size_t k = 0; k < c[i].size(); ++k)
        spec.c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = c[i][k];
    }
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

json to_json(const InputNetworkSpec& spec) {
  json c = json::array();
  for (Eigen::Index i = 0; i < spec.c.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(spec.c.cols()));
    for (Eigen::Index k = 0; k < spec.c.cols(); ++k) row[static_cast<std::size_t>(k)] = spec.c(i, k);
    c.push_back(row);
  }
  return {{"r", std::vector<double>(spec.r.begin(), spec.r.end())}, {"c", c}};
}

}  // namespace hopfnet
