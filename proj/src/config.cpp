#include "hopfnet/config.hpp"

#include <algorithm>
#include <initializer_list>
#include <string>

#include "hopfnet/error.hpp"

namespace hopfnet {

using nlohmann::json;

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Build: return "build";
    case Command::Classify: return "classify";
    case Command::Sweep: return "sweep";
    case Command::Verify: return "verify";
    case Command::Demo: return "demo";
  }
  return "classify";
}

namespace {

template <class E>
struct Names {
  E value;
  const char* name;
};

constexpr Names<Command> kCommands[] = {{Command::Build, "build"},
                                        {Command::Classify, "classify"},
                                        {Command::Sweep, "sweep"},
                                        {Command::Verify, "verify"},
                                        {Command::Demo, "demo"}};
constexpr Names<Construction> kConstructions[] = {
    {Construction::SpectralSynthesis, "spectral"},
    {Construction::WignerDeflated, "wigner"},
    {Construction::InputPlusConnectivity, "input"}};
constexpr Names<BulkDistribution> kDistributions[] = {
    {BulkDistribution::UniformOnInterval, "uniform"},
    {BulkDistribution::SemicircleScaled, "semicircle"}};
constexpr Names<SweepProtocol> kProtocols[] = {{SweepProtocol::FreshSmallInit, "fresh"},
                                               {SweepProtocol::ContinuationUp, "up"},
                                               {SweepProtocol::ContinuationDown, "down"}};
constexpr Names<AUnits> kAUnits[] = {{AUnits::Absolute, "absolute"}, {AUnits::Gamma, "gamma"}};

template <class E, std::size_t N>
E enum_from(const json& j, const Names<E> (&table)[N], const std::string& key) {
  if (!j.is_string()) throw Error(ErrorCode::InvalidValue, "'" + key + "' must be a string");
  const auto text = j.get<std::string>();
  for (const auto& entry : table)
    if (text == entry.name) return entry.value;
  std::string allowed;
  for (const auto& entry : table) allowed += std::string(allowed.empty() ? "" : ", ") + entry.name;
  throw Error(ErrorCode::InvalidValue, "'" + key + "' = \"" + text + "\"; expected one of " + allowed);
}

template <class E, std::size_t N>
const char* enum_name(E value, const Names<E> (&table)[N]) {
  for (const auto& entry : table)
    if (entry.value == value) return entry.name;
  return table[0].name;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::InvalidValue, "'" + where + "' must be an object");
  for (const auto& [key, _] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error(ErrorCode::UnknownKey, where.empty() ? "'" + key + "'" : "'" + where + "." + key + "'");
}

double number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw Error(ErrorCode::InvalidValue, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

int integer(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw Error(ErrorCode::InvalidValue, std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

void position(std::string_view text, std::size_t byte, std::size_t& line, std::size_t& column) {
  line = 1;
  column = 1;
  for (std::size_t i = 0; i < std::min(byte > 0 ? byte - 1 : 0, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

AmplitudeSettings parse_dynamics(const json& j) {
  reject_unknown(j,
                 {"dt_max", "stride", "t_transient", "t_measure", "decay_tol", "cycle_tol",
                  "escape_bound", "departure_radius", "init_scale", "init_scale_large",
                  "fit_tol_fraction", "min_r_squared"},
                 "dynamics");
  AmplitudeSettings s;
  s.dt_max = number(j, "dt_max", s.dt_max);
  s.stride = integer(j, "stride", s.stride);
  s.t_transient = number(j, "t_transient", s.t_transient);
  s.t_measure = number(j, "t_measure", s.t_measure);
  s.decay_tol = number(j, "decay_tol", s.decay_tol);
  s.cycle_tol = number(j, "cycle_tol", s.cycle_tol);
  s.escape_bound = number(j, "escape_bound", s.escape_bound);
  s.departure_radius = number(j, "departure_radius", s.departure_radius);
  s.init_scale = number(j, "init_scale", s.init_scale);
  s.init_scale_large = number(j, "init_scale_large", s.init_scale_large);
  s.fit_tol_fraction = number(j, "fit_tol_fraction", s.fit_tol_fraction);
  s.min_r_squared = number(j, "min_r_squared", s.min_r_squared);
  check_settings(s);
  return s;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 0, column = 0;
    position(text, e.byte, line, column);
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " +
                                           std::to_string(column) + ": " + e.what());
  }

  reject_unknown(j,
                 {"command", "n", "a", "b", "a_units", "construction", "bulk", "leading", "wigner",
                  "input", "matrix_file", "input_spec_file", "lambda_grid", "protocol",
                  "lambda_on", "dynamics", "seed", "output_dir", "threads", "export_trajectory"},
                 "");
  if (!j.contains("command")) throw Error(ErrorCode::MissingRequired, "'command'");
  if (!j.contains("n")) throw Error(ErrorCode::MissingRequired, "'n'");

  ExperimentConfig c;
  c.command = enum_from(j.at("command"), kCommands, "command");
  c.n = integer(j, "n", 0);
  if (c.n < 2) throw Error(ErrorCode::InvalidValue, "'n' must be >= 2");
  c.a = number(j, "a", c.a);
  c.b = number(j, "b", c.b);
  if (j.contains("a_units")) c.a_units = enum_from(j.at("a_units"), kAUnits, "a_units");
  if (j.contains("construction"))
    c.construction = enum_from(j.at("construction"), kConstructions, "construction");
  if (j.contains("bulk")) {
    const json& b = j.at("bulk");
    reject_unknown(b, {"d_min", "d_max", "distribution"}, "bulk");
    c.bulk.d_min = number(b, "d_min", c.bulk.d_min);
    c.bulk.d_max = number(b, "d_max", c.bulk.d_max);
    if (b.contains("distribution"))
      c.bulk.distribution = enum_from(b.at("distribution"), kDistributions, "bulk.distribution");
    check_bulk(c.bulk);
  }
  c.leading = number(j, "leading", c.leading);
  if (j.contains("wigner")) {
    const json& w = j.at("wigner");
    reject_unknown(w, {"entry_std", "shift"}, "wigner");
    c.wigner.entry_std = number(w, "entry_std", c.wigner.entry_std);
    c.wigner.shift = number(w, "shift", c.wigner.shift);
  }
  if (j.contains("input")) {
    const json& in = j.at("input");
    reject_unknown(in, {"density", "weight", "r_min", "r_max"}, "input");
    c.input.density = number(in, "density", c.input.density);
    c.input.weight = number(in, "weight", c.input.weight);
    c.input.r_min = number(in, "r_min", c.input.r_min);
    c.input.r_max = number(in, "r_max", c.input.r_max);
  }
  auto path = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_string())
      throw Error(ErrorCode::InvalidValue, std::string("'") + key + "' must be a string");
    return j.at(key).get<std::string>();
  };
  c.matrix_file = path("matrix_file");
  c.input_spec_file = path("input_spec_file");
  if (j.contains("lambda_grid")) {
    const json& g = j.at("lambda_grid");
    if (!g.is_array()) throw Error(ErrorCode::InvalidValue, "'lambda_grid' must be an array");
    for (const auto& v : g) {
      if (!v.is_number()) throw Error(ErrorCode::InvalidValue, "'lambda_grid' entries must be numbers");
      c.lambda_grid.push_back(v.get<double>());
    }
    std::sort(c.lambda_grid.begin(), c.lambda_grid.end());
  }
  if (j.contains("protocol")) c.protocol = enum_from(j.at("protocol"), kProtocols, "protocol");
  c.lambda_on = number(j, "lambda_on", c.lambda_on);
  if (j.contains("dynamics")) c.dynamics = parse_dynamics(j.at("dynamics"));
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    c.seeds.clear();
    auto take = [&](const json& v) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw Error(ErrorCode::InvalidValue, "'seed' entries must be unsigned integers");
      c.seeds.push_back(v.get<std::uint64_t>());
    };
    if (s.is_array()) {
      for (const auto& v : s) take(v);
    } else {
      take(s);
    }
    if (c.seeds.empty()) throw Error(ErrorCode::InvalidValue, "'seed' must not be empty");
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string())
      throw Error(ErrorCode::InvalidValue, "'output_dir' must be a string");
    c.output_dir = j.at("output_dir").get<std::string>();
  }
  c.threads = integer(j, "threads", c.threads);
  if (c.threads < 0) throw Error(ErrorCode::InvalidValue, "'threads' must be >= 0");
  if (j.contains("export_trajectory")) {
    if (!j.at("export_trajectory").is_boolean())
      throw Error(ErrorCode::InvalidValue, "'export_trajectory' must be a boolean");
    c.export_trajectory = j.at("export_trajectory").get<bool>();
  }

  if ((c.command == Command::Sweep || c.command == Command::Verify) && c.lambda_grid.empty())
    throw Error(ErrorCode::MissingRequired, "'lambda_grid' is required for sweep and verify");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j = {
      {"command", enum_name(c.command, kCommands)},
      {"n", c.n},
      {"a", c.a},
      {"b", c.b},
      {"a_units", enum_name(c.a_units, kAUnits)},
      {"construction", enum_name(c.construction, kConstructions)},
      {"bulk",
       {{"d_min", c.bulk.d_min},
        {"d_max", c.bulk.d_max},
        {"distribution", enum_name(c.bulk.distribution, kDistributions)}}},
      {"leading", c.leading},
      {"wigner", {{"entry_std", c.wigner.entry_std}, {"shift", c.wigner.shift}}},
      {"input",
       {{"density", c.input.density},
        {"weight", c.input.weight},
        {"r_min", c.input.r_min},
        {"r_max", c.input.r_max}}},
      {"lambda_grid", c.lambda_grid},
      {"protocol", enum_name(c.protocol, kProtocols)},
      {"lambda_on", c.lambda_on},
      {"dynamics",
       {{"dt_max", c.dynamics.dt_max},
        {"stride", c.dynamics.stride},
        {"t_transient", c.dynamics.t_transient},
        {"t_measure", c.dynamics.t_measure},
        {"decay_tol", c.dynamics.decay_tol},
        {"cycle_tol", c.dynamics.cycle_tol},
        {"escape_bound", c.dynamics.escape_bound},
        {"departure_radius", c.dynamics.departure_radius},
        {"init_scale", c.dynamics.init_scale},
        {"init_scale_large", c.dynamics.init_scale_large},
        {"fit_tol_fraction", c.dynamics.fit_tol_fraction},
        {"min_r_squared", c.dynamics.min_r_squared}}},
      {"seed", c.seeds},
      {"output_dir", c.output_dir},
      {"threads", c.threads},
      {"export_trajectory", c.export_trajectory},
  };
  if (c.matrix_file) j["matrix_file"] = *c.matrix_file;
  if (c.input_spec_file) j["input_spec_file"] = *c.input_spec_file;
  return j;
}

std::string serialize_config(const ExperimentConfig& config) {
  return config_to_json(config).dump(2);
}

}  // namespace hopfnet
