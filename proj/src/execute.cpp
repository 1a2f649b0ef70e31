#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "hopfnet/config.hpp"
#include "hopfnet/error.hpp"
#include "hopfnet/io.hpp"
#include "hopfnet/lyapunov.hpp"
#include "hopfnet/recognition.hpp"
#include "hopfnet/spectral.hpp"

namespace hopfnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Files are written here first and renamed into the output directory once
/// the whole run has succeeded.
class Staging {
 public:
  explicit Staging(fs::path out) : out_(std::move(out)) {
    fs::create_directories(out_);
    std::random_device rd;
    dir_ = out_ / (".staging-" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;
  ~Staging() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  std::ofstream open(const std::string& name) {
    names_.push_back(name);
    std::ofstream f(dir_ / name);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + (dir_ / name).string());
    return f;
  }

  void commit() {
    for (const auto& name : names_) fs::rename(dir_ / name, out_ / name);
  }

 private:
  fs::path out_;
  fs::path dir_;
  std::vector<std::string> names_;
};

std::string with_seed(const std::string& stem, const std::string& ext, std::uint64_t seed,
                      bool multi) {
  return multi ? stem + "_" + std::to_string(seed) + ext : stem + ext;
}

InputNetworkSpec load_input_spec(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.input_spec_file) {
    std::ifstream in(*cfg.input_spec_file);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + *cfg.input_spec_file);
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
      j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, *cfg.input_spec_file + ": " + e.what());
    }
    return input_spec_from_json(j);
  }
  return random_input_spec(cfg.n, cfg.input.density, cfg.input.weight, cfg.input.r_min,
                           cfg.input.r_max, seed);
}

CouplingMatrix make_coupling(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.matrix_file) {
    CouplingMatrix m;
    m.entries = read_matrix_csv(fs::path(*cfg.matrix_file));
    if (m.n() != cfg.n)
      throw Error(ErrorCode::DimensionMismatch, "matrix file has n=" + std::to_string(m.n()) +
                                                    ", config has n=" + std::to_string(cfg.n));
    m.leading_target = eigendecompose(m).leading();  // NotSymmetric surfaces here
    return m;
  }
  switch (cfg.construction) {
    case Construction::SpectralSynthesis:
      return build_spectral(cfg.n, cfg.bulk, cfg.leading, seed);
    case Construction::WignerDeflated:
      return build_wigner_deflated(cfg.n, cfg.wigner.entry_std, cfg.wigner.shift, cfg.leading,
                                   seed);
    case Construction::InputPlusConnectivity: {
      const InputNetworkSpec spec = tune_input_to_criticality(load_input_spec(cfg, seed), cfg.leading);
      return assemble_input_network(spec, cfg.a, cfg.b).m;
    }
  }
  throw Error(ErrorCode::InvalidValue, "unknown construction");
}

struct Analytic {
  Spectrum spectrum;
  GammaSet gammas;
  double a = 0.0;  // absolute value used for the run
  BifurcationReport report;
};

Analytic analyse(const ExperimentConfig& cfg, const CouplingMatrix& m) {
  Analytic an;
  an.spectrum = eigendecompose(m);
  an.gammas = gamma_set(an.spectrum);
  an.a = cfg.a;
  if (cfg.a_units == AUnits::Gamma) an.a = cfg.a * gamma_threshold(an.gammas);
  an.report = classify_analytic(an.a, cfg.b, static_cast<int>(m.n()), an.gammas);
  return an;
}

json analytic_json(const Analytic& an) {
  json j = to_json(an.report);
  j["a"] = an.a;
  j["gamma_set"] = to_json(an.gammas);
  return j;
}

std::vector<double> negative_part(const std::vector<double>& grid) {
  std::vector<double> out;
  std::copy_if(grid.begin(), grid.end(), std::back_inserter(out), [](double l) { return l < 0.0; });
  return out;
}

json run_seed(const ExperimentConfig& cfg, std::uint64_t seed, Staging& staging, bool multi,
              bool& disagreement) {
  json run = {{"seed", seed}};

  if (cfg.command == Command::Demo) {
    const InputNetworkSpec spec = load_input_spec(cfg, seed);
    double a = cfg.a;
    if (cfg.a_units == AUnits::Gamma) {
      const auto critical = assemble_input_network(tune_input_to_criticality(spec, 0.0), 0.0, cfg.b);
      a = cfg.a * gamma_threshold(gamma_set(eigendecompose(critical.m)));
    }
    const auto net = assemble_input_network(spec, a, cfg.b);
    run["a"] = a;
    run["perron"] = to_json(perron_check(net.m));
    run["demo"] = to_json(type_demo(spec, a, cfg.b, cfg.lambda_on, seed, cfg.dynamics));
    if (cfg.export_trajectory) {
      // Same initial condition as type_demo draws from `seed`.
      const auto tuned = assemble_input_network(tune_input_to_criticality(spec, cfg.lambda_on), a, cfg.b);
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::VectorXd dir(tuned.n());
      for (Eigen::Index i = 0; i < tuned.n(); ++i) dir(i) = normal(rng);
      IntegrateOptions opts;
      opts.dt_max = cfg.dynamics.dt_max;
      opts.stride = cfg.dynamics.stride;
      opts.escape_bound = cfg.dynamics.escape_bound;
      opts.t_end = cfg.dynamics.t_transient + cfg.dynamics.t_measure;
      const Trajectory traj = integrate(
          tuned, {cfg.dynamics.init_scale * dir.normalized(), Eigen::VectorXd::Zero(tuned.n())}, opts);
      auto f = staging.open(with_seed("trajectory", ".csv", seed, multi));
      write_trajectory_csv(f, traj);
    }
    return run;
  }

  const CouplingMatrix m = make_coupling(cfg, seed);
  run["validation"] = to_json(validate_coupling(m));

  if (cfg.command == Command::Build) {
    auto f = staging.open(with_seed("matrix", ".csv", seed, multi));
    write_matrix_csv(f, m.entries);
    if (m.construction == Construction::InputPlusConnectivity) run["perron"] = to_json(perron_check(m));
    return run;
  }

  const Analytic an = analyse(cfg, m);
  run["analytic"] = analytic_json(an);
  if (cfg.command == Command::Classify) return run;

  const NetworkFamily family(an.a, cfg.b, m);
  if (cfg.command == Command::Sweep) {
    const SweepResult sweep =
        amplitude_sweep(family, cfg.lambda_grid, cfg.protocol, cfg.dynamics, cfg.threads);
    auto f = staging.open(with_seed("sweep", ".csv", seed, multi));
    write_sweep_csv(f, sweep);
    run["sweep"] = to_json(sweep);
    return run;
  }

  // Verify.
  if (an.report.threshold && !outside_exclusion_band(an.a, *an.report.threshold)) {
    run["numeric"] = nullptr;
    run["agreement"] = nullptr;
    run["note"] = "|a| within 20% of the threshold; numeric classification not attempted";
    return run;
  }
  const SweepResult fresh = amplitude_sweep(family, cfg.lambda_grid, SweepProtocol::FreshSmallInit,
                                            cfg.dynamics, cfg.threads);
  const SweepResult up = amplitude_sweep(family, cfg.lambda_grid, SweepProtocol::ContinuationUp,
                                         cfg.dynamics, cfg.threads);
  const SweepResult down = amplitude_sweep(family, cfg.lambda_grid,
                                           SweepProtocol::ContinuationDown, cfg.dynamics, cfg.threads);
  SweepResult probes;
  const auto below = negative_part(cfg.lambda_grid);
  if (!below.empty()) {
    AmplitudeSettings large = cfg.dynamics;
    large.init_scale = cfg.dynamics.init_scale_large;
    probes = amplitude_sweep(family, below, SweepProtocol::FreshSmallInit, large, cfg.threads);
  }
  const NumericEvidence ev = classify_numeric(up, down, fresh, probes, cfg.dynamics);

  const std::pair<const char*, const SweepResult*> files[] = {
      {"sweep", &fresh}, {"sweep_up", &up}, {"sweep_down", &down}, {"sweep_probe", &probes}};
  for (const auto& [stem, sweep] : files) {
    if (sweep->lambda_grid.empty()) continue;
    auto f = staging.open(with_seed(stem, ".csv", seed, multi));
    write_sweep_csv(f, *sweep);
  }

  const bool agree = (ev.classification == NumericClass::Supercritical &&
                      an.report.classification == Criticality::Supercritical) ||
                     (ev.classification == NumericClass::Subcritical &&
                      an.report.classification == Criticality::Subcritical);
  if (!agree) disagreement = true;
  run["numeric"] = to_json(ev);
  run["agreement"] = agree;
  return run;
}

}  // namespace

int execute(const ExperimentConfig& config, std::ostream& diag) {
  try {
    check_settings(config.dynamics);
    if ((config.command == Command::Sweep || config.command == Command::Verify) &&
        config.lambda_grid.empty())
      throw Error(ErrorCode::MissingRequired, "'lambda_grid' is required for sweep and verify");

    std::vector<std::uint64_t> seeds = config.seeds;
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    const bool multi = seeds.size() > 1;

    Staging staging(config.output_dir);
    bool disagreement = false;
    json report = {{"command", std::string(to_string(config.command))},
                   {"config", config_to_json(config)},
                   {"runs", json::array()}};
    for (std::uint64_t seed : seeds)
      report["runs"].push_back(run_seed(config, seed, staging, multi, disagreement));
    if (config.command == Command::Verify) report["agreement"] = !disagreement;

    {
      auto f = staging.open("report.json");
      f << report.dump(2) << '\n';
    }
    staging.commit();

    if (disagreement) {
      diag << "verify: analytic and numeric classifications disagree\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace hopfnet
