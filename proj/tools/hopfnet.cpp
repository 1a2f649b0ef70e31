#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hopfnet/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Criticality analysis for networks of coupled Andronov-Hopf oscillators"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  int threads = -1;

  const std::pair<const char*, const char*> commands[] = {
      {"build", "construct coupling matrices and write matrix.csv"},
      {"classify", "analytic first Lyapunov coefficient and critical ratio"},
      {"sweep", "amplitude sweep over the leading eigenvalue"},
      {"verify", "compare analytic and numerical classifications"},
      {"demo", "GAS/NH type switching on an input network R + C"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seeds, "seed; repeatable, overrides the config seeds");
    sub->add_option("--threads", threads, "worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  std::ifstream in(config_path);
  std::stringstream text;
  text << in.rdbuf();

  hopfnet::ExperimentConfig config;
  try {
    // The subcommand decides the command; the config may omit or disagree.
    auto json = nlohmann::json::parse(text.str(), nullptr, false);
    if (json.is_object()) {
      json["command"] = command;
      config = hopfnet::parse_config(json.dump());
    } else {
      config = hopfnet::parse_config(text.str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << config_path << ": " << e.what() << '\n';
    return 1;
  }

  if (!out_dir.empty()) config.output_dir = out_dir;
  if (!seeds.empty()) config.seeds = seeds;
  if (threads >= 0) config.threads = threads;

  return hopfnet::execute(config, std::cerr);
}
