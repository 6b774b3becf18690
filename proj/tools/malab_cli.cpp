// Command-line runner for the experiment scenarios.

#include <malab/experiment.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Monge-Ampere boundary regularity laboratory"};
  std::string config_path, scenario, out_dir = "malab_out";
  long seed = -1;
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--scenario", scenario, "scenario name (overrides the config)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized checks (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    malab::Config cfg = config_path.empty() ? malab::Config() : malab::Config::load(config_path);
    if (!scenario.empty()) cfg.set("scenario", scenario);
    if (seed >= 0) cfg.set("seed", std::to_string(seed));
    const auto exp = malab::ExperimentConfig::from(cfg);
    const auto result = malab::run_experiment(exp, out_dir);
    std::cout << result.summary;
    std::cout << "outputs in " << out_dir << ":";
    for (const auto& f : result.files) std::cout << ' ' << f;
    std::cout << '\n';
    return result.status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
