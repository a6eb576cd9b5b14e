// safari: run, validate and inspect federated experiments.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "safari/config.hpp"
#include "safari/kernels.hpp"
#include "safari/output.hpp"
#include "safari/runner.hpp"

namespace {

std::vector<safari::AggregationMode> parse_modes(const std::string& list) {
  std::vector<safari::AggregationMode> modes;
  std::stringstream in(list);
  std::string name;
  while (std::getline(in, name, ',')) {
    if (!name.empty()) modes.push_back(safari::parse_aggregation_mode(name));
  }
  return modes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse federated learning over unreliable links"};
  app.require_subcommand(1);

  std::string config_path;
  std::string modes;
  std::string out_dir;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run the configured experiment and write metrics");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--modes", modes, "Comma-separated aggregation modes: safari,drop,fedavg");
  run->add_option("--out", out_dir, "Output directory (overrides experiment.output_dir)");
  auto* seed_opt = run->add_option("--seed", seed, "Experiment seed override");

  auto* validate = app.add_subcommand("validate", "Check a config file and list every problem");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  std::string matrix_out;
  auto* matrix = app.add_subcommand("matrix", "Run the safari mode and dump its final similarity matrix");
  matrix->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  matrix->add_option("--out", matrix_out, "Destination CSV")->required();
  auto* matrix_seed = matrix->add_option("--seed", seed, "Experiment seed override");

  CLI11_PARSE(app, argc, argv);

  try {
    safari::ExperimentConfig config = safari::load_config(config_path);

    if (*validate) {
      std::cout << "config OK: " << config.clients << " clients, " << config.rounds << " rounds\n";
      return 0;
    }

    if ((*run && *seed_opt) || (*matrix && *matrix_seed)) config.seed = seed;

    if (*matrix) {
      config.modes = {safari::AggregationMode::safari};
      const safari::ExperimentResult result = safari::run_experiment(config);
      std::ofstream out(matrix_out, std::ios::binary);
      if (!out) throw safari::Error("cannot write " + matrix_out);
      safari::write_similarity_csv(out, result.runs.front().similarity);
      return 0;
    }

    if (!modes.empty()) config.modes = parse_modes(modes);
    if (!out_dir.empty()) config.output_dir = out_dir;
    std::cerr << "kernels: " << safari::kernels::isa_name(safari::kernels::active().isa) << '\n';
    const safari::ExperimentResult result = safari::run_experiment(config);
    safari::write_outputs(config.output_dir, result.runs, result.reports);
    for (const auto& r : result.runs) {
      const auto& last = r.records.empty() ? nullptr : &r.records.back();
      std::cout << safari::aggregation_mode_name(r.mode) << ": " << r.records.size() << " rounds";
      if (last && last->evaluated) {
        std::cout << ", final eval_loss " << last->eval.loss << ", eval_acc " << last->eval.accuracy;
      }
      std::cout << '\n';
    }
    std::cout << "outputs written to " << config.output_dir.string() << '\n';
  } catch (const safari::ConfigValidationError& e) {
    for (const auto& p : e.problems()) std::cerr << p << '\n';
    return 2;
  } catch (const safari::NumericError& e) {
    std::cerr << "numeric failure in round " << e.round() << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
