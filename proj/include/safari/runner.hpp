#pragma once

#include <memory>
#include <vector>

#include "safari/analysis.hpp"
#include "safari/config.hpp"
#include "safari/data.hpp"
#include "safari/federation.hpp"

namespace safari {

// Mean cross-entropy and argmax accuracy over the holdout; top-5 accuracy
// when the model has at least five classes. A true label counts as top-k when
// fewer than k logits are strictly larger.
EvalMetrics evaluate(const ParamVector& params, const ModelSpec& spec, const Dataset& holdout);

// He-normal weights scaled by `scale`, zero biases.
ParamVector initial_parameters(const ModelSpec& spec, double scale, std::uint64_t seed);

// Everything an experiment needs before the round loop.
struct ExperimentSetup {
  ModelSpec spec;
  std::shared_ptr<const Dataset> train;
  std::shared_ptr<const Dataset> holdout;
  PartitionPlan plan;
  std::vector<ClientState> clients;
  ParamVector initial;
  FederationOptions options;
};

ExperimentSetup build_experiment(const ExperimentConfig& config);

struct ExperimentResult {
  std::vector<ModeRun> runs;
  std::vector<AnalysisReport> reports;  // one per run
  PartitionPlan plan;
};

// T = 0 returns the initial model and no records.
ExperimentResult run_experiment(const ExperimentConfig& config);

AnalysisReport analyze_run(const ModeRun& run, const ExperimentSetup& setup,
                           const ExperimentConfig& config);

}  // namespace safari
