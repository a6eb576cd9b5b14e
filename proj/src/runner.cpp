#include "safari/runner.hpp"

#include <algorithm>
#include <cmath>

#include "safari/errors.hpp"
#include "safari/rng.hpp"

namespace safari {

EvalMetrics evaluate(const ParamVector& params, const ModelSpec& spec, const Dataset& holdout) {
  if (holdout.size() == 0) throw PreconditionError("evaluate: empty holdout");
  const Batch batch = holdout.all();
  const std::vector<double> out = logits(params, spec, batch);
  const std::size_t k = spec.output_dim;
  std::size_t top1 = 0, top5 = 0;
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    const double* row = out.data() + r * k;
    const auto label = static_cast<std::size_t>(batch.labels[r]);
    std::size_t larger = 0;
    for (std::size_t c = 0; c < k; ++c) {
      if (row[c] > row[label]) ++larger;
    }
    // Argmax with first-index tie-break.
    const auto argmax = static_cast<std::size_t>(std::max_element(row, row + k) - row);
    if (argmax == label) ++top1;
    if (larger < 5) ++top5;
  }
  const auto n = static_cast<double>(batch.rows());
  EvalMetrics metrics;
  metrics.loss = forward_loss(params, spec, batch);
  metrics.accuracy = static_cast<double>(top1) / n;
  if (k >= 5) metrics.top5 = static_cast<double>(top5) / n;
  return metrics;
}

ParamVector initial_parameters(const ModelSpec& spec, double scale, std::uint64_t seed) {
  rng::Engine engine = rng::make(seed, rng::Purpose::init);
  std::normal_distribution<double> normal(0.0, 1.0);
  ParamVector x(spec.parameter_count());
  const double sd1 = scale * std::sqrt(2.0 / static_cast<double>(spec.input_dim));
  const double sd2 = scale * std::sqrt(2.0 / static_cast<double>(spec.hidden_dim));
  for (std::size_t n = 0; n < spec.input_dim * spec.hidden_dim; ++n) {
    x[spec.w1_offset() + n] = sd1 * normal(engine);
  }
  for (std::size_t n = 0; n < spec.hidden_dim * spec.output_dim; ++n) {
    x[spec.w2_offset() + n] = sd2 * normal(engine);
  }
  return x;
}

ExperimentSetup build_experiment(const ExperimentConfig& config) {
  ExperimentSetup setup;
  const Dataset full = config.csv_path
                           ? load_csv_dataset(*config.csv_path)
                           : generate_blobs(config.classes, config.samples_per_class,
                                            config.input_dim, config.spread, config.seed);
  HoldoutSplit split = split_holdout(full, config.holdout_fraction, config.seed);
  setup.train = std::make_shared<const Dataset>(std::move(split.train));
  setup.holdout = std::make_shared<const Dataset>(std::move(split.holdout));
  setup.spec = {full.input_dim, config.hidden_dim, full.class_count};

  switch (config.partition) {
    case PartitionMode::noniid:
      setup.plan = partition_noniid(*setup.train, config.clients, config.groups,
                                    config.labels_per_client, config.seed);
      break;
    case PartitionMode::iid:
      setup.plan = partition_noniid(*setup.train, config.clients, 1, setup.train->class_count,
                                    config.seed);
      break;
    case PartitionMode::clone:
      setup.plan = clusterable_clone_partition(*setup.train, config.clients, config.groups);
      break;
  }

  for (std::size_t i = 0; i < config.clients; ++i) {
    const ClientAssignment& a = setup.plan.clients[i];
    ClientState state;
    state.id = i;
    state.objective = std::make_shared<MlpObjective>(setup.spec, setup.train, a.samples);
    // Clones share their group's streams so same-group local models coincide.
    state.stream_key = setup.plan.clones ? a.group : i;
    state.batch_size = config.batch_size;
    setup.clients.push_back(std::move(state));
  }

  setup.initial = initial_parameters(setup.spec, config.init_scale, config.seed);

  FederationOptions& o = setup.options;
  o.rounds = config.rounds;
  o.learning_rate = config.learning_rate;
  o.local_steps = config.local_steps;
  o.mask_kind = config.mask_kind;
  o.sparsity = config.sparsity;
  o.experiment_seed = config.seed;
  o.channel_seed = config.effective_channel_seed();
  o.uplink = config.uplink;
  o.downlink = config.downlink;
  o.oracle_mode = config.oracle_mode;
  o.eval_every = config.eval_every;
  o.threads = config.threads;
  o.record_similarity = config.similarity_per_round;
  const ModelSpec spec = setup.spec;
  const std::shared_ptr<const Dataset> holdout = setup.holdout;
  o.evaluator = [spec, holdout](const ParamVector& x) { return evaluate(x, spec, *holdout); };
  return setup;
}

AnalysisReport analyze_run(const ModeRun& run, const ExperimentSetup& setup,
                           const ExperimentConfig& config) {
  AnalysisReport report;
  report.learning_rate = config.learning_rate;
  report.local_steps = config.local_steps;

  std::vector<double> phis;
  for (const RoundRecord& r : run.records) {
    report.delta_max = std::max(report.delta_max, r.delta_max);
    if (r.phi) phis.push_back(*r.phi);
  }
  if (!phis.empty()) {
    const SampleMean phi = sample_mean(phis);
    report.phi_measured = true;
    report.phi = phi.mean;
    report.phi_standard_error = phi.standard_error;
  }

  // Up to eight evenly spaced global models plus the final one.
  std::vector<ParamVector> points;
  const std::size_t available = run.snapshots.size();
  const std::size_t wanted = std::min<std::size_t>(8, available);
  for (std::size_t k = 0; k < wanted; ++k) {
    points.push_back(run.snapshots[k * available / wanted]);
  }
  if (points.empty() || !(points.back() == run.final_model)) points.push_back(run.final_model);
  if (points.size() < 2) points.insert(points.begin(), setup.initial);

  std::vector<const Objective*> objectives;
  for (const ClientState& c : setup.clients) objectives.push_back(c.objective.get());

  for (const ClientState& c : setup.clients) {
    const SampleMean s = estimate_sigma_sq(*c.objective, run.final_model, config.batch_size, 16,
                                           rng::derive(config.seed, rng::Purpose::analysis, c.id));
    if (s.mean >= report.sigma_sq) {
      report.sigma_sq = s.mean;
      report.sigma_sq_standard_error = s.standard_error;
    }
    report.smoothness_L = std::max(report.smoothness_L, estimate_smoothness(*c.objective, points));
  }

  const DissimilarityFit dense = estimate_dissimilarity(objectives, points);
  report.beta_sq = dense.beta_sq;
  report.zeta_sq = dense.zeta_sq;

  // Masked variant at the final model, one mask per client as it would train.
  std::vector<Mask> masks;
  for (const ClientState& c : setup.clients) {
    const std::uint64_t seed = rng::derive(config.seed, rng::Purpose::mask, c.stream_key, config.rounds);
    BatchSampler sampler(c.objective->sample_count(), c.batch_size, seed);
    const std::vector<std::size_t> batch = sampler.next();
    masks.push_back(compute_mask({config.mask_kind, config.sparsity, seed, batch}, run.final_model, *c.objective));
  }
  const std::vector<ParamVector> final_point{run.final_model};
  report.masked_zeta_sq = estimate_dissimilarity(objectives, final_point, {10.0, 10, masks}).zeta_sq;

  report.gamma = gamma_term(report.learning_rate, report.smoothness_L, report.local_steps);
  return report;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const ExperimentSetup setup = build_experiment(config);
  ExperimentResult result;
  result.plan = setup.plan;
  for (AggregationMode mode : config.modes) {
    ModeRun run = run_federation(mode, setup.clients, setup.initial, setup.options);
    result.reports.push_back(analyze_run(run, setup, config));
    result.runs.push_back(std::move(run));
  }
  return result;
}

}  // namespace safari
