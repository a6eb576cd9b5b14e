#pragma once

// The round loop: broadcast, downlink drop, local sparse training, uplink
// drop, similarity update, surrogate selection, aggregation, evaluation.
// Objective-agnostic; the config-driven runner builds MLP clients on top.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "safari/channel.hpp"
#include "safari/client.hpp"
#include "safari/server.hpp"

namespace safari {

struct EvalMetrics {
  double loss = 0.0;
  double accuracy = 0.0;
  std::optional<double> top5;
};

struct FederationOptions {
  std::size_t rounds = 0;  // T
  double learning_rate = 0.0;
  std::size_t local_steps = 1;
  MaskKind mask_kind = MaskKind::magnitude;
  double sparsity = 0.0;
  std::uint64_t experiment_seed = 0;
  std::uint64_t channel_seed = 0;
  LinkSchedule uplink = LinkSchedule::uniform(1, 1.0);
  LinkSchedule downlink = LinkSchedule::uniform(1, 1.0);
  // Dropped clients still train so phi can be measured; the server ignores them.
  bool oracle_mode = false;
  std::size_t eval_every = 1;
  // Record ||grad L(x^t)||^2 of the global objective at every broadcast model.
  bool track_global_gradient = false;
  // Keep a copy of the similarity matrix after every round's update.
  bool record_similarity = false;
  std::size_t threads = 1;
  // Global-model evaluation on held-out data, called on evaluation rounds.
  std::function<EvalMetrics(const ParamVector&)> evaluator;
};

struct RoundRecord {
  std::size_t round = 0;
  std::vector<std::size_t> active;
  std::vector<std::pair<std::size_t, std::size_t>> surrogates;
  bool skipped = false;
  bool evaluated = false;
  double train_loss = 0.0;
  EvalMetrics eval;
  std::vector<std::optional<double>> local_losses;  // mean minibatch loss per trained client
  std::vector<std::optional<double>> deltas;        // mask-induced error on the broadcast model
  double delta_max = 0.0;
  std::optional<double> phi;
  std::optional<double> global_grad_sq;  // at the model broadcast this round
  double wall_seconds = 0.0;
};

struct ModeRun {
  AggregationMode mode = AggregationMode::safari;
  std::vector<RoundRecord> records;
  ParamVector final_model;
  SimilarityMatrix similarity;
  std::vector<SimilarityMatrix> similarity_history;  // per round, when recorded
  // Global models at evaluation rounds, for the analysis fits.
  std::vector<ParamVector> snapshots;
};

ModeRun run_federation(AggregationMode mode, const std::vector<ClientState>& clients,
                       const ParamVector& initial, const FederationOptions& options);

// Mean full-data loss over clients and ||mean full gradient||^2.
std::pair<double, double> global_loss_and_grad_sq(const std::vector<ClientState>& clients,
                                                  const ParamVector& x);

}  // namespace safari
