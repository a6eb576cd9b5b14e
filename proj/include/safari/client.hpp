#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "safari/objective.hpp"
#include "safari/param_vector.hpp"
#include "safari/rng.hpp"
#include "safari/sparsity.hpp"

namespace safari {

struct ClientState {
  std::size_t id = 0;
  std::shared_ptr<const Objective> objective;
  // Key for the client's private random streams. Clients that share a key
  // (and data) draw identical batches and masks.
  std::uint64_t stream_key = 0;
  std::size_t batch_size = 1;
};

struct LocalTrainingOptions {
  double learning_rate = 0.0;  // eta; each local step uses eta / tau
  std::size_t local_steps = 1;  // tau
  MaskKind mask_kind = MaskKind::magnitude;
  double sparsity = 0.0;
  std::uint64_t experiment_seed = 0;
  std::size_t round = 0;
  // Also accumulate the exact local gradient at every iterate (h_hat).
  bool track_full_gradients = false;
};

struct LocalResult {
  ParamVector model;  // x_{i,tau}
  Mask mask;
  std::vector<double> step_losses;  // minibatch loss at x_{i,k-1}, k = 1..tau
  ParamVector d_hat;  // mean masked stochastic gradient over the tau steps
  ParamVector h_hat;  // mean masked full-data gradient at the same iterates
};

// Deterministic minibatch schedule: rows are drawn without replacement from a
// per-round shuffle and the pool is reshuffled when exhausted. A batch size at
// or above the local sample count always yields the full local data.
class BatchSampler {
 public:
  BatchSampler(std::size_t sample_count, std::size_t batch_size, std::uint64_t seed);
  std::vector<std::size_t> next();

 private:
  std::size_t batch_size_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  rng::Engine engine_;
};

// Prune the received global model, then run tau masked SGD steps. Gradients
// are taken at the current iterate and masked, so pruned weights stay zero.
LocalResult local_sparse_train(const ParamVector& global, const ClientState& client,
                               const LocalTrainingOptions& options);

}  // namespace safari
