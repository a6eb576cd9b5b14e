#include "safari/client.hpp"

#include <numeric>
#include <string>

#include "safari/errors.hpp"
#include "safari/kernels.hpp"

namespace safari {

BatchSampler::BatchSampler(std::size_t sample_count, std::size_t batch_size, std::uint64_t seed)
    : batch_size_(batch_size), order_(sample_count), engine_(seed) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (batch_size_ < order_.size()) rng::shuffle(std::span<std::size_t>(order_), engine_);
}

std::vector<std::size_t> BatchSampler::next() {
  if (batch_size_ >= order_.size()) return order_;
  if (cursor_ + batch_size_ > order_.size()) {
    rng::shuffle(std::span<std::size_t>(order_), engine_);
    cursor_ = 0;
  }
  std::vector<std::size_t> batch(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                                 order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + batch_size_));
  cursor_ += batch_size_;
  return batch;
}

LocalResult local_sparse_train(const ParamVector& global, const ClientState& client,
                               const LocalTrainingOptions& options) {
  if (!client.objective || client.objective->sample_count() == 0) {
    throw ClientMisconfigurationError("client " + std::to_string(client.id) + " has no local data");
  }
  if (client.batch_size == 0) {
    throw ClientMisconfigurationError("client " + std::to_string(client.id) + " has batch size 0");
  }
  if (!(options.learning_rate > 0.0)) throw PreconditionError("learning rate must be > 0");
  if (options.local_steps == 0) throw PreconditionError("local steps must be >= 1");
  const Objective& objective = *client.objective;
  if (global.size() != objective.dimension()) {
    throw ConfigError("global model length does not match client objective");
  }

  const std::uint64_t mask_seed = rng::derive(options.experiment_seed, rng::Purpose::mask,
                                              client.stream_key, options.round);
  BatchSampler mask_batches(objective.sample_count(), client.batch_size, mask_seed);
  const std::vector<std::size_t> saliency_batch = mask_batches.next();

  LocalResult result;
  result.mask = compute_mask({options.mask_kind, options.sparsity, mask_seed, saliency_batch},
                             global, objective);
  result.model = apply_mask(global, result.mask);
  result.d_hat = ParamVector(global.size());
  if (options.track_full_gradients) result.h_hat = ParamVector(global.size());

  BatchSampler batches(objective.sample_count(), client.batch_size,
                       rng::derive(options.experiment_seed, rng::Purpose::batch, client.stream_key,
                                   options.round));
  const double step = options.learning_rate / static_cast<double>(options.local_steps);
  ParamVector grad, masked(global.size()), full;

  for (std::size_t k = 0; k < options.local_steps; ++k) {
    const std::vector<std::size_t> batch = batches.next();
    result.step_losses.push_back(objective.loss_and_gradient(result.model, batch, grad));
    kernels::select(grad.span(), result.mask.span(), masked.span());
    kernels::axpy(1.0, masked.span(), result.d_hat.span());
    if (options.track_full_gradients) {
      objective.full_loss_and_gradient(result.model, full);
      kernels::select(full.span(), result.mask.span(), full.span());
      kernels::axpy(1.0, full.span(), result.h_hat.span());
    }
    kernels::axpy(-step, masked.span(), result.model.span());
  }
  if (!result.model.all_finite()) {
    throw NumericError("client " + std::to_string(client.id) + " produced a non-finite model",
                       static_cast<long>(options.round));
  }

  const double inv_steps = 1.0 / static_cast<double>(options.local_steps);
  kernels::scale(inv_steps, result.d_hat.span());
  if (options.track_full_gradients) kernels::scale(inv_steps, result.h_hat.span());
  return result;
}

}  // namespace safari
