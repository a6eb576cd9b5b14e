#include "safari/federation.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <numeric>
#include <string>
#include <thread>

#include "safari/analysis.hpp"
#include "safari/errors.hpp"
#include "safari/kernels.hpp"

namespace safari {

namespace {

// Runs body(k) for k in [0, count). Results must be written to per-k slots.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < count; k += threads) body(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ActiveSet everyone(std::size_t round, std::size_t clients) {
  ActiveSet set;
  set.round = round;
  set.members.resize(clients);
  std::iota(set.members.begin(), set.members.end(), std::size_t{0});
  return set;
}

}  // namespace

std::pair<double, double> global_loss_and_grad_sq(const std::vector<ClientState>& clients,
                                                  const ParamVector& x) {
  ParamVector mean(x.size()), grad;
  double loss = 0.0;
  for (const ClientState& c : clients) {
    loss += c.objective->full_loss_and_gradient(x, grad);
    kernels::axpy(1.0, grad.span(), mean.span());
  }
  const auto m = static_cast<double>(clients.size());
  for (double& v : mean) v /= m;
  return {loss / m, squared_norm(mean)};
}

ModeRun run_federation(AggregationMode mode, const std::vector<ClientState>& clients,
                       const ParamVector& initial, const FederationOptions& options) {
  const std::size_t m = clients.size();
  if (m == 0) throw ConfigError("federation needs at least one client");
  options.uplink.validate(m, options.rounds);
  options.downlink.validate(m, options.rounds);
  if (options.eval_every == 0) throw ConfigError("eval_every must be >= 1");

  ModeRun run;
  run.mode = mode;
  run.similarity = SimilarityMatrix(m);
  ParamVector global = initial;
  const bool reliable = mode == AggregationMode::fedavg_reliable;

  for (std::size_t t = 0; t < options.rounds; ++t) {
    const auto started = std::chrono::steady_clock::now();
    RoundRecord record;
    record.round = t;
    record.local_losses.resize(m);
    record.deltas.resize(m);

    if (options.track_global_gradient) {
      record.global_grad_sq = global_loss_and_grad_sq(clients, global).second;
    }

    const RoundLinks links = reliable ? RoundLinks{everyone(t, m), everyone(t, m)}
                                      : simulate_round(options.downlink, options.uplink, t, m,
                                                       options.channel_seed);

    std::vector<std::size_t> trainers = options.oracle_mode ? everyone(t, m).members : links.reached.members;
    std::vector<std::optional<LocalResult>> results(m);
    LocalTrainingOptions local{options.learning_rate, options.local_steps, options.mask_kind,
                               options.sparsity,      options.experiment_seed, t,
                               options.oracle_mode};
    parallel_for(trainers.size(), options.threads, [&](std::size_t k) {
      const std::size_t i = trainers[k];
      results[i] = local_sparse_train(global, clients[i], local);
    });

    const bool global_nonzero = squared_norm(global) > 0.0;
    for (std::size_t i : links.reached.members) {
      const LocalResult& r = *results[i];
      double mean_loss = 0.0;
      for (double l : r.step_losses) mean_loss += l;
      record.local_losses[i] = mean_loss / static_cast<double>(r.step_losses.size());
      if (global_nonzero) {
        record.deltas[i] = measure_delta(global, r.mask);
        record.delta_max = std::max(record.delta_max, *record.deltas[i]);
      }
    }

    ReceivedModels received;
    for (std::size_t i : links.delivered.members) received.emplace(i, results[i]->model);
    update_similarity(run.similarity, received);
    if (options.record_similarity) run.similarity_history.push_back(run.similarity);
    AggregateOutcome outcome = aggregate(mode, received, run.similarity, links.delivered, m);
    record.active = links.delivered.members;
    record.surrogates = outcome.surrogates;

    if (options.oracle_mode && mode != AggregationMode::drop_no_compensation) {
      std::vector<ParamVector> h(m);
      std::vector<std::optional<std::size_t>> stand_in(m);
      std::vector<double> p(m, 1.0);
      for (std::size_t i = 0; i < m; ++i) h[i] = results[i]->h_hat;
      if (!reliable) {
        for (const auto& [missing, chosen] : outcome.surrogates) stand_in[missing] = chosen;
        for (std::size_t i = 0; i < m; ++i) {
          p[i] = options.downlink.probability(i, t) * options.uplink.probability(i, t);
          if (!links.delivered.contains(i)) continue;
          // Who would stand in for i had its update been lost this round.
          ActiveSet others = links.delivered;
          others.members.erase(std::find(others.members.begin(), others.members.end(), i));
          if (!others.empty()) stand_in[i] = select_surrogate(run.similarity, i, others);
        }
      }
      record.phi = compute_phi(h, stand_in, p);
    }

    if (outcome.model) {
      global = std::move(*outcome.model);
      if (!global.all_finite()) {
        throw NumericError("global model became non-finite in round " + std::to_string(t),
                           static_cast<long>(t));
      }
    } else {
      record.skipped = true;
    }

    if ((t + 1) % options.eval_every == 0 || t + 1 == options.rounds) {
      record.evaluated = true;
      double loss = 0.0;
      for (const ClientState& c : clients) loss += c.objective->full_loss(global);
      record.train_loss = loss / static_cast<double>(m);
      if (options.evaluator) record.eval = options.evaluator(global);
      run.snapshots.push_back(global);
    }
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    run.records.push_back(std::move(record));
  }
  run.final_model = std::move(global);
  return run;
}

}  // namespace safari
