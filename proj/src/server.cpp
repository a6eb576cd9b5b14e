#include "safari/server.hpp"

#include <string>

#include "safari/errors.hpp"
#include "safari/kernels.hpp"

namespace safari {

SimilarityMatrix::SimilarityMatrix(std::size_t clients)
    : clients_(clients), cells_(clients * clients) {}

std::optional<double> SimilarityMatrix::at(std::size_t u, std::size_t v) const {
  if (u >= clients_ || v >= clients_) throw ConfigError("similarity index out of range");
  return cells_[u * clients_ + v];
}

void SimilarityMatrix::set(std::size_t u, std::size_t v, double distance) {
  if (u >= clients_ || v >= clients_) throw ConfigError("similarity index out of range");
  cells_[u * clients_ + v] = distance;
  cells_[v * clients_ + u] = distance;
}

AggregationMode parse_aggregation_mode(std::string_view name) {
  if (name == "safari") return AggregationMode::safari;
  if (name == "fedavg" || name == "fedavg_reliable") return AggregationMode::fedavg_reliable;
  if (name == "drop" || name == "drop_no_compensation") return AggregationMode::drop_no_compensation;
  throw ConfigError("unknown aggregation mode '" + std::string(name) + "'");
}

std::string_view aggregation_mode_name(AggregationMode mode) {
  switch (mode) {
    case AggregationMode::safari:
      return "safari";
    case AggregationMode::fedavg_reliable:
      return "fedavg";
    case AggregationMode::drop_no_compensation:
      return "drop";
  }
  return "unknown";
}

void update_similarity(SimilarityMatrix& matrix, const ReceivedModels& received) {
  for (auto u = received.begin(); u != received.end(); ++u) {
    if (u->first >= matrix.size()) throw ConfigError("received model from unknown client");
    for (auto v = std::next(u); v != received.end(); ++v) {
      matrix.set(u->first, v->first, distance(u->second, v->second));
    }
  }
}

std::size_t select_surrogate(const SimilarityMatrix& matrix, std::size_t missing,
                             const ActiveSet& active) {
  if (active.empty()) throw NoSurrogateError("no active client to stand in for " + std::to_string(missing));
  std::optional<std::size_t> best;
  double best_distance = 0.0;
  for (std::size_t candidate : active.members) {
    if (candidate == missing) continue;
    const std::optional<double> d = matrix.at(candidate, missing);
    if (d && (!best || *d < best_distance)) {
      best = candidate;
      best_distance = *d;
    }
  }
  if (best) return *best;
  for (std::size_t candidate : active.members) {
    if (candidate != missing) return candidate;
  }
  throw NoSurrogateError("no active client to stand in for " + std::to_string(missing));
}

namespace {

void divide(ParamVector& sum, std::size_t count) {
  const auto denom = static_cast<double>(count);
  for (double& v : sum) v /= denom;
}

const ParamVector& model_of(const ReceivedModels& received, std::size_t client) {
  auto it = received.find(client);
  if (it == received.end()) throw ConfigError("no received model for client " + std::to_string(client));
  return it->second;
}

}  // namespace

AggregateOutcome aggregate(AggregationMode mode, const ReceivedModels& received,
                           const SimilarityMatrix& matrix, const ActiveSet& active,
                           std::size_t clients) {
  if (received.size() != active.size()) {
    throw ConfigError("received models do not match the active set");
  }
  for (std::size_t member : active.members) {
    if (member >= clients || !received.contains(member)) {
      throw ConfigError("received models do not match the active set");
    }
  }

  AggregateOutcome outcome;
  if (mode == AggregationMode::fedavg_reliable && active.size() != clients) {
    throw ConfigError("fedavg_reliable aggregation needs every client's model, got " +
                      std::to_string(active.size()) + " of " + std::to_string(clients));
  }
  if (active.empty()) return outcome;

  const std::size_t d = received.begin()->second.size();
  ParamVector sum(d);
  if (mode == AggregationMode::drop_no_compensation) {
    for (std::size_t member : active.members) kernels::axpy(1.0, model_of(received, member).span(), sum.span());
    divide(sum, active.size());
    outcome.model = std::move(sum);
    return outcome;
  }

  for (std::size_t j = 0; j < clients; ++j) {
    std::size_t source = j;
    if (!active.contains(j)) {
      source = select_surrogate(matrix, j, active);
      outcome.surrogates.emplace_back(j, source);
    }
    const ParamVector& model = model_of(received, source);
    if (model.size() != d) throw ConfigError("received models differ in length");
    kernels::axpy(1.0, model.span(), sum.span());
  }
  divide(sum, clients);
  outcome.model = std::move(sum);
  return outcome;
}

}  // namespace safari
