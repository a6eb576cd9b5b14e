#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "safari/channel.hpp"
#include "safari/param_vector.hpp"

namespace safari {

// Pairwise l2 distances between client models. An entry is known only once
// both clients were delivered in the same round; later rounds overwrite it
// and entries for absent pairs keep their last value.
class SimilarityMatrix {
 public:
  explicit SimilarityMatrix(std::size_t clients = 0);

  std::size_t size() const noexcept { return clients_; }
  std::optional<double> at(std::size_t u, std::size_t v) const;
  void set(std::size_t u, std::size_t v, double distance);
  bool known(std::size_t u, std::size_t v) const { return at(u, v).has_value(); }

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

 private:
  std::size_t clients_;
  std::vector<std::optional<double>> cells_;
};

using ReceivedModels = std::map<std::size_t, ParamVector>;

enum class AggregationMode { safari, fedavg_reliable, drop_no_compensation };

// CLI spelling: safari, fedavg, drop.
AggregationMode parse_aggregation_mode(std::string_view name);
std::string_view aggregation_mode_name(AggregationMode mode);

void update_similarity(SimilarityMatrix& matrix, const ReceivedModels& received);

// Active client with the smallest known distance to `missing`. Unknown
// entries rank after every known one; ties and the all-unknown case go to the
// lowest active index. Throws NoSurrogateError when `active` is empty.
std::size_t select_surrogate(const SimilarityMatrix& matrix, std::size_t missing,
                             const ActiveSet& active);

struct AggregateOutcome {
  std::optional<ParamVector> model;  // nullopt: round skipped, keep the old global model
  std::vector<std::pair<std::size_t, std::size_t>> surrogates;  // (missing, chosen), ascending
};

// safari: mean over all m slots, each missing slot filled by its surrogate.
// fedavg_reliable: plain mean over all m clients; every client must be present.
// drop_no_compensation: mean over the delivered models only.
AggregateOutcome aggregate(AggregationMode mode, const ReceivedModels& received,
                           const SimilarityMatrix& matrix, const ActiveSet& active,
                           std::size_t clients);

}  // namespace safari
