#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "safari/model.hpp"

namespace safari {

struct Dataset {
  std::size_t input_dim = 0;
  std::size_t class_count = 0;
  std::vector<double> inputs;  // size() x input_dim, row-major
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }

  // Gathers the given rows into a contiguous batch.
  Batch batch(std::span<const std::size_t> rows) const;
  Batch all() const;
};

struct ClientAssignment {
  std::size_t group = 0;
  std::vector<int> labels;           // ascending
  std::vector<std::size_t> samples;  // ascending row indices into the dataset
};

struct PartitionPlan {
  std::size_t client_count = 0;
  std::size_t group_count = 0;
  std::size_t labels_per_client = 0;
  bool clones = false;  // same-group clients share one sample list
  std::vector<ClientAssignment> clients;

  std::size_t group_of(std::size_t client) const { return clients.at(client).group; }
};

// One Gaussian blob per class: centroid ~ N(0, I), sample = centroid + spread * N(0, I).
// Rows are class-major (all of class 0, then class 1, ...).
Dataset generate_blobs(std::size_t class_count, std::size_t samples_per_class,
                       std::size_t input_dim, double spread, std::uint64_t seed);

// Header row, then one row per sample: feature columns followed by an
// integer label column.
Dataset load_csv_dataset(const std::filesystem::path& path);

// Stratified split; each class keeps at least one training row.
struct HoldoutSplit {
  Dataset train;
  Dataset holdout;
};
HoldoutSplit split_holdout(const Dataset& dataset, double holdout_fraction, std::uint64_t seed);

// Group g holds labels {(g*k + j) mod C : j < k}. A label shared by several
// groups has its rows divided between them; within a group the pooled rows
// are shuffled and dealt in contiguous, balanced chunks.
PartitionPlan partition_noniid(const Dataset& dataset, std::size_t client_count,
                               std::size_t group_count, std::size_t labels_per_client,
                               std::uint64_t seed);

// Same group pools as partition_noniid with k = ceil(C / G), but every client
// in a group receives the whole pool.
PartitionPlan clusterable_clone_partition(const Dataset& dataset, std::size_t client_count,
                                          std::size_t group_count);

}  // namespace safari
