#pragma once

// Experiment configuration, read from a JSON document whose nested keys
// follow the modules: experiment, model, data, training, sparsity, channel.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "safari/channel.hpp"
#include "safari/errors.hpp"
#include "safari/server.hpp"
#include "safari/sparsity.hpp"

namespace safari {

enum class PartitionMode { noniid, clone, iid };

struct ExperimentConfig {
  // experiment
  std::uint64_t seed = 1;
  std::size_t clients = 10;
  std::size_t rounds = 100;
  std::size_t eval_every = 1;
  bool oracle_mode = false;
  std::vector<AggregationMode> modes{AggregationMode::safari};
  std::filesystem::path output_dir = "out";
  std::size_t threads = 1;
  bool similarity_per_round = false;

  // model
  std::size_t hidden_dim = 32;
  double init_scale = 1.0;  // multiplies the He-normal standard deviation

  // data
  std::optional<std::filesystem::path> csv_path;  // otherwise synthetic blobs
  std::size_t classes = 10;
  std::size_t samples_per_class = 200;
  std::size_t input_dim = 20;
  double spread = 1.0;
  double holdout_fraction = 0.2;
  PartitionMode partition = PartitionMode::noniid;
  std::size_t groups = 2;
  std::size_t labels_per_client = 5;

  // training
  std::size_t local_steps = 5;
  double learning_rate = 0.001;
  std::size_t batch_size = 64;

  // sparsity
  MaskKind mask_kind = MaskKind::magnitude;
  double sparsity = 0.8;

  // channel
  LinkSchedule uplink = LinkSchedule::uniform(10, 1.0);
  LinkSchedule downlink = LinkSchedule::uniform(10, 1.0);
  std::optional<std::uint64_t> channel_seed;  // defaults to the experiment seed

  std::uint64_t effective_channel_seed() const { return channel_seed.value_or(seed); }
};

class ConfigValidationError : public ConfigError {
 public:
  explicit ConfigValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Parses and validates. Relative paths inside the document resolve against
// base_dir. Every problem is reported as "<field.path>: <message>".
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace safari
