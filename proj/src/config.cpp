#include "safari/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace safari {

using nlohmann::json;

ConfigValidationError::ConfigValidationError(std::vector<std::string> problems)
    : ConfigError([&] {
        std::string joined = "invalid config:";
        for (const auto& p : problems) joined += "\n  " + p;
        return joined;
      }()),
      problems_(std::move(problems)) {}

namespace {

class Reader {
 public:
  explicit Reader(std::filesystem::path base_dir) : base_dir_(std::move(base_dir)) {}

  void problem(const std::string& path, const std::string& message) {
    problems_.push_back(path + ": " + message);
  }
  std::vector<std::string>& problems() { return problems_; }

  const json* section(const json& root, const std::string& name,
                      const std::set<std::string>& allowed) {
    if (!root.contains(name)) return nullptr;
    const json& node = root.at(name);
    if (!node.is_object()) {
      problem(name, "must be an object");
      return nullptr;
    }
    for (const auto& [key, value] : node.items()) {
      if (!allowed.contains(key)) problem(name + "." + key, "unknown key");
    }
    return &node;
  }

  template <typename T>
  void get(const json* node, const std::string& section, const std::string& key, T& out) {
    if (!node || !node->contains(key)) return;
    const json& value = node->at(key);
    const std::string path = section + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!value.is_boolean()) return problem(path, "must be a boolean");
      out = value.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!value.is_number_integer() || value.get<long long>() < 0) {
        return problem(path, "must be a non-negative integer");
      }
      out = static_cast<T>(value.get<unsigned long long>());
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!value.is_number()) return problem(path, "must be a number");
      out = value.get<double>();
    } else {
      if (!value.is_string()) return problem(path, "must be a string");
      out = value.get<std::string>();
    }
  }

  std::optional<LinkSchedule> schedule(const json* node, const std::string& key, std::size_t clients) {
    const std::string path = "channel." + key;
    if (!node || !node->contains(key)) return std::nullopt;
    const json& value = node->at(key);
    try {
      if (value.is_number()) return LinkSchedule::uniform(clients, value.get<double>());
      if (value.is_array()) {
        std::vector<double> p;
        for (const json& cell : value) {
          if (!cell.is_number()) {
            problem(path, "list entries must be numbers");
            return std::nullopt;
          }
          p.push_back(cell.get<double>());
        }
        return LinkSchedule::constant(std::move(p));
      }
      if (value.is_string()) {
        std::filesystem::path file = value.get<std::string>();
        if (file.is_relative()) file = base_dir_ / file;
        return LinkSchedule::load_table(file);
      }
      if (value.is_object() && value.contains("piecewise") && value.at("piecewise").is_array()) {
        std::vector<LinkSchedule::Segment> segments;
        for (const json& seg : value.at("piecewise")) {
          if (!seg.is_object() || !seg.contains("start_round") || !seg.contains("p") ||
              !seg.at("start_round").is_number_integer() || !seg.at("p").is_array()) {
            problem(path, "piecewise segments need integer 'start_round' and list 'p'");
            return std::nullopt;
          }
          segments.push_back({seg.at("start_round").get<std::size_t>(),
                              seg.at("p").get<std::vector<double>>()});
        }
        return LinkSchedule::piecewise(std::move(segments));
      }
      problem(path, "expected a probability, a list, a CSV path or {\"piecewise\": [...]}");
    } catch (const ConfigError& e) {
      problem(path, e.what());
    } catch (const json::exception& e) {
      problem(path, e.what());
    }
    return std::nullopt;
  }

 private:
  std::filesystem::path base_dir_;
  std::vector<std::string> problems_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigValidationError({std::string("<document>: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigValidationError({"<document>: top level must be an object"});

  Reader r(base_dir);
  for (const auto& [key, value] : root.items()) {
    static const std::set<std::string> known{"experiment", "model",    "data",
                                             "training",   "sparsity", "channel"};
    if (!known.contains(key)) r.problem(key, "unknown section");
  }

  ExperimentConfig cfg;
  const json* exp = r.section(root, "experiment",
                              {"seed", "clients", "rounds", "eval_every", "oracle_mode", "modes",
                               "output_dir", "threads", "similarity_per_round"});
  r.get(exp, "experiment", "seed", cfg.seed);
  r.get(exp, "experiment", "clients", cfg.clients);
  r.get(exp, "experiment", "rounds", cfg.rounds);
  r.get(exp, "experiment", "eval_every", cfg.eval_every);
  r.get(exp, "experiment", "oracle_mode", cfg.oracle_mode);
  r.get(exp, "experiment", "threads", cfg.threads);
  r.get(exp, "experiment", "similarity_per_round", cfg.similarity_per_round);
  std::string output_dir = cfg.output_dir.string();
  r.get(exp, "experiment", "output_dir", output_dir);
  cfg.output_dir = output_dir;
  if (exp && exp->contains("modes")) {
    const json& modes = exp->at("modes");
    if (!modes.is_array()) {
      r.problem("experiment.modes", "must be a list of mode names");
    } else {
      cfg.modes.clear();
      for (const json& mode : modes) {
        try {
          cfg.modes.push_back(parse_aggregation_mode(mode.get<std::string>()));
        } catch (const std::exception& e) {
          r.problem("experiment.modes", e.what());
        }
      }
    }
  }

  const json* model = r.section(root, "model", {"hidden_dim", "init_scale"});
  r.get(model, "model", "hidden_dim", cfg.hidden_dim);
  r.get(model, "model", "init_scale", cfg.init_scale);

  const json* data = r.section(root, "data",
                               {"csv", "classes", "samples_per_class", "input_dim", "spread",
                                "holdout_fraction", "partition", "groups", "labels_per_client"});
  if (data && data->contains("csv")) {
    std::string csv;
    r.get(data, "data", "csv", csv);
    std::filesystem::path p = csv;
    cfg.csv_path = p.is_relative() ? base_dir / p : p;
  }
  r.get(data, "data", "classes", cfg.classes);
  r.get(data, "data", "samples_per_class", cfg.samples_per_class);
  r.get(data, "data", "input_dim", cfg.input_dim);
  r.get(data, "data", "spread", cfg.spread);
  r.get(data, "data", "holdout_fraction", cfg.holdout_fraction);
  r.get(data, "data", "groups", cfg.groups);
  r.get(data, "data", "labels_per_client", cfg.labels_per_client);
  std::string partition = "noniid";
  r.get(data, "data", "partition", partition);
  if (partition == "noniid") {
    cfg.partition = PartitionMode::noniid;
  } else if (partition == "clone") {
    cfg.partition = PartitionMode::clone;
  } else if (partition == "iid") {
    cfg.partition = PartitionMode::iid;
  } else {
    r.problem("data.partition", "must be one of noniid, clone, iid");
  }

  const json* training = r.section(root, "training", {"local_steps", "learning_rate", "batch_size"});
  r.get(training, "training", "local_steps", cfg.local_steps);
  r.get(training, "training", "learning_rate", cfg.learning_rate);
  r.get(training, "training", "batch_size", cfg.batch_size);

  const json* sparsity = r.section(root, "sparsity", {"algorithm", "level"});
  std::string algorithm = std::string(mask_kind_name(cfg.mask_kind));
  r.get(sparsity, "sparsity", "algorithm", algorithm);
  try {
    cfg.mask_kind = parse_mask_kind(algorithm);
  } catch (const ConfigError& e) {
    r.problem("sparsity.algorithm", e.what());
  }
  r.get(sparsity, "sparsity", "level", cfg.sparsity);

  const json* channel = r.section(root, "channel", {"uplink", "downlink", "seed"});
  // A zero client count is reported below; keep the default schedules constructible.
  const std::size_t link_clients = std::max<std::size_t>(cfg.clients, 1);
  cfg.uplink = r.schedule(channel, "uplink", link_clients).value_or(LinkSchedule::uniform(link_clients, 1.0));
  cfg.downlink =
      r.schedule(channel, "downlink", link_clients).value_or(LinkSchedule::uniform(link_clients, 1.0));
  if (channel && channel->contains("seed")) {
    std::uint64_t s = 0;
    r.get(channel, "channel", "seed", s);
    cfg.channel_seed = s;
  }

  // Cross-field checks.
  auto positive = [&](std::size_t v, const char* path) {
    if (v == 0) r.problem(path, "must be >= 1");
  };
  positive(cfg.clients, "experiment.clients");
  positive(cfg.eval_every, "experiment.eval_every");
  positive(cfg.threads, "experiment.threads");
  positive(cfg.hidden_dim, "model.hidden_dim");
  positive(cfg.classes, "data.classes");
  positive(cfg.samples_per_class, "data.samples_per_class");
  positive(cfg.input_dim, "data.input_dim");
  positive(cfg.groups, "data.groups");
  positive(cfg.labels_per_client, "data.labels_per_client");
  positive(cfg.local_steps, "training.local_steps");
  positive(cfg.batch_size, "training.batch_size");
  if (cfg.modes.empty()) r.problem("experiment.modes", "must name at least one mode");
  if (!(cfg.learning_rate > 0.0)) r.problem("training.learning_rate", "must be > 0");
  if (!(cfg.sparsity >= 0.0 && cfg.sparsity < 1.0)) r.problem("sparsity.level", "must lie in [0, 1)");
  if (!(cfg.spread > 0.0)) r.problem("data.spread", "must be > 0");
  if (!(cfg.init_scale > 0.0)) r.problem("model.init_scale", "must be > 0");
  if (!(cfg.holdout_fraction > 0.0 && cfg.holdout_fraction < 1.0)) {
    r.problem("data.holdout_fraction", "must lie in (0, 1)");
  }
  if (cfg.groups > 0 && cfg.clients % cfg.groups != 0) {
    r.problem("data.groups", "must divide experiment.clients");
  }
  if (!cfg.csv_path && cfg.partition == PartitionMode::noniid &&
      cfg.labels_per_client > cfg.classes) {
    r.problem("data.labels_per_client", "must not exceed data.classes");
  }
  if (!cfg.csv_path && cfg.partition == PartitionMode::noniid &&
      cfg.labels_per_client * cfg.groups < cfg.classes) {
    r.problem("data.labels_per_client", "labels_per_client * groups leaves classes unassigned");
  }
  for (const auto& [name, schedule] : {std::pair<const char*, const LinkSchedule*>{"channel.uplink", &cfg.uplink},
                                       {"channel.downlink", &cfg.downlink}}) {
    try {
      schedule->validate(cfg.clients, cfg.rounds);
    } catch (const ConfigError& e) {
      r.problem(name, e.what());
    }
  }

  if (!r.problems().empty()) throw ConfigValidationError(std::move(r.problems()));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigValidationError({"<file>: cannot open " + path.string()});
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

}  // namespace safari
