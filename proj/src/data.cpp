#include "safari/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "safari/errors.hpp"
#include "safari/rng.hpp"

namespace safari {

Batch Dataset::batch(std::span<const std::size_t> rows) const {
  Batch out;
  out.input_dim = input_dim;
  out.inputs.reserve(rows.size() * input_dim);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) {
    const auto first = inputs.begin() + static_cast<std::ptrdiff_t>(r * input_dim);
    out.inputs.insert(out.inputs.end(), first, first + static_cast<std::ptrdiff_t>(input_dim));
    out.labels.push_back(labels[r]);
  }
  return out;
}

Batch Dataset::all() const {
  Batch out;
  out.input_dim = input_dim;
  out.inputs = inputs;
  out.labels = labels;
  return out;
}

Dataset generate_blobs(std::size_t class_count, std::size_t samples_per_class,
                       std::size_t input_dim, double spread, std::uint64_t seed) {
  if (class_count == 0 || samples_per_class == 0 || input_dim == 0) {
    throw ConfigError("generate_blobs: counts must be >= 1");
  }
  if (!(spread > 0.0)) throw ConfigError("generate_blobs: spread must be > 0");

  rng::Engine engine = rng::make(seed, rng::Purpose::data);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> centroids(class_count * input_dim);
  for (double& c : centroids) c = normal(engine);

  Dataset ds;
  ds.input_dim = input_dim;
  ds.class_count = class_count;
  ds.inputs.reserve(class_count * samples_per_class * input_dim);
  for (std::size_t c = 0; c < class_count; ++c) {
    for (std::size_t s = 0; s < samples_per_class; ++s) {
      for (std::size_t f = 0; f < input_dim; ++f) {
        ds.inputs.push_back(centroids[c * input_dim + f] + spread * normal(engine));
      }
      ds.labels.push_back(static_cast<int>(c));
    }
  }
  return ds;
}

Dataset load_csv_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dataset CSV is empty: " + path.string());
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 2) throw ConfigError("dataset CSV needs at least one feature and a label column");

  Dataset ds;
  ds.input_dim = columns - 1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      try {
        if (col + 1 < columns) {
          ds.inputs.push_back(std::stod(cell));
        } else if (col + 1 == columns) {
          const int label = std::stoi(cell);
          if (label < 0) throw ConfigError("negative label");
          ds.labels.push_back(label);
        }
      } catch (const std::logic_error&) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad cell '" + cell + "'");
      }
      ++col;
    }
    if (col != columns) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " cells");
    }
  }
  if (ds.labels.empty()) throw ConfigError("dataset CSV has no rows: " + path.string());
  ds.class_count = static_cast<std::size_t>(*std::max_element(ds.labels.begin(), ds.labels.end())) + 1;
  std::vector<std::size_t> counts(ds.class_count, 0);
  for (int label : ds.labels) ++counts[static_cast<std::size_t>(label)];
  for (std::size_t c = 0; c < ds.class_count; ++c) {
    if (counts[c] == 0) throw ConfigError("dataset CSV has no rows for class " + std::to_string(c));
  }
  return ds;
}

namespace {

std::vector<std::vector<std::size_t>> rows_by_class(const Dataset& dataset) {
  std::vector<std::vector<std::size_t>> by_class(dataset.class_count);
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    by_class[static_cast<std::size_t>(dataset.labels[r])].push_back(r);
  }
  return by_class;
}

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.input_dim = dataset.input_dim;
  out.class_count = dataset.class_count;
  Batch gathered = dataset.batch(rows);
  out.inputs = std::move(gathered.inputs);
  out.labels = std::move(gathered.labels);
  return out;
}

struct GroupPools {
  std::vector<std::vector<int>> labels;
  std::vector<std::vector<std::size_t>> rows;
};

GroupPools build_group_pools(const Dataset& dataset, std::size_t group_count,
                             std::size_t labels_per_group) {
  const std::size_t classes = dataset.class_count;
  GroupPools pools;
  pools.labels.resize(group_count);
  pools.rows.resize(group_count);

  std::vector<std::vector<std::size_t>> users(classes);
  for (std::size_t g = 0; g < group_count; ++g) {
    for (std::size_t j = 0; j < labels_per_group; ++j) {
      const std::size_t label = (g * labels_per_group + j) % classes;
      if (std::find(pools.labels[g].begin(), pools.labels[g].end(), static_cast<int>(label)) ==
          pools.labels[g].end()) {
        pools.labels[g].push_back(static_cast<int>(label));
        users[label].push_back(g);
      }
    }
    std::sort(pools.labels[g].begin(), pools.labels[g].end());
  }

  const auto by_class = rows_by_class(dataset);
  for (std::size_t c = 0; c < classes; ++c) {
    const auto& groups = users[c];
    if (groups.empty()) continue;
    const std::size_t n = by_class[c].size();
    const std::size_t base = n / groups.size();
    const std::size_t extra = n % groups.size();
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < groups.size(); ++k) {
      const std::size_t take = base + (k < extra ? 1 : 0);
      auto& pool = pools.rows[groups[k]];
      pool.insert(pool.end(), by_class[c].begin() + static_cast<std::ptrdiff_t>(cursor),
                  by_class[c].begin() + static_cast<std::ptrdiff_t>(cursor + take));
      cursor += take;
    }
  }
  return pools;
}

void check_groups(std::size_t client_count, std::size_t group_count) {
  if (client_count == 0 || group_count == 0) throw ConfigError("partition: counts must be >= 1");
  if (client_count % group_count != 0) {
    throw ConfigError("partition: group_count must divide client_count");
  }
}

}  // namespace

HoldoutSplit split_holdout(const Dataset& dataset, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("holdout fraction must lie in [0, 1)");
  }
  rng::Engine engine = rng::make(seed, rng::Purpose::holdout);
  std::vector<std::size_t> train_rows, holdout_rows;
  for (auto rows : rows_by_class(dataset)) {
    rng::shuffle(std::span<std::size_t>(rows), engine);
    auto held = static_cast<std::size_t>(holdout_fraction * static_cast<double>(rows.size()));
    held = std::min(held, rows.size() > 0 ? rows.size() - 1 : 0);
    holdout_rows.insert(holdout_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(held));
    train_rows.insert(train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(held), rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(holdout_rows.begin(), holdout_rows.end());
  return {subset(dataset, train_rows), subset(dataset, holdout_rows)};
}

PartitionPlan partition_noniid(const Dataset& dataset, std::size_t client_count,
                               std::size_t group_count, std::size_t labels_per_client,
                               std::uint64_t seed) {
  check_groups(client_count, group_count);
  if (labels_per_client == 0 || labels_per_client > dataset.class_count) {
    throw ConfigError("partition: labels_per_client must lie in [1, class_count]");
  }
  if (labels_per_client * group_count < dataset.class_count) {
    throw InfeasiblePartitionError(
        "partition: labels_per_client * group_count < class_count leaves classes unassigned");
  }

  GroupPools pools = build_group_pools(dataset, group_count, labels_per_client);
  const std::size_t per_group = client_count / group_count;

  PartitionPlan plan;
  plan.client_count = client_count;
  plan.group_count = group_count;
  plan.labels_per_client = labels_per_client;
  plan.clients.resize(client_count);

  for (std::size_t g = 0; g < group_count; ++g) {
    auto& pool = pools.rows[g];
    rng::Engine engine = rng::make(seed, rng::Purpose::partition, g);
    rng::shuffle(std::span<std::size_t>(pool), engine);
    const std::size_t base = pool.size() / per_group;
    const std::size_t extra = pool.size() % per_group;
    if (base == 0) {
      throw InfeasiblePartitionError("partition: group " + std::to_string(g) + " has " +
                                     std::to_string(pool.size()) + " rows for " +
                                     std::to_string(per_group) + " clients");
    }
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < per_group; ++k) {
      const std::size_t take = base + (k < extra ? 1 : 0);
      ClientAssignment& client = plan.clients[g * per_group + k];
      client.group = g;
      client.labels = pools.labels[g];
      client.samples.assign(pool.begin() + static_cast<std::ptrdiff_t>(cursor),
                            pool.begin() + static_cast<std::ptrdiff_t>(cursor + take));
      std::sort(client.samples.begin(), client.samples.end());
      cursor += take;
    }
  }
  return plan;
}

PartitionPlan clusterable_clone_partition(const Dataset& dataset, std::size_t client_count,
                                          std::size_t group_count) {
  check_groups(client_count, group_count);
  const std::size_t labels_per_group = (dataset.class_count + group_count - 1) / group_count;
  GroupPools pools = build_group_pools(dataset, group_count, labels_per_group);
  const std::size_t per_group = client_count / group_count;

  PartitionPlan plan;
  plan.client_count = client_count;
  plan.group_count = group_count;
  plan.labels_per_client = labels_per_group;
  plan.clones = true;
  plan.clients.resize(client_count);
  for (std::size_t g = 0; g < group_count; ++g) {
    if (pools.rows[g].empty()) {
      throw InfeasiblePartitionError("clone partition: group " + std::to_string(g) + " has no rows");
    }
    std::sort(pools.rows[g].begin(), pools.rows[g].end());
    for (std::size_t k = 0; k < per_group; ++k) {
      ClientAssignment& client = plan.clients[g * per_group + k];
      client.group = g;
      client.labels = pools.labels[g];
      client.samples = pools.rows[g];
    }
  }
  return plan;
}

}  // namespace safari
