#pragma once

// Shared fixtures and independent oracles for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <numeric>
#include <random>
#include <vector>

#include "safari/data.hpp"
#include "safari/model.hpp"
#include "safari/objective.hpp"
#include "safari/param_vector.hpp"

namespace safari::testing {

inline ParamVector random_params(std::size_t d, std::mt19937_64& gen, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  ParamVector x(d);
  for (double& v : x) v = normal(gen);
  return x;
}

inline Batch random_batch(const ModelSpec& spec, std::size_t rows, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Batch b;
  b.input_dim = spec.input_dim;
  b.inputs.resize(rows * spec.input_dim);
  for (double& v : b.inputs) v = normal(gen);
  for (std::size_t r = 0; r < rows; ++r) {
    b.labels.push_back(static_cast<int>(gen() % spec.output_dim));
  }
  return b;
}

// Straight-line reimplementation of the MLP loss, indexing the flat layout
// directly and accumulating in long double.
inline double brute_force_loss(const ParamVector& x, const ModelSpec& s, const Batch& b) {
  const std::size_t I = s.input_dim, H = s.hidden_dim, O = s.output_dim;
  long double total = 0;
  for (std::size_t r = 0; r < b.rows(); ++r) {
    std::vector<long double> hidden(H), out(O);
    for (std::size_t h = 0; h < H; ++h) {
      long double z = x[I * H + h];
      for (std::size_t i = 0; i < I; ++i) z += static_cast<long double>(x[h * I + i]) * b.inputs[r * I + i];
      hidden[h] = z > 0 ? z : 0;
    }
    for (std::size_t o = 0; o < O; ++o) {
      long double z = x[I * H + H + H * O + o];
      for (std::size_t h = 0; h < H; ++h) z += static_cast<long double>(x[I * H + H + o * H + h]) * hidden[h];
      out[o] = z;
    }
    long double peak = *std::max_element(out.begin(), out.end());
    long double sum = 0;
    for (long double z : out) sum += std::exp(z - peak);
    total += peak + std::log(sum) - out[static_cast<std::size_t>(b.labels[r])];
  }
  return static_cast<double>(total / static_cast<long double>(b.rows()));
}

// Dataset whose rows are copied from a batch; handy for wrapping MLP
// objectives around hand-made data.
inline std::shared_ptr<const Dataset> dataset_from(const Batch& b, std::size_t classes) {
  auto d = std::make_shared<Dataset>();
  d->input_dim = b.input_dim;
  d->class_count = classes;
  d->inputs = b.inputs;
  d->labels = b.labels;
  return d;
}

inline std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// Independent reading of the compensated mean: build the full m-entry list
// by explicit substitution, then average in long double. Ranking key for a
// stand-in: (distance unknown, distance, index).
inline std::vector<double> brute_force_safari(
    const std::map<std::size_t, ParamVector>& received,
    const std::vector<std::vector<std::optional<double>>>& distances, std::size_t m) {
  std::vector<const ParamVector*> slots;
  for (std::size_t j = 0; j < m; ++j) {
    if (received.count(j)) {
      slots.push_back(&received.at(j));
      continue;
    }
    std::size_t best = SIZE_MAX;
    for (const auto& [i, model] : received) {
      if (best == SIZE_MAX) {
        best = i;
        continue;
      }
      const auto& di = distances[i][j];
      const auto& db = distances[best][j];
      const bool better = di && (!db || *di < *db);
      if (better) best = i;
    }
    slots.push_back(&received.at(best));
  }
  const std::size_t d = slots.front()->size();
  std::vector<double> mean(d);
  for (std::size_t n = 0; n < d; ++n) {
    long double total = 0;
    for (const ParamVector* p : slots) total += (*p)[n];
    mean[n] = static_cast<double>(total / static_cast<long double>(m));
  }
  return mean;
}

}  // namespace safari::testing
