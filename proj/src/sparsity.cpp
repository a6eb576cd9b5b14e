#include "safari/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "safari/errors.hpp"
#include "safari/kernels.hpp"
#include "safari/rng.hpp"

namespace safari {

std::size_t Mask::zero_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{0}));
}

namespace {

void check_level(double level) {
  if (!(level >= 0.0 && level < 1.0)) throw ConfigError("sparsity level must lie in [0, 1)");
}

ParamVector normalized(ParamVector scores) {
  double total = 0.0;
  for (double s : scores) total += s;
  if (!(total > 0.0)) throw DegenerateSaliencyError("saliency scores sum to zero");
  for (double& s : scores) s /= total;
  return scores;
}

}  // namespace

std::size_t pruned_count(std::size_t d, double level) {
  check_level(level);
  return static_cast<std::size_t>(std::llround(level * static_cast<double>(d)));
}

MaskKind parse_mask_kind(std::string_view name) {
  if (name == "rand" || name == "random") return MaskKind::random;
  if (name == "mag" || name == "magnitude") return MaskKind::magnitude;
  if (name == "snip") return MaskKind::snip;
  if (name == "snip_grad") return MaskKind::snip_gradient_only;
  if (name == "synflow") return MaskKind::synflow;
  if (name == "grasp") throw ConfigError("sparsity.algorithm 'grasp' is not implemented");
  throw ConfigError("unknown sparsity.algorithm '" + std::string(name) + "'");
}

std::string_view mask_kind_name(MaskKind kind) {
  switch (kind) {
    case MaskKind::random:
      return "rand";
    case MaskKind::magnitude:
      return "mag";
    case MaskKind::snip:
      return "snip";
    case MaskKind::snip_gradient_only:
      return "snip_grad";
    case MaskKind::synflow:
      return "synflow";
  }
  return "unknown";
}

Mask random_mask(std::size_t d, double level, std::uint64_t seed) {
  const std::size_t zeros = pruned_count(d, level);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng::Engine engine = rng::make(seed, rng::Purpose::mask);
  // Partial Fisher-Yates: the first `zeros` slots become a uniform subset.
  for (std::size_t i = 0; i < zeros; ++i) {
    const auto j = i + static_cast<std::size_t>(rng::below(engine, d - i));
    std::swap(order[i], order[j]);
  }
  Mask mask{std::vector<std::uint8_t>(d, 1), level};
  for (std::size_t i = 0; i < zeros; ++i) mask.bits[order[i]] = 0;
  return mask;
}

Mask scores_to_mask(const ParamVector& scores, double level) {
  const std::size_t d = scores.size();
  const std::size_t keep = d - pruned_count(d, level);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  Mask mask{std::vector<std::uint8_t>(d, 0), level};
  for (std::size_t i = 0; i < keep; ++i) mask.bits[order[i]] = 1;
  return mask;
}

Mask magnitude_mask(const ParamVector& params, double level) {
  ParamVector magnitudes = params;
  for (double& v : magnitudes) v = std::fabs(v);
  return scores_to_mask(magnitudes, level);
}

ParamVector snip_scores_from_gradient(const ParamVector& params, const ParamVector& grad,
                                      MaskKind kind) {
  if (params.size() != grad.size()) throw ConfigError("snip_scores: length mismatch");
  ParamVector scores(params.size());
  for (std::size_t n = 0; n < params.size(); ++n) {
    scores[n] = kind == MaskKind::snip_gradient_only ? std::fabs(grad[n])
                                                     : std::fabs(grad[n] * params[n]);
  }
  return normalized(std::move(scores));
}

ParamVector snip_scores(const ParamVector& params, const ModelSpec& spec, const Batch& batch,
                        MaskKind kind) {
  return snip_scores_from_gradient(params, gradient(params, spec, batch), kind);
}

ParamVector synflow_scores(const ParamVector& params, std::span<const LayerShape> layers) {
  std::size_t expected = 0;
  for (const LayerShape& layer : layers) {
    expected += layer.inputs * layer.outputs + (layer.bias ? layer.outputs : 0);
  }
  if (layers.empty() || expected != params.size()) {
    throw ConfigError("synflow_scores: layer shapes do not match parameter count");
  }

  ParamVector magnitude = params;
  for (double& v : magnitude) v = std::fabs(v);
  const std::span<const double> w = magnitude.span();

  // Forward the all-ones input; keep every layer's input activation.
  std::vector<std::vector<double>> activations;
  activations.emplace_back(layers.front().inputs, 1.0);
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const LayerShape& layer : layers) {
    offsets.push_back(offset);
    const auto& in = activations.back();
    std::vector<double> out(layer.outputs, 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      out[o] = kernels::dot(w.subspan(offset + o * layer.inputs, layer.inputs), in);
      if (layer.bias) out[o] += w[offset + layer.inputs * layer.outputs + o];
    }
    offset += layer.inputs * layer.outputs + (layer.bias ? layer.outputs : 0);
    activations.push_back(std::move(out));
  }

  ParamVector scores(params.size());
  std::vector<double> upstream(layers.back().outputs, 1.0);  // dR/d(output)
  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerShape& layer = layers[l];
    const std::size_t base = offsets[l];
    const auto& in = activations[l];
    std::vector<double> downstream(layer.inputs, 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      for (std::size_t i = 0; i < layer.inputs; ++i) {
        const std::size_t n = base + o * layer.inputs + i;
        scores[n] = upstream[o] * in[i] * w[n];
      }
      kernels::axpy(upstream[o], w.subspan(base + o * layer.inputs, layer.inputs), downstream);
      if (layer.bias) {
        const std::size_t n = base + layer.inputs * layer.outputs + o;
        scores[n] = upstream[o] * w[n];
      }
    }
    upstream = std::move(downstream);
  }
  return normalized(std::move(scores));
}

ParamVector synflow_scores(const ParamVector& params, const ModelSpec& spec) {
  const auto layers = layer_shapes(spec);
  return synflow_scores(params, layers);
}

ParamVector apply_mask(const ParamVector& params, const Mask& mask) {
  if (params.size() != mask.size()) throw ConfigError("apply_mask: length mismatch");
  ParamVector out(params.size());
  kernels::select(params.span(), mask.span(), out.span());
  return out;
}

double measure_delta(const ParamVector& params, const Mask& mask) {
  if (params.size() != mask.size()) throw ConfigError("measure_delta: length mismatch");
  const double total = squared_norm(params);
  if (!(total > 0.0)) throw UndefinedDeltaError("measure_delta: zero parameter vector");
  double removed = 0.0;
  for (std::size_t n = 0; n < params.size(); ++n) {
    if (!mask.bits[n]) removed += params[n] * params[n];
  }
  return std::sqrt(removed / total);
}

Mask compute_mask(const MaskRequest& request, const ParamVector& params, const Objective& objective) {
  switch (request.kind) {
    case MaskKind::random:
      return random_mask(params.size(), request.level, request.seed);
    case MaskKind::magnitude:
      return magnitude_mask(params, request.level);
    case MaskKind::snip:
    case MaskKind::snip_gradient_only: {
      if (request.samples.empty()) throw ConfigError("snip masks need a data batch");
      try {
        const ParamVector grad = objective.gradient(params, request.samples);
        return scores_to_mask(snip_scores_from_gradient(params, grad, request.kind), request.level);
      } catch (const DegenerateSaliencyError&) {
        return magnitude_mask(params, request.level);
      }
    }
    case MaskKind::synflow: {
      const auto layers = objective.layers();
      if (!layers) throw ConfigError("synflow masks need a layered network objective");
      try {
        return scores_to_mask(synflow_scores(params, *layers), request.level);
      } catch (const DegenerateSaliencyError&) {
        return magnitude_mask(params, request.level);
      }
    }
  }
  throw ConfigError("unknown mask kind");
}

}  // namespace safari
