#pragma once

// Pruning masks: producers (random, magnitude, SNIP, synflow), application
// and the relative mask-induced error ||x*M - x|| / ||x||.
//
// Every producer zeroes exactly round(level * d) coordinates. Score-based
// selection keeps the highest scores; among equal scores the lower index is
// kept. GraSP is deliberately absent: it needs Hessian-vector products.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "safari/model.hpp"
#include "safari/objective.hpp"
#include "safari/param_vector.hpp"

namespace safari {

struct Mask {
  std::vector<std::uint8_t> bits;  // 1 = keep
  double level = 0.0;

  std::size_t size() const noexcept { return bits.size(); }
  std::size_t zero_count() const noexcept;
  std::span<const std::uint8_t> span() const noexcept { return bits; }

  static Mask ones(std::size_t d) { return Mask{std::vector<std::uint8_t>(d, 1), 0.0}; }
};

std::size_t pruned_count(std::size_t d, double level);

enum class MaskKind { random, magnitude, snip, snip_gradient_only, synflow };

// Config spelling: rand, mag, snip, snip_grad, synflow.
MaskKind parse_mask_kind(std::string_view name);
std::string_view mask_kind_name(MaskKind kind);

Mask random_mask(std::size_t d, double level, std::uint64_t seed);
Mask magnitude_mask(const ParamVector& params, double level);
Mask scores_to_mask(const ParamVector& scores, double level);

// |g * x| (snip) or |g| (snip_gradient_only), normalized to sum to one.
ParamVector snip_scores_from_gradient(const ParamVector& params, const ParamVector& grad,
                                      MaskKind kind = MaskKind::snip);
ParamVector snip_scores(const ParamVector& params, const ModelSpec& spec, const Batch& batch,
                        MaskKind kind = MaskKind::snip);

// Data-free: all-ones input through |params| with identity activations,
// score = dR/dw * |w| for R the summed output, normalized to sum to one.
ParamVector synflow_scores(const ParamVector& params, std::span<const LayerShape> layers);
ParamVector synflow_scores(const ParamVector& params, const ModelSpec& spec);

ParamVector apply_mask(const ParamVector& params, const Mask& mask);

double measure_delta(const ParamVector& params, const Mask& mask);

// Mask for one client in one round. SNIP variants score on `samples` of the
// objective; degenerate saliencies fall back to magnitude pruning.
struct MaskRequest {
  MaskKind kind = MaskKind::magnitude;
  double level = 0.0;
  std::uint64_t seed = 0;                  // random masks only
  std::span<const std::size_t> samples{};  // snip variants only
};

Mask compute_mask(const MaskRequest& request, const ParamVector& params, const Objective& objective);

}  // namespace safari
