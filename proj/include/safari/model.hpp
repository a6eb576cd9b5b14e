#pragma once

// Two-layer ReLU MLP with mean softmax cross-entropy.
//
// Parameter layout (d = I*H + H + H*O + O):
//   [ W1 (H x I, row-major) | b1 (H) | W2 (O x H, row-major) | b2 (O) ]

#include <cstddef>
#include <span>
#include <vector>

#include "safari/param_vector.hpp"

namespace safari {

struct ModelSpec {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t output_dim = 0;

  std::size_t parameter_count() const noexcept {
    return input_dim * hidden_dim + hidden_dim + hidden_dim * output_dim + output_dim;
  }

  std::size_t w1_offset() const noexcept { return 0; }
  std::size_t b1_offset() const noexcept { return input_dim * hidden_dim; }
  std::size_t w2_offset() const noexcept { return b1_offset() + hidden_dim; }
  std::size_t b2_offset() const noexcept { return w2_offset() + hidden_dim * output_dim; }
};

// Rows of features with integer class labels. Owns its storage.
struct Batch {
  std::size_t input_dim = 0;
  std::vector<double> inputs;  // rows x input_dim, row-major
  std::vector<int> labels;

  std::size_t rows() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t r) const noexcept {
    return {inputs.data() + r * input_dim, input_dim};
  }
};

// Throws ConfigError on dimension mismatch or malformed batch.
void validate(const ParamVector& params, const ModelSpec& spec, const Batch& batch);

double forward_loss(const ParamVector& params, const ModelSpec& spec, const Batch& batch);

ParamVector gradient(const ParamVector& params, const ModelSpec& spec, const Batch& batch);

// Loss and gradient from one forward/backward pass.
double loss_and_gradient(const ParamVector& params, const ModelSpec& spec, const Batch& batch,
                         ParamVector& grad_out);

// Output-layer logits for every row, rows x output_dim.
std::vector<double> logits(const ParamVector& params, const ModelSpec& spec, const Batch& batch);

// result[n] = params[n] - step_size * grad[n]
ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, double step_size);

}  // namespace safari
