#include "safari/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "safari/errors.hpp"
#include "safari/kernels.hpp"

namespace safari {

double squared_norm(const ParamVector& x) noexcept { return kernels::squared_norm(x.span()); }

double norm(const ParamVector& x) noexcept { return std::sqrt(squared_norm(x)); }

double distance(const ParamVector& a, const ParamVector& b) {
  if (a.size() != b.size()) throw ConfigError("distance: length mismatch");
  return std::sqrt(kernels::squared_distance(a.span(), b.span()));
}

void validate(const ParamVector& params, const ModelSpec& spec, const Batch& batch) {
  if (spec.input_dim == 0 || spec.hidden_dim == 0 || spec.output_dim == 0) {
    throw ConfigError("model spec has a zero dimension");
  }
  if (params.size() != spec.parameter_count()) {
    throw ConfigError("parameter vector has length " + std::to_string(params.size()) +
                      ", model spec expects " + std::to_string(spec.parameter_count()));
  }
  if (batch.rows() == 0) throw ConfigError("empty batch");
  if (batch.input_dim != spec.input_dim ||
      batch.inputs.size() != batch.rows() * batch.input_dim) {
    throw ConfigError("batch feature width does not match model input_dim");
  }
  for (int label : batch.labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= spec.output_dim) {
      throw ConfigError("label " + std::to_string(label) + " outside [0, output_dim)");
    }
  }
}

namespace {

struct Views {
  std::span<const double> w1, b1, w2, b2;
};

Views split(const ParamVector& params, const ModelSpec& spec) {
  const std::span<const double> all = params.span();
  return {all.subspan(spec.w1_offset(), spec.input_dim * spec.hidden_dim),
          all.subspan(spec.b1_offset(), spec.hidden_dim),
          all.subspan(spec.w2_offset(), spec.hidden_dim * spec.output_dim),
          all.subspan(spec.b2_offset(), spec.output_dim)};
}

// Forward one row. Fills pre-activations, activations and logits.
void forward_row(const Views& v, const ModelSpec& spec, std::span<const double> x,
                 std::span<double> hidden_pre, std::span<double> hidden,
                 std::span<double> out) {
  for (std::size_t h = 0; h < spec.hidden_dim; ++h) {
    const double z = kernels::dot(v.w1.subspan(h * spec.input_dim, spec.input_dim), x) + v.b1[h];
    hidden_pre[h] = z;
    hidden[h] = z > 0.0 ? z : 0.0;
  }
  for (std::size_t o = 0; o < spec.output_dim; ++o) {
    out[o] = kernels::dot(v.w2.subspan(o * spec.hidden_dim, spec.hidden_dim), hidden) + v.b2[o];
  }
}

// Softmax in place; returns log-sum-exp of the input.
double softmax_in_place(std::span<double> z) {
  const double peak = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& value : z) {
    value = std::exp(value - peak);
    total += value;
  }
  for (double& value : z) value /= total;
  return peak + std::log(total);
}

}  // namespace

double loss_and_gradient(const ParamVector& params, const ModelSpec& spec, const Batch& batch,
                         ParamVector& grad_out) {
  validate(params, spec, batch);
  const Views v = split(params, spec);
  grad_out = ParamVector(params.size());
  std::span<double> g = grad_out.span();
  std::span<double> gw1 = g.subspan(spec.w1_offset(), spec.input_dim * spec.hidden_dim);
  std::span<double> gb1 = g.subspan(spec.b1_offset(), spec.hidden_dim);
  std::span<double> gw2 = g.subspan(spec.w2_offset(), spec.hidden_dim * spec.output_dim);
  std::span<double> gb2 = g.subspan(spec.b2_offset(), spec.output_dim);

  std::vector<double> hidden_pre(spec.hidden_dim), hidden(spec.hidden_dim), out(spec.output_dim),
      hidden_grad(spec.hidden_dim);
  const double inv_rows = 1.0 / static_cast<double>(batch.rows());
  double loss = 0.0;

  for (std::size_t r = 0; r < batch.rows(); ++r) {
    const auto x = batch.row(r);
    const auto label = static_cast<std::size_t>(batch.labels[r]);
    forward_row(v, spec, x, hidden_pre, hidden, out);
    const double true_logit = out[label];
    const double lse = softmax_in_place(out);
    loss += lse - true_logit;

    // out now holds softmax probabilities; turn it into d(loss)/d(logits).
    out[label] -= 1.0;
    for (double& value : out) value *= inv_rows;

    std::fill(hidden_grad.begin(), hidden_grad.end(), 0.0);
    for (std::size_t o = 0; o < spec.output_dim; ++o) {
      gb2[o] += out[o];
      kernels::axpy(out[o], hidden, gw2.subspan(o * spec.hidden_dim, spec.hidden_dim));
      kernels::axpy(out[o], v.w2.subspan(o * spec.hidden_dim, spec.hidden_dim), hidden_grad);
    }
    for (std::size_t h = 0; h < spec.hidden_dim; ++h) {
      if (hidden_pre[h] <= 0.0) continue;
      gb1[h] += hidden_grad[h];
      kernels::axpy(hidden_grad[h], x, gw1.subspan(h * spec.input_dim, spec.input_dim));
    }
  }
  return loss * inv_rows;
}

double forward_loss(const ParamVector& params, const ModelSpec& spec, const Batch& batch) {
  validate(params, spec, batch);
  const Views v = split(params, spec);
  std::vector<double> hidden_pre(spec.hidden_dim), hidden(spec.hidden_dim), out(spec.output_dim);
  double loss = 0.0;
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    forward_row(v, spec, batch.row(r), hidden_pre, hidden, out);
    const double true_logit = out[static_cast<std::size_t>(batch.labels[r])];
    loss += softmax_in_place(out) - true_logit;
  }
  return loss / static_cast<double>(batch.rows());
}

ParamVector gradient(const ParamVector& params, const ModelSpec& spec, const Batch& batch) {
  ParamVector grad;
  loss_and_gradient(params, spec, batch, grad);
  return grad;
}

std::vector<double> logits(const ParamVector& params, const ModelSpec& spec, const Batch& batch) {
  validate(params, spec, batch);
  const Views v = split(params, spec);
  std::vector<double> hidden_pre(spec.hidden_dim), hidden(spec.hidden_dim);
  std::vector<double> all(batch.rows() * spec.output_dim);
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    forward_row(v, spec, batch.row(r), hidden_pre, hidden,
                std::span<double>(all).subspan(r * spec.output_dim, spec.output_dim));
  }
  return all;
}

ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, double step_size) {
  if (params.size() != grad.size()) throw ConfigError("sgd_step: length mismatch");
  if (!(step_size >= 0.0)) throw ConfigError("sgd_step: negative step size");
  ParamVector next = params;
  kernels::axpy(-step_size, grad.span(), next.span());
  return next;
}

}  // namespace safari
