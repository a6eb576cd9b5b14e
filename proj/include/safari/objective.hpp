#pragma once

// A client's local objective L_i: a loss over a finite pool of samples with
// an exact gradient. The federation engine, the analysis layer and the mask
// algorithms only see this interface.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "safari/data.hpp"
#include "safari/model.hpp"
#include "safari/param_vector.hpp"

namespace safari {

// Dense layer shape used by data-free saliency (synflow).
struct LayerShape {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  bool bias = true;
};

std::vector<LayerShape> layer_shapes(const ModelSpec& spec);

class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::size_t sample_count() const = 0;

  // Mean loss / gradient over the given local sample positions in
  // [0, sample_count()).
  virtual double loss(const ParamVector& x, std::span<const std::size_t> samples) const = 0;
  virtual double loss_and_gradient(const ParamVector& x, std::span<const std::size_t> samples,
                                   ParamVector& grad) const = 0;

  virtual double full_loss(const ParamVector& x) const;
  virtual double full_loss_and_gradient(const ParamVector& x, ParamVector& grad) const;
  ParamVector full_gradient(const ParamVector& x) const;
  ParamVector gradient(const ParamVector& x, std::span<const std::size_t> samples) const;

  // Present only for neural-network objectives.
  virtual std::optional<std::vector<LayerShape>> layers() const { return std::nullopt; }
};

// Softmax cross-entropy MLP over a client's rows of a shared dataset.
class MlpObjective final : public Objective {
 public:
  MlpObjective(ModelSpec spec, std::shared_ptr<const Dataset> dataset,
               std::vector<std::size_t> rows);

  std::size_t dimension() const override { return spec_.parameter_count(); }
  std::size_t sample_count() const override { return rows_.size(); }

  double loss(const ParamVector& x, std::span<const std::size_t> samples) const override;
  double loss_and_gradient(const ParamVector& x, std::span<const std::size_t> samples,
                           ParamVector& grad) const override;
  double full_loss(const ParamVector& x) const override;
  double full_loss_and_gradient(const ParamVector& x, ParamVector& grad) const override;

  std::optional<std::vector<LayerShape>> layers() const override { return layer_shapes(spec_); }

  const ModelSpec& spec() const noexcept { return spec_; }
  Batch make_batch(std::span<const std::size_t> samples) const;

 private:
  ModelSpec spec_;
  std::shared_ptr<const Dataset> dataset_;
  std::vector<std::size_t> rows_;
  Batch full_;
};

// L(x) = mean_s 1/2 (x - c_s)^T A (x - c_s) with symmetric PSD A.
// Its gradient is A (x - mean c) and its smoothness constant is lambda_max(A).
class QuadraticObjective final : public Objective {
 public:
  // curvature: d x d row-major symmetric matrix; centers: one vector per sample.
  QuadraticObjective(std::vector<double> curvature, std::vector<ParamVector> centers);

  static QuadraticObjective diagonal(std::span<const double> diag, std::vector<ParamVector> centers);

  std::size_t dimension() const override { return dim_; }
  std::size_t sample_count() const override { return centers_.size(); }

  double loss(const ParamVector& x, std::span<const std::size_t> samples) const override;
  double loss_and_gradient(const ParamVector& x, std::span<const std::size_t> samples,
                           ParamVector& grad) const override;

  // Largest eigenvalue of A.
  double smoothness() const noexcept { return smoothness_; }
  const std::vector<double>& curvature() const noexcept { return curvature_; }

 private:
  ParamVector apply(const ParamVector& v) const;

  std::size_t dim_;
  std::vector<double> curvature_;
  std::vector<ParamVector> centers_;
  double smoothness_;
};

// Largest eigenvalue of a symmetric row-major n x n matrix.
double symmetric_max_eigenvalue(std::span<const double> matrix, std::size_t n);

}  // namespace safari
