#include "safari/objective.hpp"

#include <Eigen/Eigenvalues>
#include <numeric>

#include "safari/errors.hpp"
#include "safari/kernels.hpp"

namespace safari {

std::vector<LayerShape> layer_shapes(const ModelSpec& spec) {
  return {{spec.input_dim, spec.hidden_dim, true}, {spec.hidden_dim, spec.output_dim, true}};
}

double Objective::full_loss(const ParamVector& x) const {
  std::vector<std::size_t> all(sample_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return loss(x, all);
}

double Objective::full_loss_and_gradient(const ParamVector& x, ParamVector& grad) const {
  std::vector<std::size_t> all(sample_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return loss_and_gradient(x, all, grad);
}

ParamVector Objective::full_gradient(const ParamVector& x) const {
  ParamVector grad;
  full_loss_and_gradient(x, grad);
  return grad;
}

ParamVector Objective::gradient(const ParamVector& x, std::span<const std::size_t> samples) const {
  ParamVector grad;
  loss_and_gradient(x, samples, grad);
  return grad;
}

MlpObjective::MlpObjective(ModelSpec spec, std::shared_ptr<const Dataset> dataset,
                           std::vector<std::size_t> rows)
    : spec_(spec), dataset_(std::move(dataset)), rows_(std::move(rows)) {
  if (!dataset_) throw ConfigError("MlpObjective: null dataset");
  if (dataset_->input_dim != spec_.input_dim) {
    throw ConfigError("MlpObjective: dataset input_dim does not match model spec");
  }
  for (std::size_t r : rows_) {
    if (r >= dataset_->size()) throw ConfigError("MlpObjective: row index out of range");
  }
  full_ = dataset_->batch(rows_);
}

Batch MlpObjective::make_batch(std::span<const std::size_t> samples) const {
  std::vector<std::size_t> picked;
  picked.reserve(samples.size());
  for (std::size_t s : samples) picked.push_back(rows_.at(s));
  return dataset_->batch(picked);
}

double MlpObjective::loss(const ParamVector& x, std::span<const std::size_t> samples) const {
  return forward_loss(x, spec_, make_batch(samples));
}

double MlpObjective::loss_and_gradient(const ParamVector& x, std::span<const std::size_t> samples,
                                       ParamVector& grad) const {
  return safari::loss_and_gradient(x, spec_, make_batch(samples), grad);
}

double MlpObjective::full_loss(const ParamVector& x) const { return forward_loss(x, spec_, full_); }

double MlpObjective::full_loss_and_gradient(const ParamVector& x, ParamVector& grad) const {
  return safari::loss_and_gradient(x, spec_, full_, grad);
}

double symmetric_max_eigenvalue(std::span<const double> matrix, std::size_t n) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = matrix[r * n + c];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

QuadraticObjective::QuadraticObjective(std::vector<double> curvature, std::vector<ParamVector> centers)
    : dim_(centers.empty() ? 0 : centers.front().size()),
      curvature_(std::move(curvature)),
      centers_(std::move(centers)),
      smoothness_(0.0) {
  if (centers_.empty()) throw ConfigError("QuadraticObjective: needs at least one center");
  if (curvature_.size() != dim_ * dim_) throw ConfigError("QuadraticObjective: curvature must be d x d");
  for (const auto& c : centers_) {
    if (c.size() != dim_) throw ConfigError("QuadraticObjective: center length mismatch");
  }
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < r; ++c) {
      if (curvature_[r * dim_ + c] != curvature_[c * dim_ + r]) {
        throw ConfigError("QuadraticObjective: curvature must be symmetric");
      }
    }
  }
  smoothness_ = symmetric_max_eigenvalue(curvature_, dim_);
}

QuadraticObjective QuadraticObjective::diagonal(std::span<const double> diag,
                                                std::vector<ParamVector> centers) {
  std::vector<double> a(diag.size() * diag.size(), 0.0);
  for (std::size_t i = 0; i < diag.size(); ++i) a[i * diag.size() + i] = diag[i];
  return QuadraticObjective(std::move(a), std::move(centers));
}

ParamVector QuadraticObjective::apply(const ParamVector& v) const {
  ParamVector out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    out[r] = kernels::dot(std::span<const double>(curvature_).subspan(r * dim_, dim_), v.span());
  }
  return out;
}

double QuadraticObjective::loss(const ParamVector& x, std::span<const std::size_t> samples) const {
  if (x.size() != dim_) throw ConfigError("QuadraticObjective: dimension mismatch");
  if (samples.empty()) throw ConfigError("QuadraticObjective: empty sample set");
  double total = 0.0;
  ParamVector diff(dim_);
  for (std::size_t s : samples) {
    const ParamVector& c = centers_.at(s);
    for (std::size_t n = 0; n < dim_; ++n) diff[n] = x[n] - c[n];
    total += 0.5 * kernels::dot(diff.span(), apply(diff).span());
  }
  return total / static_cast<double>(samples.size());
}

double QuadraticObjective::loss_and_gradient(const ParamVector& x,
                                             std::span<const std::size_t> samples,
                                             ParamVector& grad) const {
  const double value = loss(x, samples);
  ParamVector offset(dim_);
  for (std::size_t s : samples) kernels::axpy(1.0, centers_.at(s).span(), offset.span());
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (std::size_t n = 0; n < dim_; ++n) offset[n] = x[n] - offset[n] * inv;
  grad = apply(offset);
  return value;
}

}  // namespace safari
