#pragma once

// Empirical counterparts of the convergence analysis: gradient variance,
// bounded dissimilarity, smoothness, mask error, the compensation bias term
// phi, the per-step descent bound and the rate check over horizons T.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "safari/objective.hpp"
#include "safari/param_vector.hpp"
#include "safari/sparsity.hpp"

namespace safari {

struct SampleMean {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Mean of ||g(batch) - grad L_i(x)||^2 over n_draws batches drawn without
// replacement. Exactly zero when batch_size >= n_i.
SampleMean estimate_sigma_sq(const Objective& objective, const ParamVector& params,
                             std::size_t batch_size, std::size_t n_draws, std::uint64_t seed);

struct DissimilarityFit {
  double beta_sq = 1.0;
  double zeta_sq = 0.0;  // smallest zeta^2 that holds at beta^2 = 1
  std::vector<std::pair<double, double>> frontier;  // (beta^2, minimal zeta^2)
};

struct DissimilarityOptions {
  double beta_sq_max = 10.0;
  std::size_t grid_points = 10;
  // When set, client i's gradient is evaluated at x * masks[i].
  std::span<const Mask> masks{};
};

DissimilarityFit estimate_dissimilarity(std::span<const Objective* const> clients,
                                        std::span<const ParamVector> points,
                                        const DissimilarityOptions& options = {});

// max over distinct pairs of ||grad L(x) - grad L(y)|| / ||x - y||; a lower
// bound on the smoothness constant.
double estimate_smoothness(const Objective& objective, std::span<const ParamVector> points);

// sum_i (1 - p_i)^2 ||h_{i'} - h_i||^2, skipping clients without a surrogate.
double compute_phi(std::span<const ParamVector> h_hat,
                   std::span<const std::optional<std::size_t>> surrogate,
                   std::span<const double> success_probability);

// 4 eta^2 L^2 tau (tau - 1)
double gamma_term(double learning_rate, double smoothness, std::size_t local_steps);

struct DescentStep {
  double loss_before = 0.0;
  double loss_after = 0.0;
  double bound = 0.0;  // right-hand side of the descent inequality
  double slack = 0.0;  // bound - loss_after
  double grad_sq = 0.0;
  double delta = 0.0;
};

struct DescentReport {
  std::vector<DescentStep> steps;
  double min_slack = 0.0;
};

// Runs tau steps x_k = x_{k-1} - (eta/tau) grad L(x_{k-1} * M) on the full
// objective and checks
//   L(x_k) <= L(x_{k-1}) - eta/(3 tau) ||grad L(x_{k-1})||^2
//             + eta^2 L sigma^2 / (2 tau^2) + 2 eta L^2 delta^2 / (3 tau) ||x_{k-1}||^2
// with delta measured per step. Throws PreconditionError if eta > tau / (6 L).
DescentReport check_descent_bound(const QuadraticObjective& objective, const ParamVector& start,
                           double learning_rate, std::size_t local_steps, const Mask& mask,
                           double sigma_sq = 0.0);

struct RatePoint {
  std::size_t rounds = 0;
  double min_grad_sq = 0.0;
};

struct RateReport {
  std::vector<RatePoint> points;        // ascending in rounds
  bool strictly_decreasing = false;
  bool nonincreasing = false;
  std::vector<double> observed_ratio;   // min_grad_sq(T) / min_grad_sq(T0)
  std::vector<double> predicted_ratio;  // sqrt(T0 / T)
};

RateReport rate_check(std::span<const RatePoint> points);

struct AnalysisReport {
  double sigma_sq = 0.0;
  double sigma_sq_standard_error = 0.0;
  double beta_sq = 1.0;
  double zeta_sq = 0.0;
  double masked_zeta_sq = 0.0;
  double smoothness_L = 0.0;
  double delta_max = 0.0;
  double learning_rate = 0.0;
  std::size_t local_steps = 1;
  double gamma = 0.0;
  bool phi_measured = false;
  double phi = 0.0;  // mean over rounds
  double phi_standard_error = 0.0;

  double rate_A() const noexcept { return static_cast<double>(local_steps); }
  double rate_B() const noexcept { return static_cast<double>(local_steps) - 1.0; }
  double rate_C() const noexcept { return rate_A() * rate_B(); }
};

SampleMean sample_mean(std::span<const double> values);

}  // namespace safari
