#include "safari/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "safari/client.hpp"
#include "safari/errors.hpp"
#include "safari/kernels.hpp"
#include "safari/rng.hpp"

namespace safari {

SampleMean sample_mean(std::span<const double> values) {
  SampleMean out;
  if (values.empty()) return out;
  const auto n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

SampleMean estimate_sigma_sq(const Objective& objective, const ParamVector& params,
                             std::size_t batch_size, std::size_t n_draws, std::uint64_t seed) {
  if (n_draws < 2) throw PreconditionError("estimate_sigma_sq needs at least two draws");
  if (batch_size >= objective.sample_count()) return {};
  const ParamVector full = objective.full_gradient(params);
  BatchSampler sampler(objective.sample_count(), batch_size,
                       rng::derive(seed, rng::Purpose::analysis));
  std::vector<double> draws;
  draws.reserve(n_draws);
  ParamVector grad;
  for (std::size_t k = 0; k < n_draws; ++k) {
    objective.loss_and_gradient(params, sampler.next(), grad);
    draws.push_back(kernels::squared_distance(grad.span(), full.span()));
  }
  return sample_mean(draws);
}

DissimilarityFit estimate_dissimilarity(std::span<const Objective* const> clients,
                                        std::span<const ParamVector> points,
                                        const DissimilarityOptions& options) {
  if (clients.empty()) throw PreconditionError("estimate_dissimilarity needs at least one client");
  if (points.empty()) throw PreconditionError("estimate_dissimilarity needs an evaluation point");
  if (!options.masks.empty() && options.masks.size() != clients.size()) {
    throw ConfigError("estimate_dissimilarity: one mask per client required");
  }

  // Per point: a = mean_i ||g_i||^2 and b = ||mean_i g_i||^2.
  std::vector<std::pair<double, double>> stats;
  const auto m = static_cast<double>(clients.size());
  for (const ParamVector& x : points) {
    ParamVector mean(x.size());
    double mean_sq_norm = 0.0;
    for (std::size_t i = 0; i < clients.size(); ++i) {
      const ParamVector at = options.masks.empty() ? x : apply_mask(x, options.masks[i]);
      const ParamVector g = clients[i]->full_gradient(at);
      mean_sq_norm += squared_norm(g);
      kernels::axpy(1.0, g.span(), mean.span());
    }
    for (double& v : mean) v /= m;
    stats.emplace_back(mean_sq_norm / m, squared_norm(mean));
  }

  auto zeta_at = [&](double beta_sq) {
    double worst = 0.0;
    for (const auto& [a, b] : stats) worst = std::max(worst, a - beta_sq * b);
    return worst;
  };

  DissimilarityFit fit;
  fit.beta_sq = 1.0;
  fit.zeta_sq = zeta_at(1.0);
  const std::size_t grid = std::max<std::size_t>(options.grid_points, 2);
  for (std::size_t k = 0; k < grid; ++k) {
    const double beta_sq =
        1.0 + (options.beta_sq_max - 1.0) * static_cast<double>(k) / static_cast<double>(grid - 1);
    fit.frontier.emplace_back(beta_sq, zeta_at(beta_sq));
  }
  return fit;
}

double estimate_smoothness(const Objective& objective, std::span<const ParamVector> points) {
  std::vector<ParamVector> grads;
  grads.reserve(points.size());
  for (const ParamVector& x : points) grads.push_back(objective.full_gradient(x));
  double best = 0.0;
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      const double dx = distance(points[a], points[b]);
      if (!(dx > 0.0)) continue;
      best = std::max(best, distance(grads[a], grads[b]) / dx);
    }
  }
  return best;
}

double compute_phi(std::span<const ParamVector> h_hat,
                   std::span<const std::optional<std::size_t>> surrogate,
                   std::span<const double> success_probability) {
  if (h_hat.size() != surrogate.size() || h_hat.size() != success_probability.size()) {
    throw ConfigError("compute_phi: per-client inputs differ in length");
  }
  double phi = 0.0;
  for (std::size_t i = 0; i < h_hat.size(); ++i) {
    if (!surrogate[i]) continue;
    const double miss = 1.0 - success_probability[i];
    if (miss == 0.0) continue;
    phi += miss * miss * kernels::squared_distance(h_hat[*surrogate[i]].span(), h_hat[i].span());
  }
  return phi;
}

double gamma_term(double learning_rate, double smoothness, std::size_t local_steps) {
  const auto tau = static_cast<double>(local_steps);
  return 4.0 * learning_rate * learning_rate * smoothness * smoothness * tau * (tau - 1.0);
}

DescentReport check_descent_bound(const QuadraticObjective& objective, const ParamVector& start,
                           double learning_rate, std::size_t local_steps, const Mask& mask,
                           double sigma_sq) {
  if (local_steps == 0) throw PreconditionError("check_descent_bound: tau must be >= 1");
  const double smooth = objective.smoothness();
  const auto tau = static_cast<double>(local_steps);
  if (!(learning_rate > 0.0) || learning_rate > tau / (6.0 * smooth) * (1.0 + 1e-12)) {
    throw PreconditionError("check_descent_bound: learning rate must satisfy 0 < eta <= tau / (6 L)");
  }
  if (mask.size() != start.size()) throw ConfigError("check_descent_bound: mask length mismatch");

  DescentReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  ParamVector x = start;
  const double step = learning_rate / tau;
  for (std::size_t k = 0; k < local_steps; ++k) {
    DescentStep s;
    ParamVector grad;
    s.loss_before = objective.full_loss_and_gradient(x, grad);
    s.grad_sq = squared_norm(grad);
    const double x_sq = squared_norm(x);
    s.delta = x_sq > 0.0 ? measure_delta(x, mask) : 0.0;
    const ParamVector pruned_grad = objective.full_gradient(apply_mask(x, mask));
    x = sgd_step(x, pruned_grad, step);
    s.loss_after = objective.full_loss(x);
    s.bound = s.loss_before - learning_rate / (3.0 * tau) * s.grad_sq +
              learning_rate * learning_rate * smooth * sigma_sq / (2.0 * tau * tau) +
              2.0 * learning_rate * smooth * smooth * s.delta * s.delta / (3.0 * tau) * x_sq;
    s.slack = s.bound - s.loss_after;
    report.min_slack = std::min(report.min_slack, s.slack);
    report.steps.push_back(s);
  }
  return report;
}

RateReport rate_check(std::span<const RatePoint> points) {
  RateReport report;
  report.points.assign(points.begin(), points.end());
  std::sort(report.points.begin(), report.points.end(),
            [](const RatePoint& a, const RatePoint& b) { return a.rounds < b.rounds; });
  report.strictly_decreasing = true;
  report.nonincreasing = true;
  for (std::size_t k = 1; k < report.points.size(); ++k) {
    if (!(report.points[k].min_grad_sq < report.points[k - 1].min_grad_sq)) report.strictly_decreasing = false;
    if (report.points[k].min_grad_sq > report.points[k - 1].min_grad_sq) report.nonincreasing = false;
  }
  if (report.points.empty()) return report;
  const RatePoint& first = report.points.front();
  for (const RatePoint& p : report.points) {
    report.observed_ratio.push_back(first.min_grad_sq > 0.0 ? p.min_grad_sq / first.min_grad_sq : 0.0);
    report.predicted_ratio.push_back(
        std::sqrt(static_cast<double>(first.rounds) / static_cast<double>(p.rounds)));
  }
  return report;
}

}  // namespace safari
