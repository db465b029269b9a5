#include "loel/qpso.hpp"

#include "loel/errors.hpp"
#include "loel/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace loel::qpso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, std::span<const double> x) {
  const double v = f(x);
  return std::isfinite(v) ? v : kInf;
}

void clamp_to_box(std::vector<double>& x, const std::vector<std::pair<double, double>>& box) {
  for (std::size_t d = 0; d < x.size(); ++d) x[d] = std::clamp(x[d], box[d].first, box[d].second);
}

}  // namespace

void SwarmConfig::validate() const {
  if (particle_count <= 0) throw ContractViolation("qpso: particle_count must be positive");
  if (max_iterations <= 0) throw ContractViolation("qpso: max_iterations must be positive");
  if (bounds.empty()) throw ContractViolation("qpso: bounds must not be empty");
  for (const auto& [lo, hi] : bounds) {
    if (!(lo < hi)) throw ContractViolation("qpso: each bound needs lower < upper");
  }
  const double b0 = contraction_expansion_initial;
  const double b1 = contraction_expansion_final;
  if (!(b1 > 0.0 && b1 <= b0 && b0 <= 2.0)) {
    throw ContractViolation("qpso: need 0 < final <= initial <= 2 for the contraction-expansion coefficient");
  }
}

SwarmResult optimize(const Objective& objective, const SwarmConfig& config,
                     const std::vector<std::vector<double>>& initial_positions) {
  config.validate();
  const std::size_t dim = config.bounds.size();
  const auto particles = static_cast<std::size_t>(config.particle_count);
  Rng rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<double>> x(particles, std::vector<double>(dim));
  for (std::size_t i = 0; i < particles; ++i) {
    if (i < initial_positions.size()) {
      if (initial_positions[i].size() != dim) throw ContractViolation("qpso: initial position has wrong dimension");
      x[i] = initial_positions[i];
    } else {
      for (std::size_t d = 0; d < dim; ++d) {
        const auto [lo, hi] = config.bounds[d];
        x[i][d] = lo + (hi - lo) * unit(rng);
      }
    }
    clamp_to_box(x[i], config.bounds);
  }

  SwarmResult result;
  std::vector<std::vector<double>> pbest = x;
  std::vector<double> pbest_value(particles);
  std::size_t gbest = 0;
  for (std::size_t i = 0; i < particles; ++i) {
    pbest_value[i] = safe_eval(objective, x[i]);
    if (pbest_value[i] < pbest_value[gbest]) gbest = i;
  }
  result.evaluations = particles;

  std::vector<double> mbest(dim);
  const int iterations = config.max_iterations;
  for (int t = 0; t < iterations; ++t) {
    const double frac = iterations > 1 ? static_cast<double>(t) / (iterations - 1) : 0.0;
    const double beta = config.contraction_expansion_initial -
                        (config.contraction_expansion_initial - config.contraction_expansion_final) * frac;

    std::fill(mbest.begin(), mbest.end(), 0.0);
    for (std::size_t i = 0; i < particles; ++i) {
      for (std::size_t d = 0; d < dim; ++d) mbest[d] += pbest[i][d];
    }
    for (auto& m : mbest) m /= static_cast<double>(particles);

    // Draw every random number for this iteration before any evaluation.
    for (std::size_t i = 0; i < particles; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double phi = unit(rng);
        const double attractor = phi * pbest[i][d] + (1.0 - phi) * pbest[gbest][d];
        const double u = 1.0 - unit(rng);  // (0, 1]
        const double step = beta * std::abs(mbest[d] - x[i][d]) * std::log(1.0 / u);
        x[i][d] = unit(rng) < 0.5 ? attractor + step : attractor - step;
      }
      clamp_to_box(x[i], config.bounds);
    }

    std::vector<double> values(particles);
    for (std::size_t i = 0; i < particles; ++i) values[i] = safe_eval(objective, x[i]);
    result.evaluations += particles;

    for (std::size_t i = 0; i < particles; ++i) {
      if (values[i] < pbest_value[i]) {
        pbest_value[i] = values[i];
        pbest[i] = x[i];
      }
      if (pbest_value[i] < pbest_value[gbest]) gbest = i;
    }
    result.trace.push_back(pbest_value[gbest]);
  }

  if (!std::isfinite(pbest_value[gbest])) {
    throw OptimizationFailed("qpso: objective was non-finite at every evaluated position");
  }
  result.best_position = pbest[gbest];
  result.best_value = pbest_value[gbest];
  return result;
}

std::vector<std::pair<double, double>> HyperparameterBounds::log_box(std::size_t dim) const {
  std::vector<std::pair<double, double>> box;
  for (std::size_t d = 0; d < dim; ++d) box.emplace_back(std::log(length_scale.first), std::log(length_scale.second));
  box.emplace_back(std::log(signal_variance.first), std::log(signal_variance.second));
  box.emplace_back(std::log(noise_variance.first), std::log(noise_variance.second));
  return box;
}

gp::Hyperparameters from_log_position(std::span<const double> position) {
  if (position.size() < 3) throw ContractViolation("qpso: hyperparameter position needs at least 3 entries");
  gp::Hyperparameters hp;
  const std::size_t dim = position.size() - 2;
  for (std::size_t d = 0; d < dim; ++d) hp.length_scales.push_back(std::exp(position[d]));
  hp.signal_variance = std::exp(position[dim]);
  hp.noise_variance = std::exp(position[dim + 1]);
  return hp;
}

gp::TrainingSet stride_subset(const gp::TrainingSet& ts, std::size_t max_points) {
  const std::size_t n = ts.size();
  if (max_points == 0 || n <= max_points) return ts;
  gp::TrainingSet out;
  out.inputs.resize(static_cast<Eigen::Index>(max_points), ts.inputs.cols());
  out.targets.resize(static_cast<Eigen::Index>(max_points));
  for (std::size_t k = 0; k < max_points; ++k) {
    const auto i = static_cast<Eigen::Index>((k * n) / max_points);
    out.inputs.row(static_cast<Eigen::Index>(k)) = ts.inputs.row(i);
    out.targets(static_cast<Eigen::Index>(k)) = ts.targets(i);
  }
  return out;
}

gp::Hyperparameters train_hyperparameters(const gp::TrainingSet& ts, const SwarmConfig& config,
                                          const TrainingOptions& options) {
  ts.validate();
  SwarmConfig cfg = config;
  if (cfg.bounds.empty()) cfg.bounds = options.bounds.log_box(ts.dim());
  if (cfg.bounds.size() != ts.dim() + 2) {
    throw ContractViolation("train_hyperparameters: bounds must cover D length scales plus two variances");
  }
  const gp::TrainingSet subset = stride_subset(ts, options.max_points);
  const gp::KernelSpec spec = options.kernel;
  auto objective = [&](std::span<const double> theta) {
    try {
      return gp::neg_log_marginal_likelihood(subset, from_log_position(theta), spec);
    } catch (const NotPositiveDefinite&) {
      return kInf;
    }
  };
  std::vector<double> midpoint;
  for (const auto& [lo, hi] : cfg.bounds) midpoint.push_back(0.5 * (lo + hi));
  const SwarmResult r = optimize(objective, cfg, {midpoint});
  return from_log_position(r.best_position);
}

}  // namespace loel::qpso
