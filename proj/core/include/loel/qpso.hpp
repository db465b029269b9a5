#pragma once

#include "loel/gp.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace loel::qpso {

struct SwarmConfig {
  int particle_count = 40;
  int max_iterations = 300;
  double contraction_expansion_initial = 1.0;
  double contraction_expansion_final = 0.5;
  std::vector<std::pair<double, double>> bounds;  // search-space box, one (lower, upper) per dim
  std::uint64_t seed = 0;

  void validate() const;
};

struct SwarmResult {
  std::vector<double> best_position;
  double best_value = 0.0;
  std::size_t evaluations = 0;
  std::vector<double> trace;  // global best after each iteration, non-increasing
};

using Objective = std::function<double(std::span<const double>)>;

// Quantum-behaved PSO (mean-best attractor form). Non-finite objective values
// count as +inf. `initial_positions` replace the first uniform draws, in order.
SwarmResult optimize(const Objective& objective, const SwarmConfig& config,
                     const std::vector<std::vector<double>>& initial_positions = {});

// Log-space box for (log l_1 .. log l_D, log sigma_f^2, log sigma_n^2).
struct HyperparameterBounds {
  std::pair<double, double> length_scale{1.0, 1000.0};         // mm
  std::pair<double, double> signal_variance{1e-12, 1e-6};      // s^2
  std::pair<double, double> noise_variance{1e-16, 1e-8};       // s^2

  std::vector<std::pair<double, double>> log_box(std::size_t dim) const;
};

struct TrainingOptions {
  gp::KernelSpec kernel{};
  HyperparameterBounds bounds{};
  // NLML is evaluated on at most this many evenly strided training pairs; 0 means all.
  std::size_t max_points = 0;
};

// Minimises NLML over log-hyperparameters. When config.bounds is empty the box
// comes from options.bounds. The midpoint of the box is always one of the
// initial particles, so the result never scores worse than it.
gp::Hyperparameters train_hyperparameters(const gp::TrainingSet& ts, const SwarmConfig& config,
                                          const TrainingOptions& options = {});

// Evenly strided subset of at most max_points pairs (identity when it already fits).
gp::TrainingSet stride_subset(const gp::TrainingSet& ts, std::size_t max_points);

gp::Hyperparameters from_log_position(std::span<const double> position);

}  // namespace loel::qpso
