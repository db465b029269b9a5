#pragma once

#include "loel/events.hpp"
#include "loel/geometry.hpp"
#include "loel/gp.hpp"
#include "loel/qpso.hpp"
#include "loel/signal.hpp"

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace loel::locate {

// Which variance scores an observed dTOA in the per-pair likelihood.
enum class VarianceMode {
  PosteriorPlusNoise,  // latent posterior variance + sigma_n^2 (default)
  LatentOnly,          // latent posterior variance alone
};

std::string_view to_string(VarianceMode m);
VarianceMode variance_mode_from_string(std::string_view s);

// One forward GP (location -> dTOA) per sensor pair, all on the same inputs.
class ModelBank {
 public:
  ModelBank(signal::PairIndex pairs, std::vector<gp::GPModel> models);

  const signal::PairIndex& pairs() const { return pairs_; }
  const std::vector<gp::GPModel>& models() const { return models_; }
  std::size_t size() const { return models_.size(); }
  const gp::GPModel& operator[](std::size_t j) const { return models_[j]; }
  std::vector<Point2> training_locations() const;

 private:
  signal::PairIndex pairs_;
  std::vector<gp::GPModel> models_;
};

struct BankTrainingConfig {
  qpso::SwarmConfig swarm{};  // bounds empty -> options.bounds
  qpso::TrainingOptions options{};
};

// Trains one model per pair from labelled events; pair j uses a QPSO stream
// derived from (swarm.seed, j). Pairs train in parallel.
ModelBank train_bank(const EventTable& training, const BankTrainingConfig& config);

// Bank with fixed hyperparameters for every pair (no optimisation).
ModelBank fit_bank(const EventTable& training, const gp::Hyperparameters& hp, const gp::KernelSpec& spec = {});

nlohmann::json to_json(const ModelBank& bank);
ModelBank bank_from_json(const nlohmann::json& j);

struct PredictiveGrid {
  double spacing = 1.0;        // mm
  std::vector<Point2> points;  // rows of increasing y, x increasing within a row
};

// Candidate locations at integer multiples of `spacing` that keep `margin` mm
// from plate edges and hole boundaries.
PredictiveGrid make_predictive_grid(const PlateGeometry& geometry, double spacing, double margin = 1.0);

// Per-pair predictive mean and scoring variance at every grid point. Depends
// only on the bank and grid, so one table serves any number of events.
struct GridPrediction {
  Eigen::MatrixXd mean;      // pairs x points
  Eigen::MatrixXd variance;  // pairs x points, includes sigma_n^2 per mode
  VarianceMode mode = VarianceMode::PosteriorPlusNoise;
};

GridPrediction predict_on_grid(const ModelBank& bank, const PredictiveGrid& grid,
                               VarianceMode mode = VarianceMode::PosteriorPlusNoise);

// log N(y | mean, variance); variance is floored at 1e-300.
double gaussian_log_density(double y, double mean, double variance);

double pair_log_likelihood(const gp::GPModel& model, Point2 x_star, double y_obs,
                           VarianceMode mode = VarianceMode::PosteriorPlusNoise);

// log sum_j w_j exp(t_j), stable; -inf when every weighted term is -inf.
double log_sum_exp_weighted(std::span<const double> terms, std::span<const double> weights);

std::vector<double> uniform_weights(std::size_t pairs);

double marginal_log_likelihood(const ModelBank& bank, Point2 x_star, std::span<const double> y_obs,
                               std::span<const double> weights,
                               VarianceMode mode = VarianceMode::PosteriorPlusNoise);

struct LikelihoodMap {
  PredictiveGrid grid;
  Eigen::MatrixXd per_pair_loglik;  // pairs x points
  Eigen::VectorXd marginal;         // log form
  std::vector<double> observed_dtoa;
  std::vector<double> prior_weights;
  std::size_t floored_variances = 0;  // diagnostic
};

LikelihoodMap build_map(const ModelBank& bank, const PredictiveGrid& grid, std::span<const double> y_obs,
                        std::span<const double> weights, VarianceMode mode = VarianceMode::PosteriorPlusNoise);

// Same, from a precomputed table.
LikelihoodMap build_map(const GridPrediction& prediction, const PredictiveGrid& grid,
                        std::span<const double> y_obs, std::span<const double> weights);

struct LocationEstimate {
  Point2 location;
  double log_likelihood = 0.0;
  std::size_t index = 0;
};

// Highest marginal value; the lowest point index wins ties.
LocationEstimate predict_location(const LikelihoodMap& map);

// Argmax of the marginal only, without materialising the per-pair rows.
LocationEstimate locate_event(const GridPrediction& prediction, const PredictiveGrid& grid,
                              std::span<const double> y_obs, std::span<const double> weights);

}  // namespace loel::locate
