#include "loel/locate.hpp"

#include "loel/errors.hpp"
#include "loel/parallel.hpp"
#include "loel/random.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace loel::locate {

namespace {

constexpr double kVarianceFloor = 1e-300;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

gp::TrainingSet training_set_for_pair(const EventTable& table, std::size_t j) {
  gp::TrainingSet ts;
  const auto n = static_cast<Eigen::Index>(table.events.size());
  ts.inputs.resize(n, 2);
  ts.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const AEEvent& e = table.events[static_cast<std::size_t>(i)];
    if (!e.origin) throw ContractViolation("training event '" + e.id + "' has no known origin");
    if (e.dtoa.size() != table.pairs.size()) {
      throw ContractViolation("training event '" + e.id + "' has the wrong number of dTOA entries");
    }
    ts.inputs(i, 0) = e.origin->x;
    ts.inputs(i, 1) = e.origin->y;
    ts.targets(i) = e.dtoa[j];
  }
  return ts;
}

void check_weights(std::span<const double> weights, std::size_t expected) {
  if (weights.size() != expected) throw ContractViolation("weights: one weight per sensor pair required");
  double sum = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0)) throw ContractViolation("weights: must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ContractViolation("weights: must sum to 1");
}

void check_observation(std::span<const double> y_obs, std::size_t expected) {
  if (y_obs.size() != expected) throw ContractViolation("observation: one dTOA per sensor pair required");
}

double scoring_variance(double latent, double noise, VarianceMode mode) {
  return mode == VarianceMode::PosteriorPlusNoise ? latent + noise : latent;
}

}  // namespace

std::string_view to_string(VarianceMode m) {
  return m == VarianceMode::PosteriorPlusNoise ? "posterior-plus-noise" : "latent-variance-only";
}

VarianceMode variance_mode_from_string(std::string_view s) {
  if (s == "posterior-plus-noise") return VarianceMode::PosteriorPlusNoise;
  if (s == "latent-variance-only") return VarianceMode::LatentOnly;
  throw ContractViolation("unknown variance mode '" + std::string(s) + "'");
}

ModelBank::ModelBank(signal::PairIndex pairs, std::vector<gp::GPModel> models)
    : pairs_(std::move(pairs)), models_(std::move(models)) {
  if (models_.size() != pairs_.size()) throw ContractViolation("model bank: one model per pair required");
  if (models_.empty()) throw ContractViolation("model bank: no models");
  const Eigen::MatrixXd& x0 = models_.front().training_set().inputs;
  for (const auto& m : models_) {
    if (m.dim() != 2) throw ContractViolation("model bank: models must take 2-D locations");
    if (m.training_set().inputs != x0) {
      throw ContractViolation("model bank: all models must share the same training locations");
    }
  }
}

std::vector<Point2> ModelBank::training_locations() const {
  const Eigen::MatrixXd& x = models_.front().training_set().inputs;
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back({x(i, 0), x(i, 1)});
  return out;
}

ModelBank train_bank(const EventTable& training, const BankTrainingConfig& config) {
  const std::size_t pairs = training.pairs.size();
  std::vector<std::optional<gp::GPModel>> slots(pairs);
  parallel_for(pairs, [&](std::size_t j) {
    gp::TrainingSet ts = training_set_for_pair(training, j);
    qpso::SwarmConfig swarm = config.swarm;
    swarm.seed = derive_seed(config.swarm.seed, {static_cast<std::uint64_t>(j)});
    gp::Hyperparameters hp = qpso::train_hyperparameters(ts, swarm, config.options);
    slots[j] = gp::fit(std::move(ts), std::move(hp), config.options.kernel);
  });
  std::vector<gp::GPModel> models;
  models.reserve(pairs);
  for (auto& s : slots) models.push_back(std::move(*s));
  return ModelBank(training.pairs, std::move(models));
}

ModelBank fit_bank(const EventTable& training, const gp::Hyperparameters& hp, const gp::KernelSpec& spec) {
  std::vector<gp::GPModel> models;
  for (std::size_t j = 0; j < training.pairs.size(); ++j) {
    models.push_back(gp::fit(training_set_for_pair(training, j), hp, spec));
  }
  return ModelBank(training.pairs, std::move(models));
}

nlohmann::json to_json(const ModelBank& bank) {
  nlohmann::json models = nlohmann::json::array();
  for (std::size_t j = 0; j < bank.size(); ++j) {
    nlohmann::json m = gp::to_json(bank[j]);
    m["pair"] = {bank.pairs()[j].first, bank.pairs()[j].second};
    models.push_back(std::move(m));
  }
  return {{"format", "loel-model-bank"}, {"version", 1}, {"models", std::move(models)}};
}

ModelBank bank_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "loel-model-bank") throw ContractViolation("model bank json: wrong format tag");
  std::vector<signal::SensorPair> pairs;
  std::vector<gp::GPModel> models;
  for (const auto& m : j.at("models")) {
    const auto p = m.at("pair").get<std::vector<int>>();
    if (p.size() != 2) throw ContractViolation("model bank json: pair must have two sensor ids");
    pairs.emplace_back(p[0], p[1]);
    models.push_back(gp::model_from_json(m));
  }
  return ModelBank(signal::PairIndex(std::move(pairs)), std::move(models));
}

PredictiveGrid make_predictive_grid(const PlateGeometry& geometry, double spacing, double margin) {
  if (!(spacing > 0.0)) throw ContractViolation("predictive grid: spacing must be positive");
  PredictiveGrid grid;
  grid.spacing = spacing;
  const auto ny = static_cast<long>(std::floor(geometry.height / spacing));
  const auto nx = static_cast<long>(std::floor(geometry.width / spacing));
  for (long j = 0; j <= ny; ++j) {
    for (long i = 0; i <= nx; ++i) {
      const Point2 p{static_cast<double>(i) * spacing, static_cast<double>(j) * spacing};
      if (geometry.is_valid_location(p, margin)) grid.points.push_back(p);
    }
  }
  return grid;
}

GridPrediction predict_on_grid(const ModelBank& bank, const PredictiveGrid& grid, VarianceMode mode) {
  const auto m = static_cast<Eigen::Index>(grid.points.size());
  Eigen::MatrixXd xs(m, 2);
  for (Eigen::Index i = 0; i < m; ++i) {
    xs(i, 0) = grid.points[static_cast<std::size_t>(i)].x;
    xs(i, 1) = grid.points[static_cast<std::size_t>(i)].y;
  }
  GridPrediction out;
  out.mode = mode;
  out.mean.resize(static_cast<Eigen::Index>(bank.size()), m);
  out.variance.resize(static_cast<Eigen::Index>(bank.size()), m);
  parallel_for(bank.size(), [&](std::size_t j) {
    Eigen::VectorXd mean(m), var(m);
    bank[j].predict_batch(xs, mean, var);
    const double noise = bank[j].hyperparameters().noise_variance;
    const auto row = static_cast<Eigen::Index>(j);
    out.mean.row(row) = mean.transpose();
    for (Eigen::Index i = 0; i < m; ++i) out.variance(row, i) = scoring_variance(var(i), noise, mode);
  });
  return out;
}

double gaussian_log_density(double y, double mean, double variance) {
  const double v = std::max(variance, kVarianceFloor);
  const double r = y - mean;
  return -0.5 * std::log(v) - r * r / (2.0 * v) - kHalfLog2Pi;
}

double pair_log_likelihood(const gp::GPModel& model, Point2 x_star, double y_obs, VarianceMode mode) {
  const double x[2] = {x_star.x, x_star.y};
  const gp::Prediction p = model.predict(x);
  return gaussian_log_density(y_obs, p.mean,
                              scoring_variance(p.variance, model.hyperparameters().noise_variance, mode));
}

double log_sum_exp_weighted(std::span<const double> terms, std::span<const double> weights) {
  if (terms.size() != weights.size()) throw ContractViolation("log_sum_exp: size mismatch");
  double peak = kNegInf;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (weights[j] > 0.0) peak = std::max(peak, terms[j] + std::log(weights[j]));
  }
  if (peak == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (weights[j] > 0.0) acc += std::exp(terms[j] + std::log(weights[j]) - peak);
  }
  return peak + std::log(acc);
}

std::vector<double> uniform_weights(std::size_t pairs) {
  return std::vector<double>(pairs, 1.0 / static_cast<double>(pairs));
}

double marginal_log_likelihood(const ModelBank& bank, Point2 x_star, std::span<const double> y_obs,
                               std::span<const double> weights, VarianceMode mode) {
  check_observation(y_obs, bank.size());
  check_weights(weights, bank.size());
  std::vector<double> terms(bank.size());
  for (std::size_t j = 0; j < bank.size(); ++j) terms[j] = pair_log_likelihood(bank[j], x_star, y_obs[j], mode);
  return log_sum_exp_weighted(terms, weights);
}

LikelihoodMap build_map(const ModelBank& bank, const PredictiveGrid& grid, std::span<const double> y_obs,
                        std::span<const double> weights, VarianceMode mode) {
  if (grid.points.empty()) throw ContractViolation("build_map: empty predictive grid");
  check_observation(y_obs, bank.size());
  check_weights(weights, bank.size());
  return build_map(predict_on_grid(bank, grid, mode), grid, y_obs, weights);
}

LikelihoodMap build_map(const GridPrediction& prediction, const PredictiveGrid& grid,
                        std::span<const double> y_obs, std::span<const double> weights) {
  const auto pairs = static_cast<std::size_t>(prediction.mean.rows());
  const auto m = static_cast<Eigen::Index>(grid.points.size());
  if (m == 0) throw ContractViolation("build_map: empty predictive grid");
  if (prediction.mean.cols() != m) throw ContractViolation("build_map: prediction table does not match grid");
  check_observation(y_obs, pairs);
  check_weights(weights, pairs);

  LikelihoodMap map;
  map.grid = grid;
  map.observed_dtoa.assign(y_obs.begin(), y_obs.end());
  map.prior_weights.assign(weights.begin(), weights.end());
  map.per_pair_loglik.resize(static_cast<Eigen::Index>(pairs), m);
  map.marginal.resize(m);
  std::vector<double> terms(pairs);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < pairs; ++j) {
      const auto r = static_cast<Eigen::Index>(j);
      const double v = prediction.variance(r, i);
      if (v < kVarianceFloor) ++map.floored_variances;
      terms[j] = gaussian_log_density(y_obs[j], prediction.mean(r, i), v);
      map.per_pair_loglik(r, i) = terms[j];
    }
    map.marginal(i) = log_sum_exp_weighted(terms, weights);
  }
  return map;
}

LocationEstimate predict_location(const LikelihoodMap& map) {
  if (map.marginal.size() == 0) throw ContractViolation("predict_location: empty map");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < map.marginal.size(); ++i) {
    if (map.marginal(i) > map.marginal(best)) best = i;
  }
  return {map.grid.points[static_cast<std::size_t>(best)], map.marginal(best), static_cast<std::size_t>(best)};
}

LocationEstimate locate_event(const GridPrediction& prediction, const PredictiveGrid& grid,
                              std::span<const double> y_obs, std::span<const double> weights) {
  const auto pairs = static_cast<std::size_t>(prediction.mean.rows());
  const auto m = static_cast<Eigen::Index>(grid.points.size());
  if (m == 0) throw ContractViolation("locate: empty predictive grid");
  if (prediction.mean.cols() != m) throw ContractViolation("locate: prediction table does not match grid");
  check_observation(y_obs, pairs);
  check_weights(weights, pairs);
  std::vector<double> terms(pairs);
  double best_value = kNegInf;
  Eigen::Index best = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < pairs; ++j) {
      const auto r = static_cast<Eigen::Index>(j);
      terms[j] = gaussian_log_density(y_obs[j], prediction.mean(r, i), prediction.variance(r, i));
    }
    const double v = log_sum_exp_weighted(terms, weights);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return {grid.points[static_cast<std::size_t>(best)], best_value, static_cast<std::size_t>(best)};
}

}  // namespace loel::locate
