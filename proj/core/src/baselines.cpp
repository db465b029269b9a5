#include "loel/baselines.hpp"

#include "loel/errors.hpp"
#include "loel/random.hpp"

#include <limits>

namespace loel::baselines {

namespace {

std::vector<Point2> labelled_locations(const EventTable& training) {
  std::vector<Point2> out;
  out.reserve(training.events.size());
  for (const AEEvent& e : training.events) {
    if (!e.origin) throw ContractViolation("training event '" + e.id + "' has no known origin");
    out.push_back(*e.origin);
  }
  return out;
}

Eigen::MatrixXd dtoa_matrix(const EventTable& training) {
  const auto n = static_cast<Eigen::Index>(training.events.size());
  const auto pairs = static_cast<Eigen::Index>(training.pairs.size());
  Eigen::MatrixXd out(n, pairs);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& dtoa = training.events[static_cast<std::size_t>(i)].dtoa;
    if (static_cast<Eigen::Index>(dtoa.size()) != pairs) {
      throw ContractViolation("training event has the wrong number of dTOA entries");
    }
    for (Eigen::Index j = 0; j < pairs; ++j) out(i, j) = dtoa[static_cast<std::size_t>(j)];
  }
  return out;
}

gp::TrainingSet coordinate_set(const Eigen::MatrixXd& inputs, const std::vector<Point2>& locations, bool x_axis,
                               double centre) {
  gp::TrainingSet ts;
  ts.inputs = inputs;
  ts.targets.resize(static_cast<Eigen::Index>(locations.size()));
  for (std::size_t i = 0; i < locations.size(); ++i) {
    ts.targets(static_cast<Eigen::Index>(i)) = (x_axis ? locations[i].x : locations[i].y) - centre;
  }
  return ts;
}

double mean_of(const std::vector<Point2>& pts, bool x_axis) {
  double acc = 0.0;
  for (const Point2& p : pts) acc += x_axis ? p.x : p.y;
  return acc / static_cast<double>(pts.size());
}

}  // namespace

DeltaTMap::DeltaTMap(std::vector<Point2> locations, Eigen::MatrixXd values)
    : locations_(std::move(locations)), values_(std::move(values)) {
  if (static_cast<Eigen::Index>(locations_.size()) != values_.rows()) {
    throw ContractViolation("delta-T map: one dTOA row per training location required");
  }
  triangles_ = delaunay(locations_);
  locator_.emplace(locations_, triangles_);
}

std::optional<std::vector<double>> DeltaTMap::interpolate(Point2 p) const {
  const auto hit = locator_->locate(p);
  if (!hit) return std::nullopt;
  const Triangle& t = triangles_[hit->triangle];
  std::vector<double> out(pair_count());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    out[j] = hit->weights[0] * values_(static_cast<Eigen::Index>(t[0]), c) +
             hit->weights[1] * values_(static_cast<Eigen::Index>(t[1]), c) +
             hit->weights[2] * values_(static_cast<Eigen::Index>(t[2]), c);
  }
  return out;
}

DeltaTMap deltaT_fit(const EventTable& training) {
  return DeltaTMap(labelled_locations(training), dtoa_matrix(training));
}

DeltaTGridTable tabulate(const DeltaTMap& map, const locate::PredictiveGrid& grid) {
  DeltaTGridTable table;
  std::vector<std::vector<double>> columns;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    if (auto v = map.interpolate(grid.points[i])) {
      table.point_index.push_back(i);
      columns.push_back(std::move(*v));
    }
  }
  table.values.resize(static_cast<Eigen::Index>(map.pair_count()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    for (std::size_t j = 0; j < map.pair_count(); ++j) {
      table.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = columns[k][j];
    }
  }
  return table;
}

Point2 deltaT_locate(const DeltaTGridTable& table, const locate::PredictiveGrid& grid,
                     std::span<const double> y_obs) {
  if (table.point_index.empty()) throw LocalisationError("delta-T: no grid point lies inside the training hull");
  if (static_cast<Eigen::Index>(y_obs.size()) != table.values.rows()) {
    throw ContractViolation("delta-T: one dTOA per sensor pair required");
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (Eigen::Index k = 0; k < table.values.cols(); ++k) {
    double ss = 0.0;
    for (Eigen::Index j = 0; j < table.values.rows(); ++j) {
      const double r = y_obs[static_cast<std::size_t>(j)] - table.values(j, k);
      ss += r * r;
    }
    if (ss < best) {
      best = ss;
      best_k = static_cast<std::size_t>(k);
    }
  }
  return grid.points[table.point_index[best_k]];
}

Point2 deltaT_locate(const DeltaTMap& map, std::span<const double> y_obs, const locate::PredictiveGrid& grid) {
  return deltaT_locate(tabulate(map, grid), grid, y_obs);
}

DirectGPModel::DirectGPModel(gp::GPModel model_x, gp::GPModel model_y, double mean_x, double mean_y)
    : x_(std::move(model_x)), y_(std::move(model_y)), mean_x_(mean_x), mean_y_(mean_y) {
  if (x_.training_set().inputs != y_.training_set().inputs) {
    throw ContractViolation("direct GP: both coordinate models must share their inputs");
  }
}

DirectGPModel::Estimate DirectGPModel::predict(std::span<const double> y_obs) const {
  const gp::Prediction px = x_.predict(y_obs);
  const gp::Prediction py = y_.predict(y_obs);
  return {{px.mean + mean_x_, py.mean + mean_y_}, px.variance, py.variance};
}

qpso::HyperparameterBounds directgp_default_bounds() {
  qpso::HyperparameterBounds b;
  b.length_scale = {5e-6, 1e-3};  // s
  b.signal_variance = {1.0, 1e6};  // mm^2
  b.noise_variance = {1e-6, 1e3};  // mm^2
  return b;
}

DirectGPModel directgp_fit(const EventTable& training, const qpso::SwarmConfig& swarm,
                           const qpso::TrainingOptions& options) {
  const std::vector<Point2> locations = labelled_locations(training);
  if (locations.size() < 2) throw ContractViolation("direct GP: at least two training events required");
  const Eigen::MatrixXd inputs = dtoa_matrix(training);
  const double mx = mean_of(locations, true), my = mean_of(locations, false);
  gp::TrainingSet tx = coordinate_set(inputs, locations, true, mx);
  gp::TrainingSet ty = coordinate_set(inputs, locations, false, my);

  qpso::SwarmConfig sx = swarm, sy = swarm;
  sx.seed = derive_seed(swarm.seed, {tag_of("direct-x")});
  sy.seed = derive_seed(swarm.seed, {tag_of("direct-y")});
  gp::Hyperparameters hx = qpso::train_hyperparameters(tx, sx, options);
  gp::Hyperparameters hy = qpso::train_hyperparameters(ty, sy, options);
  return DirectGPModel(gp::fit(std::move(tx), std::move(hx), options.kernel),
                       gp::fit(std::move(ty), std::move(hy), options.kernel), mx, my);
}

DirectGPModel directgp_fit(const EventTable& training, const qpso::SwarmConfig& swarm) {
  qpso::TrainingOptions options;
  options.kernel.kind = gp::KernelKind::Rbf;
  options.bounds = directgp_default_bounds();
  return directgp_fit(training, swarm, options);
}

DirectGPModel directgp_fit_with(const EventTable& training, const gp::Hyperparameters& hp_x,
                                const gp::Hyperparameters& hp_y) {
  const std::vector<Point2> locations = labelled_locations(training);
  if (locations.size() < 2) throw ContractViolation("direct GP: at least two training events required");
  const Eigen::MatrixXd inputs = dtoa_matrix(training);
  const double mx = mean_of(locations, true), my = mean_of(locations, false);
  const gp::KernelSpec rbf{gp::KernelKind::Rbf, gp::Distance::L2Scaled};
  return DirectGPModel(gp::fit(coordinate_set(inputs, locations, true, mx), hp_x, rbf),
                       gp::fit(coordinate_set(inputs, locations, false, my), hp_y, rbf), mx, my);
}

DirectGPModel::Estimate directgp_locate(const DirectGPModel& model, std::span<const double> y_obs) {
  return model.predict(y_obs);
}

}  // namespace loel::baselines
