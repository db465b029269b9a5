#pragma once

#include "loel/delaunay.hpp"
#include "loel/events.hpp"
#include "loel/gp.hpp"
#include "loel/locate.hpp"
#include "loel/qpso.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

namespace loel::baselines {

// Delta-T map: per-pair piecewise-linear dTOA interpolant over a Delaunay
// triangulation of the training locations.
class DeltaTMap {
 public:
  DeltaTMap(std::vector<Point2> locations, Eigen::MatrixXd values);  // values: points x pairs

  std::size_t pair_count() const { return static_cast<std::size_t>(values_.cols()); }
  const std::vector<Point2>& locations() const { return locations_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }

  // Interpolated dTOA vector at p; nullopt outside the convex hull.
  std::optional<std::vector<double>> interpolate(Point2 p) const;

 private:
  std::vector<Point2> locations_;
  Eigen::MatrixXd values_;
  std::vector<Triangle> triangles_;
  std::optional<TriangleLocator> locator_;
};

DeltaTMap deltaT_fit(const EventTable& training);

// Interpolated dTOA at every in-hull grid point; reusable across events.
struct DeltaTGridTable {
  std::vector<std::size_t> point_index;  // grid indices inside the hull
  Eigen::MatrixXd values;                // pairs x in-hull points
};

DeltaTGridTable tabulate(const DeltaTMap& map, const locate::PredictiveGrid& grid);

// Grid point minimising sum_j (y_obs_j - interp_j(x))^2; lowest index wins ties.
Point2 deltaT_locate(const DeltaTGridTable& table, const locate::PredictiveGrid& grid,
                     std::span<const double> y_obs);
Point2 deltaT_locate(const DeltaTMap& map, std::span<const double> y_obs, const locate::PredictiveGrid& grid);

// Inverse GP: full dTOA vector -> x and y, one RBF model per coordinate.
// Targets are centred on their training mean.
class DirectGPModel {
 public:
  DirectGPModel(gp::GPModel model_x, gp::GPModel model_y, double mean_x, double mean_y);

  const gp::GPModel& model_x() const { return x_; }
  const gp::GPModel& model_y() const { return y_; }

  struct Estimate {
    Point2 location;
    double variance_x = 0.0;
    double variance_y = 0.0;
  };
  Estimate predict(std::span<const double> y_obs) const;

 private:
  gp::GPModel x_, y_;
  double mean_x_, mean_y_;
};

// Log-space search box for the direct GP, in input units of seconds and
// output units of mm.
qpso::HyperparameterBounds directgp_default_bounds();

DirectGPModel directgp_fit(const EventTable& training, const qpso::SwarmConfig& swarm,
                           const qpso::TrainingOptions& options);
DirectGPModel directgp_fit(const EventTable& training, const qpso::SwarmConfig& swarm);

// Fixed hyperparameters, no optimisation.
DirectGPModel directgp_fit_with(const EventTable& training, const gp::Hyperparameters& hp_x,
                                const gp::Hyperparameters& hp_y);

DirectGPModel::Estimate directgp_locate(const DirectGPModel& model, std::span<const double> y_obs);

}  // namespace loel::baselines
