#pragma once

#include "loel/gp.hpp"
#include "oracles/dense_gp.hpp"

#include <Eigen/Core>

#include <cmath>
#include <random>
#include <vector>

namespace testing_support {

inline oracle::Problem random_problem(std::mt19937_64& rng, std::size_t n, std::size_t dim = 2,
                                      oracle::Radius form = oracle::Radius::L2) {
  std::uniform_real_distribution<double> coord(0.0, 100.0), ls(10.0, 80.0), sf(0.5, 2.0), sn(1e-4, 1e-2),
      target(-1.0, 1.0);
  oracle::Problem p;
  p.form = form;
  for (std::size_t i = 0; i < n; ++i) {
    oracle::Point x(dim);
    for (auto& v : x) v = coord(rng);
    p.x.push_back(x);
    p.y.push_back(target(rng));
  }
  for (std::size_t d = 0; d < dim; ++d) p.l.push_back(ls(rng));
  p.sf2 = sf(rng);
  p.sn2 = sn(rng);
  return p;
}

inline loel::gp::TrainingSet to_training_set(const oracle::Problem& p) {
  loel::gp::TrainingSet ts;
  ts.inputs.resize(static_cast<Eigen::Index>(p.x.size()), static_cast<Eigen::Index>(p.x.front().size()));
  ts.targets.resize(static_cast<Eigen::Index>(p.x.size()));
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    for (std::size_t d = 0; d < p.x[i].size(); ++d) {
      ts.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = p.x[i][d];
    }
    ts.targets(static_cast<Eigen::Index>(i)) = p.y[i];
  }
  return ts;
}

inline loel::gp::Hyperparameters to_hp(const oracle::Problem& p) { return {p.l, p.sf2, p.sn2}; }

inline loel::gp::KernelSpec to_spec(const oracle::Problem& p) {
  return {p.use_rbf ? loel::gp::KernelKind::Rbf : loel::gp::KernelKind::Matern32,
          p.form == oracle::Radius::L1 ? loel::gp::Distance::L1Scaled : loel::gp::Distance::L2Scaled};
}

inline double rel_err(long double got, long double want) {
  const long double scale = std::fmax(std::fabs(want), 1e-300L);
  return static_cast<double>(std::fabs(got - want) / scale);
}

}  // namespace testing_support
