#include "loel/errors.hpp"
#include "loel/gp.hpp"
#include "loel/qpso.hpp"

#include <gtest/gtest.h>

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <random>

using namespace loel;

namespace {

qpso::SwarmConfig box(std::size_t dim, double lo, double hi, int particles, int iterations, std::uint64_t seed = 7) {
  qpso::SwarmConfig c;
  c.particle_count = particles;
  c.max_iterations = iterations;
  c.bounds.assign(dim, {lo, hi});
  c.seed = seed;
  return c;
}

double sphere_at_one(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += (v - 1) * (v - 1);
  return s;
}

}  // namespace

TEST(Qpso, FindsShiftedSphereMinimum) {
  const qpso::SwarmResult r = qpso::optimize(sphere_at_one, box(2, -5, 5, 30, 200));
  EXPECT_LT(r.best_value, 1e-4);
  EXPECT_NEAR(r.best_position[0], 1.0, 1e-2);
  EXPECT_NEAR(r.best_position[1], 1.0, 1e-2);
}

TEST(Qpso, ConstantObjective) {
  const qpso::SwarmResult r = qpso::optimize([](std::span<const double>) { return 3.5; }, box(3, -1, 2, 10, 20));
  EXPECT_EQ(r.best_value, 3.5);
  for (double v : r.best_position) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 2.0);
  }
}

TEST(Qpso, FindsAbsoluteValueMinimum) {
  const qpso::SwarmResult r = qpso::optimize([](std::span<const double> x) { return std::abs(x[0]); }, box(1, -1, 1, 30, 200));
  EXPECT_LT(std::abs(r.best_position[0]), 1e-3);
}

TEST(Qpso, ReproducibleForFixedSeed) {
  const auto c = box(4, -3, 3, 25, 60, 99);
  const qpso::SwarmResult a = qpso::optimize(sphere_at_one, c);
  const qpso::SwarmResult b = qpso::optimize(sphere_at_one, c);
  EXPECT_EQ(a.best_position, b.best_position);
  EXPECT_EQ(a.best_value, b.best_value);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.evaluations, b.evaluations);
  const qpso::SwarmResult other = qpso::optimize(sphere_at_one, box(4, -3, 3, 25, 60, 100));
  EXPECT_NE(a.best_position, other.best_position);
}

TEST(Qpso, TraceIsMonotoneAndBestIsConsistent) {
  auto rastrigin = [](std::span<const double> x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10 * std::cos(2 * 3.141592653589793 * v);
    return s;
  };
  const qpso::SwarmResult r = qpso::optimize(rastrigin, box(3, -5.12, 5.12, 20, 80));
  ASSERT_EQ(r.trace.size(), 80u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
  EXPECT_EQ(r.trace.back(), r.best_value);
  EXPECT_EQ(rastrigin(r.best_position), r.best_value);
  EXPECT_EQ(r.evaluations, 20u * 81u);
}

TEST(Qpso, RespectsBoundsEvenWhenOptimumIsOutside) {
  auto c = box(2, 2, 4, 20, 50);
  c.bounds[1] = {-8, -6};
  std::size_t outside = 0;
  const qpso::SwarmResult r = qpso::optimize(
      [&](std::span<const double> x) {
        if (x[0] < 2 || x[0] > 4 || x[1] < -8 || x[1] > -6) ++outside;
        return sphere_at_one(x);
      },
      c);
  EXPECT_EQ(outside, 0u);
  EXPECT_DOUBLE_EQ(r.best_position[0], 2.0);
  EXPECT_DOUBLE_EQ(r.best_position[1], -6.0);
}

TEST(Qpso, NonFiniteValuesAreInfinite) {
  const qpso::SwarmResult r = qpso::optimize(
      [](std::span<const double> x) { return x[0] < 0 ? std::numeric_limits<double>::quiet_NaN() : x[0]; },
      box(1, -1, 1, 20, 50));
  EXPECT_GE(r.best_position[0], 0.0);
  EXPECT_LT(r.best_value, 1e-3);
}

TEST(Qpso, AllInfiniteFails) {
  EXPECT_THROW(qpso::optimize([](std::span<const double>) { return std::numeric_limits<double>::infinity(); },
                              box(2, 0, 1, 5, 5)),
               OptimizationFailed);
}

TEST(Qpso, InitialPositionsAreEvaluatedFirst) {
  std::vector<double> first;
  qpso::optimize(
      [&](std::span<const double> x) {
        if (first.empty()) first.assign(x.begin(), x.end());
        return sphere_at_one(x);
      },
      box(2, -5, 5, 4, 3), {{0.25, -0.75}});
  EXPECT_EQ(first, (std::vector<double>{0.25, -0.75}));
}

TEST(Qpso, ConfigValidation) {
  auto c = box(2, 0, 1, 10, 10);
  c.contraction_expansion_final = 1.5;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = box(2, 0, 1, 10, 10);
  c.contraction_expansion_initial = 2.5;
  c.contraction_expansion_final = 0.5;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = box(2, 1, 1, 10, 10);
  EXPECT_THROW(c.validate(), ContractViolation);
  c = box(2, 0, 1, 0, 10);
  EXPECT_THROW(c.validate(), ContractViolation);
  c = box(2, 0, 1, 10, 0);
  EXPECT_THROW(c.validate(), ContractViolation);
  c = box(2, 0, 1, 10, 10);
  c.contraction_expansion_final = 0.0;
  EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(TrainHyperparameters, RecoversLengthScaleOfAKnownDraw) {
  // 10 x 10 grid, 10 mm pitch; targets drawn from a Matérn 3/2 GP with
  // l = (30, 30) mm and sigma_f^2 = 1e-9 s^2.
  gp::TrainingSet ts;
  ts.inputs.resize(100, 2);
  for (int i = 0; i < 100; ++i) ts.inputs.row(i) << 5.0 + 10.0 * (i % 10), 5.0 + 10.0 * (i / 10);
  const gp::Hyperparameters truth{{30.0, 30.0}, 1e-9, 1e-14};
  Eigen::MatrixXd k = gp::build_covariance(ts.inputs, ts.inputs, truth);
  k.diagonal().array() += truth.noise_variance;
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(k).matrixL();
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n01;
  Eigen::VectorXd z(100);
  for (auto& v : z) v = n01(rng);
  ts.targets = l * z;

  qpso::SwarmConfig c;
  c.seed = 5;
  const gp::Hyperparameters hp = qpso::train_hyperparameters(ts, c);
  for (double ls : hp.length_scales) {
    EXPECT_GT(ls, 15.0);
    EXPECT_LT(ls, 60.0);
  }
}

TEST(TrainHyperparameters, PureNoiseIsAttributedToNoise) {
  gp::TrainingSet ts;
  ts.inputs.resize(100, 2);
  for (int i = 0; i < 100; ++i) ts.inputs.row(i) << 5.0 + 10.0 * (i % 10), 5.0 + 10.0 * (i / 10);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> noise(0.0, 1e-5);
  ts.targets.resize(100);
  for (auto& v : ts.targets) v = noise(rng);
  qpso::SwarmConfig c;
  c.seed = 3;
  const gp::Hyperparameters hp = qpso::train_hyperparameters(ts, c);
  EXPECT_GE(hp.noise_variance / (hp.noise_variance + hp.signal_variance), 0.8);
}

TEST(TrainHyperparameters, NeverWorseThanBoxMidpoint) {
  gp::TrainingSet ts;
  ts.inputs.resize(2, 2);
  ts.inputs << 10, 10, 40, 25;
  ts.targets = Eigen::VectorXd::Zero(2);
  qpso::SwarmConfig c = box(4, 0, 1, 10, 20);
  c.bounds.clear();
  const qpso::HyperparameterBounds bounds;
  const gp::Hyperparameters hp = qpso::train_hyperparameters(ts, c);
  std::vector<double> mid;
  for (const auto& [lo, hi] : bounds.log_box(2)) mid.push_back(0.5 * (lo + hi));
  EXPECT_LE(gp::neg_log_marginal_likelihood(ts, hp), gp::neg_log_marginal_likelihood(ts, qpso::from_log_position(mid)));
}

TEST(TrainHyperparameters, ResultLiesInsideTheBox) {
  gp::TrainingSet ts;
  ts.inputs.resize(30, 2);
  ts.targets.resize(30);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 100);
  for (int i = 0; i < 30; ++i) {
    ts.inputs.row(i) << u(rng), u(rng);
    ts.targets(i) = 1e-5 * std::sin(ts.inputs(i, 0) / 20.0);
  }
  qpso::SwarmConfig c = box(4, 0, 1, 12, 30);
  c.bounds.clear();
  const qpso::HyperparameterBounds b;
  const gp::Hyperparameters hp = qpso::train_hyperparameters(ts, c);
  for (double l : hp.length_scales) {
    EXPECT_GE(l, b.length_scale.first * (1 - 1e-12));
    EXPECT_LE(l, b.length_scale.second * (1 + 1e-12));
  }
  EXPECT_GE(hp.signal_variance, b.signal_variance.first * (1 - 1e-12));
  EXPECT_LE(hp.signal_variance, b.signal_variance.second * (1 + 1e-12));
  EXPECT_GE(hp.noise_variance, b.noise_variance.first * (1 - 1e-12));
  EXPECT_LE(hp.noise_variance, b.noise_variance.second * (1 + 1e-12));
}

TEST(StrideSubset, EvenlySpacedAndIdentityWhenSmall) {
  gp::TrainingSet ts;
  ts.inputs.resize(10, 2);
  ts.targets.resize(10);
  for (int i = 0; i < 10; ++i) {
    ts.inputs.row(i) << i, -i;
    ts.targets(i) = i;
  }
  const gp::TrainingSet all = qpso::stride_subset(ts, 0);
  EXPECT_EQ(all.targets, ts.targets);
  EXPECT_EQ(qpso::stride_subset(ts, 20).targets, ts.targets);
  const gp::TrainingSet sub = qpso::stride_subset(ts, 4);
  ASSERT_EQ(sub.size(), 4u);
  EXPECT_EQ(sub.targets(0), 0.0);
  for (Eigen::Index i = 1; i < 4; ++i) EXPECT_GT(sub.targets(i), sub.targets(i - 1));
}
