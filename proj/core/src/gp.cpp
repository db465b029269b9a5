#include "loel/gp.hpp"

#include "loel/errors.hpp"

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace loel::gp {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kJitterStart = 1e-12;
constexpr double kJitterMax = 1e-6;
// Negative variances down to this fraction of the prior variance are round-off.
constexpr double kVarianceClampRelative = 1e-12;
constexpr Eigen::Index kPredictChunk = 256;

double kernel_from_radius(const KernelSpec& spec, double r, double signal_variance) {
  if (spec.kind == KernelKind::Rbf) return signal_variance * std::exp(-0.5 * r * r);
  const double s = kSqrt3 * r;
  return signal_variance * (1.0 + s) * std::exp(-s);
}

// Row-major copy of a point so spans see contiguous memory.
template <typename Row>
void copy_row(const Row& row, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(row.size()));
  for (Eigen::Index d = 0; d < row.size(); ++d) out[static_cast<std::size_t>(d)] = row(d);
}

// Inputs stored scaled by 1/l so the kernel loop only needs differences.
Eigen::MatrixXd scale_inputs(const Eigen::MatrixXd& x, const std::vector<double>& lengths) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index d = 0; d < x.cols(); ++d) out.col(d) = x.col(d) / lengths[static_cast<std::size_t>(d)];
  return out;
}

double radius_scaled(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b,
                     Eigen::Index j, const KernelSpec& spec) {
  const bool l1 = spec.kind == KernelKind::Matern32 && spec.distance == Distance::L1Scaled;
  double acc = 0.0;
  for (Eigen::Index d = 0; d < a.cols(); ++d) {
    const double diff = a(i, d) - b(j, d);
    acc += l1 ? std::abs(diff) : diff * diff;
  }
  return l1 ? acc : std::sqrt(acc);
}

Eigen::MatrixXd covariance_symmetric(const Eigen::MatrixXd& x, const Hyperparameters& hp,
                                     const KernelSpec& spec) {
  const Eigen::MatrixXd s = scale_inputs(x, hp.length_scales);
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = hp.signal_variance;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = kernel_from_radius(spec, radius_scaled(s, i, s, j, spec), hp.signal_variance);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

void check_dims(std::span<const double> a, std::span<const double> b,
                std::span<const double> lengths) {
  if (a.size() != b.size() || a.size() != lengths.size()) {
    throw ContractViolation("kernel: dimension mismatch between points and length scales");
  }
}

void check_no_duplicates(const TrainingSet& ts) {
  for (Eigen::Index i = 0; i < ts.inputs.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < ts.inputs.rows(); ++j) {
      if (ts.inputs.row(i) == ts.inputs.row(j)) {
        throw NotPositiveDefinite(
            "fit: duplicate training inputs with zero noise variance give a singular kernel matrix",
            0.0);
      }
    }
  }
}

CholeskyResult factorise(const TrainingSet& ts, const Hyperparameters& hp, const KernelSpec& spec) {
  ts.validate();
  hp.validate(ts.dim());
  if (hp.noise_variance == 0.0) check_no_duplicates(ts);
  Eigen::MatrixXd k = covariance_symmetric(ts.inputs, hp, spec);
  k.diagonal().array() += hp.noise_variance;
  return cholesky_with_jitter(std::move(k));
}

}  // namespace

std::string_view to_string(Distance d) {
  return d == Distance::L1Scaled ? "l1-scaled" : "l2-scaled";
}

std::string_view to_string(KernelKind k) { return k == KernelKind::Matern32 ? "matern32" : "rbf"; }

Distance distance_from_string(std::string_view s) {
  if (s == "l1-scaled") return Distance::L1Scaled;
  if (s == "l2-scaled") return Distance::L2Scaled;
  throw ContractViolation("unknown distance form '" + std::string(s) + "'");
}

KernelKind kernel_from_string(std::string_view s) {
  if (s == "matern32") return KernelKind::Matern32;
  if (s == "rbf") return KernelKind::Rbf;
  throw ContractViolation("unknown kernel '" + std::string(s) + "'");
}

void Hyperparameters::validate(std::size_t dim) const {
  if (length_scales.size() != dim) {
    throw ContractViolation("hyperparameters: expected " + std::to_string(dim) +
                            " length scales, got " + std::to_string(length_scales.size()));
  }
  for (const double l : length_scales) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ContractViolation("hyperparameters: length scales must be positive");
  }
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw ContractViolation("hyperparameters: signal variance must be positive");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw ContractViolation("hyperparameters: noise variance must be non-negative");
  }
}

void TrainingSet::validate() const {
  if (targets.size() == 0) throw ContractViolation("training set: at least one pair required");
  if (inputs.rows() != targets.size()) {
    throw ContractViolation("training set: inputs and targets differ in length");
  }
  if (inputs.cols() == 0) throw ContractViolation("training set: zero-dimensional inputs");
}

double scaled_distance(std::span<const double> a, std::span<const double> b,
                       std::span<const double> length_scales, Distance distance) {
  check_dims(a, b, length_scales);
  double acc = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = (a[d] - b[d]) / length_scales[d];
    acc += distance == Distance::L1Scaled ? std::abs(diff) : diff * diff;
  }
  return distance == Distance::L1Scaled ? acc : std::sqrt(acc);
}

double matern32(std::span<const double> a, std::span<const double> b, const Hyperparameters& hp,
                Distance distance) {
  const double r = scaled_distance(a, b, hp.length_scales, distance);
  return kernel_from_radius({KernelKind::Matern32, distance}, r, hp.signal_variance);
}

double rbf(std::span<const double> a, std::span<const double> b, const Hyperparameters& hp) {
  const double r = scaled_distance(a, b, hp.length_scales, Distance::L2Scaled);
  return kernel_from_radius({KernelKind::Rbf, Distance::L2Scaled}, r, hp.signal_variance);
}

double kernel(const KernelSpec& spec, std::span<const double> a, std::span<const double> b,
              const Hyperparameters& hp) {
  return spec.kind == KernelKind::Rbf ? rbf(a, b, hp) : matern32(a, b, hp, spec.distance);
}

Eigen::MatrixXd build_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 const Hyperparameters& hp, const KernelSpec& spec) {
  if (a.rows() == 0 || b.rows() == 0) throw ContractViolation("build_covariance: empty point list");
  if (a.cols() != b.cols() || static_cast<std::size_t>(a.cols()) != hp.length_scales.size()) {
    throw ContractViolation("build_covariance: dimension mismatch");
  }
  const Eigen::MatrixXd sa = scale_inputs(a, hp.length_scales);
  const Eigen::MatrixXd sb = scale_inputs(b, hp.length_scales);
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      k(i, j) = kernel_from_radius(spec, radius_scaled(sa, i, sb, j, spec), hp.signal_variance);
    }
  }
  return k;
}

CholeskyResult cholesky_with_jitter(Eigen::MatrixXd k) {
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() == Eigen::Success) return {llt.matrixL(), 0.0};

  const double mean_diag = k.diagonal().mean();
  if (!(mean_diag > 0.0)) throw NotPositiveDefinite("Cholesky factorisation failed: non-positive diagonal", 0.0);
  double jitter = kJitterStart * mean_diag;
  const double max_jitter = kJitterMax * mean_diag;
  while (jitter <= max_jitter * (1.0 + 1e-9)) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    llt.compute(kj);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
    jitter *= 10.0;
  }
  throw NotPositiveDefinite("Cholesky factorisation failed after jitter escalation", jitter / 10.0);
}

GPModel fit(TrainingSet ts, Hyperparameters hp, KernelSpec spec) {
  CholeskyResult chol = factorise(ts, hp, spec);
  GPModel m;
  m.alpha_ = chol.lower.triangularView<Eigen::Lower>().solve(ts.targets);
  chol.lower.triangularView<Eigen::Lower>().transpose().solveInPlace(m.alpha_);
  m.lower_ = std::move(chol.lower);
  m.jitter_ = chol.jitter;
  m.training_ = std::move(ts);
  m.hp_ = std::move(hp);
  m.spec_ = spec;
  return m;
}

double GPModel::clamp_variance(double variance, double prior) const {
  if (variance >= 0.0) return variance;
  if (variance >= -kVarianceClampRelative * prior) return 0.0;
  throw ConsistencyError("predict: negative predictive variance " + std::to_string(variance) +
                         " beyond round-off tolerance");
}

Prediction GPModel::predict(std::span<const double> x_star) const {
  if (x_star.size() != dim()) throw ContractViolation("predict: dimension mismatch");
  Eigen::MatrixXd xs(1, static_cast<Eigen::Index>(dim()));
  for (std::size_t d = 0; d < dim(); ++d) xs(0, static_cast<Eigen::Index>(d)) = x_star[d];
  Eigen::VectorXd mean(1), var(1);
  predict_batch(xs, mean, var);
  return {mean(0), var(0)};
}

void GPModel::predict_batch(const Eigen::MatrixXd& x_star, Eigen::Ref<Eigen::VectorXd> mean,
                            Eigen::Ref<Eigen::VectorXd> variance) const {
  if (static_cast<std::size_t>(x_star.cols()) != dim()) {
    throw ContractViolation("predict: dimension mismatch");
  }
  if (mean.size() != x_star.rows() || variance.size() != x_star.rows()) {
    throw ContractViolation("predict_batch: output size mismatch");
  }
  const double prior = hp_.signal_variance;
  for (Eigen::Index start = 0; start < x_star.rows(); start += kPredictChunk) {
    const Eigen::Index m = std::min(kPredictChunk, x_star.rows() - start);
    const Eigen::MatrixXd chunk = x_star.middleRows(start, m);
    Eigen::MatrixXd k_cross = build_covariance(training_.inputs, chunk, hp_, spec_);  // N x m
    mean.segment(start, m).noalias() = k_cross.transpose() * alpha_;
    lower_.triangularView<Eigen::Lower>().solveInPlace(k_cross);
    for (Eigen::Index i = 0; i < m; ++i) {
      variance(start + i) = clamp_variance(prior - k_cross.col(i).squaredNorm(), prior);
    }
  }
}

double neg_log_marginal_likelihood(const TrainingSet& ts, const Hyperparameters& hp,
                                   const KernelSpec& spec) {
  const CholeskyResult chol = factorise(ts, hp, spec);
  const Eigen::VectorXd z = chol.lower.triangularView<Eigen::Lower>().solve(ts.targets);
  const double log_det = 2.0 * chol.lower.diagonal().array().log().sum();
  const double n = static_cast<double>(ts.size());
  return 0.5 * z.squaredNorm() + 0.5 * log_det + 0.5 * n * std::log(2.0 * std::numbers::pi);
}

nlohmann::json to_json(const Hyperparameters& hp) {
  return {{"length_scales", hp.length_scales},
          {"signal_variance", hp.signal_variance},
          {"noise_variance", hp.noise_variance}};
}

Hyperparameters hyperparameters_from_json(const nlohmann::json& j) {
  Hyperparameters hp;
  hp.length_scales = j.at("length_scales").get<std::vector<double>>();
  hp.signal_variance = j.at("signal_variance").get<double>();
  hp.noise_variance = j.at("noise_variance").get<double>();
  return hp;
}

nlohmann::json to_json(const GPModel& model) {
  const TrainingSet& ts = model.training_set();
  nlohmann::json inputs = nlohmann::json::array();
  std::vector<double> row;
  for (Eigen::Index i = 0; i < ts.inputs.rows(); ++i) {
    copy_row(ts.inputs.row(i), row);
    inputs.push_back(row);
  }
  std::vector<double> targets(ts.targets.data(), ts.targets.data() + ts.targets.size());
  return {{"kernel", to_string(model.kernel_spec().kind)},
          {"distance", to_string(model.kernel_spec().distance)},
          {"hyperparameters", to_json(model.hyperparameters())},
          {"inputs", inputs},
          {"targets", targets}};
}

GPModel model_from_json(const nlohmann::json& j) {
  KernelSpec spec;
  spec.kind = kernel_from_string(j.at("kernel").get<std::string>());
  spec.distance = distance_from_string(j.at("distance").get<std::string>());
  Hyperparameters hp = hyperparameters_from_json(j.at("hyperparameters"));
  const auto& inputs = j.at("inputs");
  const auto targets = j.at("targets").get<std::vector<double>>();
  if (inputs.size() != targets.size()) throw ContractViolation("model json: inputs/targets length mismatch");
  TrainingSet ts;
  const std::size_t dim = inputs.empty() ? 0 : inputs.front().size();
  ts.inputs.resize(static_cast<Eigen::Index>(inputs.size()), static_cast<Eigen::Index>(dim));
  ts.targets.resize(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto r = inputs[i].get<std::vector<double>>();
    if (r.size() != dim) throw ContractViolation("model json: ragged inputs");
    for (std::size_t d = 0; d < dim; ++d) ts.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = r[d];
    ts.targets(static_cast<Eigen::Index>(i)) = targets[i];
  }
  return fit(std::move(ts), std::move(hp), spec);
}

}  // namespace loel::gp
