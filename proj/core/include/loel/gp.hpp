#pragma once

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace loel::gp {

// How per-dimension differences combine into the Matérn radius r.
//   L1Scaled: r = sum_d |a_d - b_d| / l_d
//   L2Scaled: r = sqrt(sum_d ((a_d - b_d) / l_d)^2)   (default)
// The Matérn 3/2 profile of the L1 radius is not positive definite in two or
// more dimensions; on dense grids fit() then fails with NotPositiveDefinite.
enum class Distance { L1Scaled, L2Scaled };

enum class KernelKind { Matern32, Rbf };

std::string_view to_string(Distance d);
std::string_view to_string(KernelKind k);
Distance distance_from_string(std::string_view s);
KernelKind kernel_from_string(std::string_view s);

struct KernelSpec {
  KernelKind kind = KernelKind::Matern32;
  Distance distance = Distance::L2Scaled;  // ignored by Rbf
};

struct Hyperparameters {
  std::vector<double> length_scales;  // one per input dimension
  double signal_variance = 1.0;       // sigma_f^2
  double noise_variance = 0.0;        // sigma_n^2

  // Throws ContractViolation unless lengths > 0, sigma_f^2 > 0, sigma_n^2 >= 0
  // and length_scales.size() == dim.
  void validate(std::size_t dim) const;
};

// Row i of `inputs` is training coordinate x_i.
struct TrainingSet {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;

  std::size_t size() const { return static_cast<std::size_t>(targets.size()); }
  std::size_t dim() const { return static_cast<std::size_t>(inputs.cols()); }
  void validate() const;
};

double scaled_distance(std::span<const double> a, std::span<const double> b,
                       std::span<const double> length_scales, Distance distance);

// sigma_f^2 (1 + sqrt(3) r) exp(-sqrt(3) r)
double matern32(std::span<const double> a, std::span<const double> b, const Hyperparameters& hp,
                Distance distance = Distance::L2Scaled);

// sigma_f^2 exp(-r^2 / 2) with r the scaled Euclidean distance.
double rbf(std::span<const double> a, std::span<const double> b, const Hyperparameters& hp);

double kernel(const KernelSpec& spec, std::span<const double> a, std::span<const double> b,
              const Hyperparameters& hp);

// K(A, B), element (i, j) = k(A_i, B_j). Noise is not added.
Eigen::MatrixXd build_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 const Hyperparameters& hp, const KernelSpec& spec = {});

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;  // latent posterior variance, excludes sigma_n^2
};

// Lower Cholesky factor of K + sigma_n^2 I, escalating diagonal jitter from
// 1e-12 to 1e-6 times the mean diagonal on failure.
struct CholeskyResult {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
};
CholeskyResult cholesky_with_jitter(Eigen::MatrixXd k);

// A fitted, immutable GP. Safe to share across threads.
class GPModel {
 public:
  const TrainingSet& training_set() const { return training_; }
  const Hyperparameters& hyperparameters() const { return hp_; }
  const KernelSpec& kernel_spec() const { return spec_; }
  const Eigen::MatrixXd& cholesky_factor() const { return lower_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double jitter() const { return jitter_; }
  std::size_t dim() const { return training_.dim(); }

  Prediction predict(std::span<const double> x_star) const;

  // Batched prediction at the rows of x_star. Writes latent mean and variance.
  void predict_batch(const Eigen::MatrixXd& x_star, Eigen::Ref<Eigen::VectorXd> mean,
                     Eigen::Ref<Eigen::VectorXd> variance) const;

  friend GPModel fit(TrainingSet ts, Hyperparameters hp, KernelSpec spec);

 private:
  GPModel() = default;
  double clamp_variance(double variance, double prior) const;

  TrainingSet training_;
  Hyperparameters hp_;
  KernelSpec spec_;
  Eigen::MatrixXd lower_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
};

GPModel fit(TrainingSet ts, Hyperparameters hp, KernelSpec spec = {});

// 0.5 y^T (K + sigma_n^2 I)^-1 y + 0.5 log|K + sigma_n^2 I| + (N/2) log(2 pi)
double neg_log_marginal_likelihood(const TrainingSet& ts, const Hyperparameters& hp,
                                   const KernelSpec& spec = {});

// JSON form: hyperparameters, kernel, distance, inputs, targets. The factor is
// recomputed on load.
nlohmann::json to_json(const GPModel& model);
GPModel model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Hyperparameters& hp);
Hyperparameters hyperparameters_from_json(const nlohmann::json& j);

}  // namespace loel::gp
