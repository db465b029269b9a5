#pragma once

#include "loel/geometry.hpp"
#include "loel/gp.hpp"
#include "loel/locate.hpp"
#include "loel/qpso.hpp"
#include "loel/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace loel {

struct GpSection {
  gp::Distance distance = gp::Distance::L2Scaled;
  locate::VarianceMode variance_mode = locate::VarianceMode::PosteriorPlusNoise;
  std::size_t max_training_points = 200;  // NLML subset during hyperparameter search; 0 = all
  qpso::HyperparameterBounds bounds{};
};

struct QpsoSection {
  int particles = 40;
  int iterations = 300;
  double beta_initial = 1.0;
  double beta_final = 0.5;
  std::uint64_t seed = 1;
};

struct LocateSection {
  double grid_spacing = 1.0;          // mm
  std::vector<double> prior_weights;  // empty = uniform
};

struct SweepSection {
  std::vector<double> spacings{5, 10, 15, 20, 25, 30};
  std::vector<std::string> methods{"loel", "deltat", "directgp"};
  std::size_t test_sets = 10;
  std::size_t events_per_set = 100;
  std::size_t workers = 0;  // 0 = LOEL_WORKERS or hardware concurrency
};

struct CampaignSection {
  double grid_spacing = 10.0;    // mm
  double dtoa_noise_std = 2e-7;  // s
  std::uint64_t seed = 1;
  std::size_t test_events = 100;
};

// Single JSON document with sections geometry, sensors, campaign, gp, qpso,
// locate, sweep. Missing fields take the defaults above.
struct AppConfig {
  PlateGeometry geometry = default_geometry();
  SensorLayout sensors = default_layout();
  CampaignSection campaign{};
  GpSection gp{};
  QpsoSection qpso{};
  LocateSection locate{};
  SweepSection sweep{};

  void validate() const;

  synthetic::SyntheticCampaign synthetic_campaign() const;
  qpso::SwarmConfig swarm() const;
  locate::BankTrainingConfig bank_training() const;
  std::vector<double> weights(std::size_t pairs) const;
};

// Throws DataError naming `source` for malformed or invalid documents.
AppConfig config_from_json(const nlohmann::json& j, const std::string& source = "config");
nlohmann::json to_json(const AppConfig& config);
AppConfig load_config(const std::filesystem::path& path);

// FNV-1a of the canonical JSON of the effective configuration.
std::uint64_t config_hash(const AppConfig& config);
std::string hash_hex(std::uint64_t hash);

}  // namespace loel
