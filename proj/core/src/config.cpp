#include "loel/config.hpp"

#include "loel/errors.hpp"
#include "loel/io.hpp"
#include "loel/random.hpp"

#include <cstdio>

namespace loel {

namespace {

using nlohmann::json;

json point_json(Point2 p) { return {{"x_mm", p.x}, {"y_mm", p.y}}; }

Point2 point_from(const json& j) { return {j.at("x_mm").get<double>(), j.at("y_mm").get<double>()}; }

json range_json(const std::pair<double, double>& r) { return json::array({r.first, r.second}); }

std::pair<double, double> range_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw ContractViolation("bounds entries must be [lower, upper]");
  return {v[0], v[1]};
}

template <typename T>
void read_opt(const json& section, const char* key, T& out) {
  if (section.contains(key)) out = section.at(key).get<T>();
}

}  // namespace

void AppConfig::validate() const {
  geometry.validate();
  sensors.validate(geometry);
  if (!(campaign.grid_spacing > 0.0)) throw ContractViolation("campaign.grid_spacing_mm must be positive");
  if (!(campaign.dtoa_noise_std >= 0.0)) throw ContractViolation("campaign.dtoa_noise_std_s must be non-negative");
  if (!(locate.grid_spacing > 0.0)) throw ContractViolation("locate.grid_spacing_mm must be positive");
  {
    qpso::SwarmConfig s = swarm();
    s.bounds = gp.bounds.log_box(2);
    s.validate();
  }
  for (const double s : sweep.spacings) {
    if (!(s > 0.0)) throw ContractViolation("sweep.spacings_mm must be positive");
  }
  for (const auto& m : sweep.methods) {
    if (m != "loel" && m != "deltat" && m != "directgp" && m != "truth") {
      throw ContractViolation("sweep.methods: unknown method '" + m + "'");
    }
  }
  if (sweep.test_sets == 0 || sweep.events_per_set == 0) {
    throw ContractViolation("sweep: test_sets and events_per_set must be positive");
  }
  if (!locate.prior_weights.empty()) {
    const std::size_t pairs = sensors.count() * (sensors.count() - 1) / 2;
    if (locate.prior_weights.size() != pairs) {
      throw ContractViolation("locate.prior_weights must have one entry per sensor pair");
    }
  }
}

synthetic::SyntheticCampaign AppConfig::synthetic_campaign() const {
  return {geometry, sensors, campaign.grid_spacing, campaign.dtoa_noise_std, campaign.seed};
}

qpso::SwarmConfig AppConfig::swarm() const {
  qpso::SwarmConfig s;
  s.particle_count = qpso.particles;
  s.max_iterations = qpso.iterations;
  s.contraction_expansion_initial = qpso.beta_initial;
  s.contraction_expansion_final = qpso.beta_final;
  s.seed = qpso.seed;
  return s;
}

locate::BankTrainingConfig AppConfig::bank_training() const {
  locate::BankTrainingConfig c;
  c.swarm = swarm();
  c.options.kernel = {gp::KernelKind::Matern32, gp.distance};
  c.options.bounds = gp.bounds;
  c.options.max_points = gp.max_training_points;
  return c;
}

std::vector<double> AppConfig::weights(std::size_t pairs) const {
  if (locate.prior_weights.empty()) return locate::uniform_weights(pairs);
  if (locate.prior_weights.size() != pairs) {
    throw ContractViolation("locate.prior_weights does not match the number of sensor pairs");
  }
  return locate.prior_weights;
}

AppConfig config_from_json(const json& j, const std::string& source) {
  AppConfig c;
  try {
    if (!j.is_object()) throw ContractViolation("top level must be a JSON object");
    if (j.contains("geometry")) {
      const json& g = j.at("geometry");
      read_opt(g, "width_mm", c.geometry.width);
      read_opt(g, "height_mm", c.geometry.height);
      read_opt(g, "wave_speed_mm_per_s", c.geometry.wave_speed);
      if (g.contains("holes")) {
        c.geometry.holes.clear();
        for (const json& h : g.at("holes")) c.geometry.holes.push_back({point_from(h), h.at("radius_mm").get<double>()});
      }
    }
    if (j.contains("sensors")) {
      c.sensors.positions.clear();
      for (const json& s : j.at("sensors")) c.sensors.positions.push_back(point_from(s));
    }
    if (j.contains("campaign")) {
      const json& s = j.at("campaign");
      read_opt(s, "grid_spacing_mm", c.campaign.grid_spacing);
      read_opt(s, "dtoa_noise_std_s", c.campaign.dtoa_noise_std);
      read_opt(s, "seed", c.campaign.seed);
      read_opt(s, "test_events", c.campaign.test_events);
    }
    if (j.contains("gp")) {
      const json& s = j.at("gp");
      if (s.contains("distance")) c.gp.distance = gp::distance_from_string(s.at("distance").get<std::string>());
      if (s.contains("variance_mode")) {
        c.gp.variance_mode = locate::variance_mode_from_string(s.at("variance_mode").get<std::string>());
      }
      read_opt(s, "max_training_points", c.gp.max_training_points);
      if (s.contains("bounds")) {
        const json& b = s.at("bounds");
        if (b.contains("length_scale_mm")) c.gp.bounds.length_scale = range_from(b.at("length_scale_mm"));
        if (b.contains("signal_variance_s2")) c.gp.bounds.signal_variance = range_from(b.at("signal_variance_s2"));
        if (b.contains("noise_variance_s2")) c.gp.bounds.noise_variance = range_from(b.at("noise_variance_s2"));
      }
    }
    if (j.contains("qpso")) {
      const json& s = j.at("qpso");
      read_opt(s, "particles", c.qpso.particles);
      read_opt(s, "iterations", c.qpso.iterations);
      read_opt(s, "beta_initial", c.qpso.beta_initial);
      read_opt(s, "beta_final", c.qpso.beta_final);
      read_opt(s, "seed", c.qpso.seed);
    }
    if (j.contains("locate")) {
      const json& s = j.at("locate");
      read_opt(s, "grid_spacing_mm", c.locate.grid_spacing);
      read_opt(s, "prior_weights", c.locate.prior_weights);
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      read_opt(s, "spacings_mm", c.sweep.spacings);
      read_opt(s, "methods", c.sweep.methods);
      read_opt(s, "test_sets", c.sweep.test_sets);
      read_opt(s, "events_per_set", c.sweep.events_per_set);
      read_opt(s, "workers", c.sweep.workers);
    }
    c.validate();
  } catch (const json::exception& e) {
    throw DataError(source, 0, e.what());
  } catch (const ContractViolation& e) {
    throw DataError(source, 0, e.what());
  }
  return c;
}

json to_json(const AppConfig& c) {
  json holes = json::array();
  for (const Hole& h : c.geometry.holes) {
    holes.push_back({{"x_mm", h.centre.x}, {"y_mm", h.centre.y}, {"radius_mm", h.radius}});
  }
  json sensors = json::array();
  for (const Point2& p : c.sensors.positions) sensors.push_back(point_json(p));
  return {
      {"geometry",
       {{"width_mm", c.geometry.width},
        {"height_mm", c.geometry.height},
        {"wave_speed_mm_per_s", c.geometry.wave_speed},
        {"holes", holes}}},
      {"sensors", sensors},
      {"campaign",
       {{"grid_spacing_mm", c.campaign.grid_spacing},
        {"dtoa_noise_std_s", c.campaign.dtoa_noise_std},
        {"seed", c.campaign.seed},
        {"test_events", c.campaign.test_events}}},
      {"gp",
       {{"distance", gp::to_string(c.gp.distance)},
        {"variance_mode", locate::to_string(c.gp.variance_mode)},
        {"max_training_points", c.gp.max_training_points},
        {"bounds",
         {{"length_scale_mm", range_json(c.gp.bounds.length_scale)},
          {"signal_variance_s2", range_json(c.gp.bounds.signal_variance)},
          {"noise_variance_s2", range_json(c.gp.bounds.noise_variance)}}}}},
      {"qpso",
       {{"particles", c.qpso.particles},
        {"iterations", c.qpso.iterations},
        {"beta_initial", c.qpso.beta_initial},
        {"beta_final", c.qpso.beta_final},
        {"seed", c.qpso.seed}}},
      {"locate", {{"grid_spacing_mm", c.locate.grid_spacing}, {"prior_weights", c.locate.prior_weights}}},
      {"sweep",
       {{"spacings_mm", c.sweep.spacings},
        {"methods", c.sweep.methods},
        {"test_sets", c.sweep.test_sets},
        {"events_per_set", c.sweep.events_per_set},
        {"workers", c.sweep.workers}}},
  };
}

AppConfig load_config(const std::filesystem::path& path) {
  return config_from_json(io::read_json_file(path), path.string());
}

std::uint64_t config_hash(const AppConfig& config) {
  json j = to_json(config);
  j["sweep"].erase("workers");  // scheduling only, never changes results
  return fnv1a64(j.dump());
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace loel
