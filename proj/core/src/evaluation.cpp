#include "loel/evaluation.hpp"

#include "loel/baselines.hpp"
#include "loel/errors.hpp"
#include "loel/io.hpp"
#include "loel/locate.hpp"
#include "loel/parallel.hpp"
#include "loel/random.hpp"
#include "loel/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>

namespace loel::eval {

double rmse(const std::vector<Point2>& predictions, const std::vector<Point2>& truths) {
  if (predictions.size() != truths.size()) throw ContractViolation("rmse: predictions and truths differ in length");
  if (predictions.empty()) throw ContractViolation("rmse: at least one event required");
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Point2 d = predictions[i] - truths[i];
    acc += d.x * d.x + d.y * d.y;
  }
  return std::sqrt(acc / static_cast<double>(predictions.size()));
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Loel: return "loel";
    case Method::DeltaT: return "deltat";
    case Method::DirectGP: return "directgp";
    case Method::Truth: return "truth";
  }
  return "?";
}

Method method_from_string(std::string_view s) {
  if (s == "loel") return Method::Loel;
  if (s == "deltat") return Method::DeltaT;
  if (s == "directgp") return Method::DirectGP;
  if (s == "truth") return Method::Truth;
  throw ContractViolation("unknown method '" + std::string(s) + "'");
}

EventTable test_set(const AppConfig& config, std::size_t set_index, std::size_t events) {
  const synthetic::SyntheticCampaign campaign = config.synthetic_campaign();
  Rng rng(derive_seed(config.campaign.seed, {tag_of("test-set"), static_cast<std::uint64_t>(set_index)}));
  const std::vector<Point2> sources = synthetic::draw_locations(campaign.geometry, events, rng);
  char prefix[32];
  std::snprintf(prefix, sizeof prefix, "t%02zu_", set_index);
  return synthetic::synth_events(campaign, sources, campaign.dtoa_noise_std, rng, prefix);
}

namespace {

std::vector<Point2> truths_of(const EventTable& t) {
  std::vector<Point2> out;
  out.reserve(t.events.size());
  for (const AEEvent& e : t.events) out.push_back(*e.origin);
  return out;
}

// Returns a localiser for one trained method.
using Localiser = std::function<Point2(const AEEvent&)>;

Localiser train_method(const AppConfig& config, const EventTable& training, double spacing, Method method,
                       const locate::PredictiveGrid& grid) {
  const std::uint64_t cell_seed = derive_seed(config.qpso.seed, {tag_of(spacing), tag_of(to_string(method))});
  switch (method) {
    case Method::Loel: {
      locate::BankTrainingConfig tc = config.bank_training();
      tc.swarm.seed = cell_seed;
      const locate::ModelBank bank = locate::train_bank(training, tc);
      auto prediction = std::make_shared<locate::GridPrediction>(locate::predict_on_grid(bank, grid, config.gp.variance_mode));
      auto weights = std::make_shared<std::vector<double>>(config.weights(bank.size()));
      return [prediction, weights, &grid](const AEEvent& e) {
        return locate::locate_event(*prediction, grid, e.dtoa, *weights).location;
      };
    }
    case Method::DeltaT: {
      auto table = std::make_shared<baselines::DeltaTGridTable>(baselines::tabulate(baselines::deltaT_fit(training), grid));
      return [table, &grid](const AEEvent& e) { return baselines::deltaT_locate(*table, grid, e.dtoa); };
    }
    case Method::DirectGP: {
      qpso::SwarmConfig swarm = config.swarm();
      swarm.seed = cell_seed;
      qpso::TrainingOptions options;
      options.kernel = {gp::KernelKind::Rbf, gp::Distance::L2Scaled};
      options.bounds = baselines::directgp_default_bounds();
      options.max_points = config.gp.max_training_points;
      auto model = std::make_shared<baselines::DirectGPModel>(baselines::directgp_fit(training, swarm, options));
      return [model](const AEEvent& e) { return baselines::directgp_locate(*model, e.dtoa).location; };
    }
    case Method::Truth:
      return [](const AEEvent& e) { return *e.origin; };
  }
  throw ContractViolation("unknown method");
}

}  // namespace

EvaluationRow evaluate_cell(const AppConfig& config, double spacing, Method method) {
  const auto start = std::chrono::steady_clock::now();
  EvaluationRow row;
  row.method = method;
  row.grid_spacing = spacing;
  row.test_sets = config.sweep.test_sets;
  row.events_per_set = config.sweep.events_per_set;
  try {
    synthetic::SyntheticCampaign campaign = config.synthetic_campaign();
    campaign.grid_spacing = spacing;
    const EventTable training = synthetic::generate_grid(campaign);
    row.training_points = training.events.size();
    const locate::PredictiveGrid grid = locate::make_predictive_grid(config.geometry, config.locate.grid_spacing);
    const Localiser localise = train_method(config, training, spacing, method, grid);
    for (std::size_t k = 0; k < config.sweep.test_sets; ++k) {
      const EventTable tests = test_set(config, k, config.sweep.events_per_set);
      std::vector<Point2> predictions;
      predictions.reserve(tests.events.size());
      for (const AEEvent& e : tests.events) predictions.push_back(localise(e));
      row.set_rmse.push_back(rmse(predictions, truths_of(tests)));
    }
    double mean = 0.0;
    for (const double r : row.set_rmse) mean += r;
    mean /= static_cast<double>(row.set_rmse.size());
    double ss = 0.0;
    for (const double r : row.set_rmse) ss += (r - mean) * (r - mean);
    row.rmse_mean = mean;
    row.rmse_std = row.set_rmse.size() > 1 ? std::sqrt(ss / static_cast<double>(row.set_rmse.size() - 1)) : 0.0;
  } catch (const Error& e) {
    row.status = std::string("failed: ") + e.what();
    row.rmse_mean = row.rmse_std = std::numeric_limits<double>::quiet_NaN();
    row.set_rmse.clear();
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

EvaluationReport run_sweep(const AppConfig& config) {
  config.validate();
  std::vector<Method> methods;
  for (const auto& m : config.sweep.methods) methods.push_back(method_from_string(m));
  const std::size_t cells = config.sweep.spacings.size() * methods.size();
  EvaluationReport report;
  report.config_hash = config_hash(config);
  report.seed = config.campaign.seed;
  report.rows.resize(cells);
  parallel_for(
      cells,
      [&](std::size_t c) {
        report.rows[c] = evaluate_cell(config, config.sweep.spacings[c / methods.size()], methods[c % methods.size()]);
      },
      config.sweep.workers);
  return report;
}

void write_report_csv(std::ostream& out, const EvaluationReport& report, bool timings) {
  out << "method,grid_spacing_mm,rmse_mm,rmse_std_mm,test_sets,events_per_set,training_points,config_hash,seed,status";
  if (timings) out << ",wall_seconds";
  out << '\n';
  const std::string hash = hash_hex(report.config_hash);
  for (const EvaluationRow& r : report.rows) {
    std::string status = r.status;
    for (char& ch : status) {
      if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    }
    out << to_string(r.method) << ',' << io::format_real(r.grid_spacing) << ',' << io::format_real(r.rmse_mean) << ','
        << io::format_real(r.rmse_std) << ',' << r.test_sets << ',' << r.events_per_set << ',' << r.training_points
        << ',' << hash << ',' << report.seed << ',' << status;
    if (timings) out << ',' << io::format_real(r.wall_seconds);
    out << '\n';
  }
}

}  // namespace loel::eval
