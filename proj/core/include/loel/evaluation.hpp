#pragma once

#include "loel/config.hpp"
#include "loel/events.hpp"
#include "loel/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace loel::eval {

// sqrt(mean squared Euclidean error), mm.
double rmse(const std::vector<Point2>& predictions, const std::vector<Point2>& truths);

enum class Method {
  Loel,
  DeltaT,
  DirectGP,  // single model per coordinate on the full dTOA vector
  Truth,     // returns the true origin; harness self-check
};

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

struct EvaluationRow {
  Method method = Method::Loel;
  double grid_spacing = 0.0;  // training spacing, mm
  double rmse_mean = 0.0;     // mm, over test sets
  double rmse_std = 0.0;      // sample standard deviation over test sets
  std::size_t test_sets = 0;
  std::size_t events_per_set = 0;
  std::size_t training_points = 0;
  double wall_seconds = 0.0;
  std::string status = "ok";
  std::vector<double> set_rmse;
};

struct EvaluationReport {
  std::vector<EvaluationRow> rows;  // spacing-major, methods in configured order
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

// Test set k is drawn from a stream derived from (campaign.seed, k) and is
// shared by every spacing and method.
EventTable test_set(const AppConfig& config, std::size_t set_index, std::size_t events);

// One sweep cell: regenerate the training grid at `spacing`, train `method`,
// localise every test set. Errors are caught and reported through `status`.
EvaluationRow evaluate_cell(const AppConfig& config, double spacing, Method method);

// Cells run in parallel over at most sweep.workers threads.
EvaluationReport run_sweep(const AppConfig& config);

// `method,grid_spacing_mm,rmse_mm,rmse_std_mm,test_sets,events_per_set,
// training_points,config_hash,seed,status[,wall_seconds]`. Wall-clock time is
// opt-in so that the default output is reproducible byte for byte.
void write_report_csv(std::ostream& out, const EvaluationReport& report, bool timings = false);

}  // namespace loel::eval
