#pragma once

#include "loel/events.hpp"
#include "loel/geometry.hpp"
#include "loel/locate.hpp"
#include "loel/signal.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace loel::io {

// Fixed field formatting: 9 significant digits, scientific for seconds.
std::string format_real(double v);
std::string format_seconds(double v);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// Event table: header `event_id,x_mm,y_mm,dtoa_<a>_<b>,...`. The pair order is
// taken from the header. Blank x_mm/y_mm marks an unlabelled event. dTOA for
// pair (a, b) is onset(a) - onset(b).
EventTable read_event_table(std::istream& in, const std::string& source = "event table");
EventTable read_event_table(const std::filesystem::path& path);
void write_event_table(std::ostream& out, const EventTable& table);
void write_event_table(const std::filesystem::path& path, const EventTable& table);

// Waveform file: line 1 `sensor_id,sample_rate_hz`, line 2 their values, then
// one sample per line.
signal::Waveform read_waveform(std::istream& in, const std::string& source = "waveform");
signal::Waveform read_waveform(const std::filesystem::path& path);
void write_waveform(std::ostream& out, const signal::Waveform& w);
void write_waveform(const std::filesystem::path& path, const signal::Waveform& w);

// Map export: `x_mm,y_mm,log_marginal,log_pair_<a>_<b>,...`, one row per grid point.
void write_map_csv(std::ostream& out, const locate::LikelihoodMap& map, const signal::PairIndex& pairs);

// Binary 8-bit PGM of exp(marginal - max), top row = largest y. Cells without
// a candidate point are 0.
void write_map_pgm(std::ostream& out, const locate::LikelihoodMap& map);

struct PredictionRecord {
  std::string event_id;
  Point2 location;
  double log_likelihood = 0.0;
};

// One JSON object per line: {"event_id", "x_mm", "y_mm", "log_likelihood"}.
nlohmann::json to_json(const PredictionRecord& p);
void write_prediction_line(std::ostream& out, const PredictionRecord& p);
std::vector<PredictionRecord> read_predictions(std::istream& in, const std::string& source = "predictions");

}  // namespace loel::io
