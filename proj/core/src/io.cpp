#include "loel/io.hpp"

#include "loel/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace loel::io {

namespace {

using nlohmann::json;

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), 0, "cannot open file for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string(), 0, "cannot open file for writing");
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t\r");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) return true;
  }
  return false;
}

double parse_real(const std::string& field, const std::string& source, std::size_t line, const char* what) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw DataError(source, line, std::string("invalid ") + what + " '" + field + "'");
  }
  return v;
}

long parse_int(const std::string& field, const std::string& source, std::size_t line, const char* what) {
  long v = 0;
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), last, v);
  if (ec != std::errc() || ptr != last) {
    throw DataError(source, line, std::string("invalid ") + what + " '" + field + "'");
  }
  return v;
}

signal::SensorPair parse_pair_column(const std::string& name, const std::string& prefix, const std::string& source,
                                     std::size_t line) {
  if (name.rfind(prefix, 0) != 0) throw DataError(source, line, "unexpected column '" + name + "'");
  const std::string rest = name.substr(prefix.size());
  const auto us = rest.find('_');
  if (us == std::string::npos) throw DataError(source, line, "malformed pair column '" + name + "'");
  const long a = parse_int(rest.substr(0, us), source, line, "sensor id");
  const long b = parse_int(rest.substr(us + 1), source, line, "sensor id");
  return {static_cast<int>(a), static_cast<int>(b)};
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_seconds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(path.string(), line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

EventTable read_event_table(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw DataError(source, 1, "missing header");
  const std::vector<std::string> header = split(line);
  if (header.size() < 4 || header[0] != "event_id" || header[1] != "x_mm" || header[2] != "y_mm") {
    throw DataError(source, line_no, "header must start with event_id,x_mm,y_mm followed by dtoa columns");
  }
  std::vector<signal::SensorPair> pairs;
  for (std::size_t c = 3; c < header.size(); ++c) pairs.push_back(parse_pair_column(header[c], "dtoa_", source, line_no));

  EventTable table;
  try {
    table.pairs = signal::PairIndex(std::move(pairs));
  } catch (const ContractViolation& e) {
    throw DataError(source, line_no, e.what());
  }

  while (next_line(in, line, line_no)) {
    const std::vector<std::string> f = split(line);
    if (f.size() != header.size()) {
      throw DataError(source, line_no,
                      "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()));
    }
    AEEvent e;
    e.id = f[0];
    if (e.id.empty()) throw DataError(source, line_no, "empty event_id");
    if (f[1].empty() != f[2].empty()) throw DataError(source, line_no, "x_mm and y_mm must both be given or both blank");
    if (!f[1].empty()) e.origin = Point2{parse_real(f[1], source, line_no, "x_mm"), parse_real(f[2], source, line_no, "y_mm")};
    e.dtoa.reserve(f.size() - 3);
    for (std::size_t c = 3; c < f.size(); ++c) e.dtoa.push_back(parse_real(f[c], source, line_no, "dtoa"));
    table.events.push_back(std::move(e));
  }
  return table;
}

EventTable read_event_table(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return read_event_table(in, path.string());
}

void write_event_table(std::ostream& out, const EventTable& table) {
  out << "event_id,x_mm,y_mm";
  for (const auto& p : table.pairs) out << ",dtoa_" << signal::pair_label(p);
  out << '\n';
  for (const AEEvent& e : table.events) {
    if (e.dtoa.size() != table.pairs.size()) throw ContractViolation("event '" + e.id + "' has the wrong dTOA length");
    out << e.id << ',';
    if (e.origin) out << format_real(e.origin->x) << ',' << format_real(e.origin->y);
    else out << ',';
    for (const double d : e.dtoa) out << ',' << format_seconds(d);
    out << '\n';
  }
}

void write_event_table(const std::filesystem::path& path, const EventTable& table) {
  std::ofstream out = open_out(path);
  write_event_table(out, table);
}

signal::Waveform read_waveform(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw DataError(source, 1, "missing header");
  const auto header = split(line);
  if (header.size() != 2 || header[0] != "sensor_id" || header[1] != "sample_rate_hz") {
    throw DataError(source, line_no, "header must be sensor_id,sample_rate_hz");
  }
  if (!next_line(in, line, line_no)) throw DataError(source, line_no + 1, "missing sensor_id,sample_rate_hz values");
  const auto meta = split(line);
  if (meta.size() != 2) throw DataError(source, line_no, "expected sensor_id,sample_rate_hz values");
  signal::Waveform w;
  w.sensor_id = static_cast<int>(parse_int(meta[0], source, line_no, "sensor_id"));
  w.sample_rate = parse_real(meta[1], source, line_no, "sample_rate_hz");
  while (next_line(in, line, line_no)) {
    const auto f = split(line);
    if (f.size() != 1) throw DataError(source, line_no, "expected one sample per line");
    w.samples.push_back(parse_real(f[0], source, line_no, "sample"));
  }
  try {
    w.validate();
  } catch (const ContractViolation& e) {
    throw DataError(source, line_no, e.what());
  }
  return w;
}

signal::Waveform read_waveform(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return read_waveform(in, path.string());
}

void write_waveform(std::ostream& out, const signal::Waveform& w) {
  out << "sensor_id,sample_rate_hz\n" << w.sensor_id << ',' << format_real(w.sample_rate) << '\n';
  for (const double s : w.samples) out << format_real(s) << '\n';
}

void write_waveform(const std::filesystem::path& path, const signal::Waveform& w) {
  std::ofstream out = open_out(path);
  write_waveform(out, w);
}

void write_map_csv(std::ostream& out, const locate::LikelihoodMap& map, const signal::PairIndex& pairs) {
  const auto n = map.grid.points.size();
  if (static_cast<std::size_t>(map.per_pair_loglik.rows()) != pairs.size() ||
      static_cast<std::size_t>(map.per_pair_loglik.cols()) != n || static_cast<std::size_t>(map.marginal.size()) != n) {
    throw ContractViolation("map export: map and pair index disagree");
  }
  out << "x_mm,y_mm,log_marginal";
  for (const auto& p : pairs) out << ",log_pair_" << signal::pair_label(p);
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    out << format_real(map.grid.points[i].x) << ',' << format_real(map.grid.points[i].y) << ','
        << format_real(map.marginal(c));
    for (Eigen::Index j = 0; j < map.per_pair_loglik.rows(); ++j) out << ',' << format_real(map.per_pair_loglik(j, c));
    out << '\n';
  }
}

void write_map_pgm(std::ostream& out, const locate::LikelihoodMap& map) {
  const auto& pts = map.grid.points;
  if (pts.empty()) throw ContractViolation("map export: empty grid");
  const double s = map.grid.spacing;
  long min_ix = 0, max_ix = 0, min_iy = 0, max_iy = 0;
  std::vector<std::pair<long, long>> cells(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cells[i] = {std::lround(pts[i].x / s), std::lround(pts[i].y / s)};
    if (i == 0) {
      min_ix = max_ix = cells[i].first;
      min_iy = max_iy = cells[i].second;
    }
    min_ix = std::min(min_ix, cells[i].first);
    max_ix = std::max(max_ix, cells[i].first);
    min_iy = std::min(min_iy, cells[i].second);
    max_iy = std::max(max_iy, cells[i].second);
  }
  const auto w = static_cast<std::size_t>(max_ix - min_ix + 1);
  const auto h = static_cast<std::size_t>(max_iy - min_iy + 1);
  std::vector<unsigned char> raster(w * h, 0);
  const double peak = map.marginal.maxCoeff();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = std::isfinite(peak) ? std::exp(map.marginal(static_cast<Eigen::Index>(i)) - peak) : 0.0;
    const auto col = static_cast<std::size_t>(cells[i].first - min_ix);
    const auto row = static_cast<std::size_t>(max_iy - cells[i].second);
    raster[row * w + col] = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  }
  out << "P5\n" << w << ' ' << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
}

json to_json(const PredictionRecord& p) {
  return {{"event_id", p.event_id}, {"x_mm", p.location.x}, {"y_mm", p.location.y}, {"log_likelihood", p.log_likelihood}};
}

void write_prediction_line(std::ostream& out, const PredictionRecord& p) {
  nlohmann::ordered_json j;
  j["event_id"] = p.event_id;
  j["x_mm"] = p.location.x;
  j["y_mm"] = p.location.y;
  if (std::isfinite(p.log_likelihood)) j["log_likelihood"] = p.log_likelihood;
  else j["log_likelihood"] = nullptr;
  out << j.dump() << '\n';
}

std::vector<PredictionRecord> read_predictions(std::istream& in, const std::string& source) {
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line, line_no)) {
    try {
      const json j = json::parse(line);
      PredictionRecord p;
      p.event_id = j.at("event_id").get<std::string>();
      p.location = {j.at("x_mm").get<double>(), j.at("y_mm").get<double>()};
      const json& ll = j.at("log_likelihood");
      p.log_likelihood = ll.is_null() ? -std::numeric_limits<double>::infinity() : ll.get<double>();
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw DataError(source, line_no, e.what());
    }
  }
  return out;
}

}  // namespace loel::io
