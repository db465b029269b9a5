#include "loel/synthetic.hpp"

#include "loel/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <queue>

namespace loel::synthetic {

namespace {

constexpr double kTangentEps = 1e-9;  // mm

double segment_point_distance(Point2 a, Point2 b, Point2 p) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(a, p);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(a + t * ab, p);
}

Point2 on_circle(const Hole& h, double angle) {
  return {h.centre.x + h.radius * std::cos(angle), h.centre.y + h.radius * std::sin(angle)};
}

// Tangent points on hole h seen from external point p (two, possibly coincident).
std::array<Point2, 2> tangent_points(Point2 p, const Hole& h) {
  const Point2 d = p - h.centre;
  const double dist = norm(d);
  const double base = std::atan2(d.y, d.x);
  const double alpha = std::acos(std::min(1.0, h.radius / dist));
  return {on_circle(h, base + alpha), on_circle(h, base - alpha)};
}

struct Bitangent {
  Point2 on_first, on_second;
};

// Outer and inner common tangents of two disjoint circles.
std::vector<Bitangent> bitangents(const Hole& c1, const Hole& c2) {
  std::vector<Bitangent> out;
  const Point2 d = c2.centre - c1.centre;
  const double dist = norm(d);
  const Point2 u = (1.0 / dist) * d;
  const Point2 u_perp{-u.y, u.x};
  for (const double k : {1.0, -1.0}) {
    const double c = (c1.radius - k * c2.radius) / dist;
    if (std::abs(c) > 1.0) continue;
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (const double h : {1.0, -1.0}) {
      const Point2 n = c * u + (h * s) * u_perp;
      out.push_back({c1.centre + c1.radius * n, c2.centre + (k * c2.radius) * n});
    }
  }
  return out;
}

}  // namespace

PathSolver::PathSolver(PlateGeometry geometry) : geometry_(std::move(geometry)) {
  geometry_.validate();
  const auto& holes = geometry_.holes;
  for (std::size_t i = 0; i < holes.size(); ++i) {
    for (std::size_t j = i + 1; j < holes.size(); ++j) {
      for (const Bitangent& t : bitangents(holes[i], holes[j])) {
        if (!segment_clear(t.on_first, t.on_second)) continue;
        const std::size_t a = static_nodes_.size();
        static_nodes_.push_back({t.on_first, static_cast<int>(i)});
        static_nodes_.push_back({t.on_second, static_cast<int>(j)});
        static_edges_.push_back({a, a + 1, distance(t.on_first, t.on_second)});
      }
    }
  }
}

bool PathSolver::segment_clear(Point2 a, Point2 b) const {
  for (const Hole& h : geometry_.holes) {
    if (segment_point_distance(a, b, h.centre) < h.radius - kTangentEps) return false;
  }
  return true;
}

void PathSolver::check_location(Point2 p) const {
  if (!geometry_.is_valid_location(p)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "travel_time: (%.6g, %.6g) mm is off the plate or inside a hole", p.x, p.y);
    throw InvalidLocation(buf);
  }
}

double PathSolver::path_length(Point2 from, Point2 to) const {
  check_location(from);
  check_location(to);
  if (segment_clear(from, to)) return distance(from, to);

  std::vector<Node> nodes = static_nodes_;
  std::vector<Edge> edges = static_edges_;
  const std::size_t src = nodes.size();
  nodes.push_back({from, -1});
  const std::size_t dst = nodes.size();
  nodes.push_back({to, -1});
  const auto& holes = geometry_.holes;
  for (const std::size_t endpoint : {src, dst}) {
    const Point2 p = nodes[endpoint].p;
    for (std::size_t c = 0; c < holes.size(); ++c) {
      for (const Point2 t : tangent_points(p, holes[c])) {
        if (!segment_clear(p, t)) continue;
        nodes.push_back({t, static_cast<int>(c)});
        edges.push_back({endpoint, nodes.size() - 1, distance(p, t)});
      }
    }
  }

  // Arcs between angularly adjacent nodes on each hole boundary.
  for (std::size_t c = 0; c < holes.size(); ++c) {
    std::vector<std::pair<double, std::size_t>> on_circle;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].circle != static_cast<int>(c)) continue;
      const Point2 d = nodes[i].p - holes[c].centre;
      on_circle.emplace_back(std::atan2(d.y, d.x), i);
    }
    if (on_circle.size() < 2) continue;
    std::sort(on_circle.begin(), on_circle.end());
    for (std::size_t k = 0; k < on_circle.size(); ++k) {
      const auto& [a0, i0] = on_circle[k];
      const auto& [a1, i1] = on_circle[(k + 1) % on_circle.size()];
      double sweep = a1 - a0;
      if (k + 1 == on_circle.size()) sweep += 2.0 * std::numbers::pi;
      edges.push_back({i0, i1, holes[c].radius * sweep});
    }
  }

  std::vector<std::vector<std::pair<std::size_t, double>>> adj(nodes.size());
  for (const Edge& e : edges) {
    adj[e.a].emplace_back(e.b, e.length);
    adj[e.b].emplace_back(e.a, e.length);
  }
  std::vector<double> best(nodes.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  best[src] = 0.0;
  queue.emplace(0.0, src);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > best[u]) continue;
    if (u == dst) return d;
    for (const auto& [v, w] : adj[u]) {
      if (d + w < best[v]) {
        best[v] = d + w;
        queue.emplace(best[v], v);
      }
    }
  }
  throw InvalidLocation("travel_time: no obstacle-free path between the points");
}

double PathSolver::travel_time(Point2 from, Point2 to) const {
  return path_length(from, to) / geometry_.wave_speed;
}

double travel_time(const PlateGeometry& geometry, Point2 from, Point2 to) {
  return PathSolver(geometry).travel_time(from, to);
}

void SyntheticCampaign::validate() const {
  geometry.validate();
  layout.validate(geometry);
  if (!(grid_spacing > 0.0)) throw ContractViolation("campaign: grid spacing must be positive");
  if (!(dtoa_noise_std >= 0.0)) throw ContractViolation("campaign: noise std must be non-negative");
}

std::vector<double> synth_dtoa(const PathSolver& solver, const SensorLayout& layout,
                               const signal::PairIndex& pairs, Point2 source, double noise_std,
                               Rng& rng) {
  std::map<int, double> arrivals;
  std::normal_distribution<double> noise(0.0, noise_std > 0.0 ? noise_std : 1.0);
  for (std::size_t s = 0; s < layout.count(); ++s) {
    double t = solver.travel_time(source, layout.positions[s]);
    if (noise_std > 0.0) t += noise(rng);
    arrivals.emplace(static_cast<int>(s), t);
  }
  return signal::dtoa_from_arrivals(arrivals, pairs);
}

std::vector<Point2> grid_locations(const PlateGeometry& geometry, double spacing) {
  if (!(spacing > 0.0)) throw ContractViolation("grid: spacing must be positive");
  std::vector<Point2> out;
  for (int j = 0;; ++j) {
    const double y = spacing / 2.0 + j * spacing;
    if (y > geometry.height) break;
    for (int i = 0;; ++i) {
      const double x = spacing / 2.0 + i * spacing;
      if (x > geometry.width) break;
      const Point2 p{x, y};
      if (geometry.is_valid_location(p, kBoundaryMargin)) out.push_back(p);
    }
  }
  return out;
}

EventTable synth_events(const SyntheticCampaign& campaign, const std::vector<Point2>& sources,
                        double noise_std, Rng& rng, const std::string& id_prefix) {
  const PathSolver solver(campaign.geometry);
  EventTable table;
  table.pairs = signal::PairIndex::all(static_cast<int>(campaign.layout.count()));
  table.events.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "%s%05zu", id_prefix.c_str(), i);
    table.events.push_back(
        {id, sources[i], synth_dtoa(solver, campaign.layout, table.pairs, sources[i], noise_std, rng)});
  }
  return table;
}

EventTable generate_grid(const SyntheticCampaign& campaign) {
  campaign.validate();
  Rng rng(derive_seed(campaign.seed, {tag_of("training-grid")}));
  return synth_events(campaign, grid_locations(campaign.geometry, campaign.grid_spacing),
                      campaign.dtoa_noise_std, rng, "g");
}

std::vector<Point2> draw_locations(const PlateGeometry& geometry, std::size_t count, Rng& rng) {
  geometry.validate();
  const double m = kBoundaryMargin;
  if (geometry.width <= 2 * m || geometry.height <= 2 * m) {
    throw ContractViolation("draw_locations: plate too small for the boundary margin");
  }
  std::uniform_real_distribution<double> ux(m, geometry.width - m);
  std::uniform_real_distribution<double> uy(m, geometry.height - m);
  std::vector<Point2> out;
  out.reserve(count);
  while (out.size() < count) {
    const Point2 p{ux(rng), uy(rng)};
    if (geometry.is_valid_location(p, m)) out.push_back(p);
  }
  return out;
}

double noise_for_snr(double amplitude, double snr_db) { return amplitude / std::pow(10.0, snr_db / 20.0); }

SyntheticWaveform synth_waveform(const PathSolver& solver, const SensorLayout& layout, Point2 source,
                                 int sensor, double sample_rate, Rng& rng,
                                 const WaveformOptions& options) {
  if (sensor < 0 || static_cast<std::size_t>(sensor) >= layout.count()) {
    throw ContractViolation("synth_waveform: unknown sensor id");
  }
  if (!(sample_rate > 0.0)) throw ContractViolation("synth_waveform: sample rate must be positive");
  const double arrival =
      solver.travel_time(source, layout.positions[static_cast<std::size_t>(sensor)]) + options.pretrigger;
  const auto onset = static_cast<std::size_t>(std::llround(arrival * sample_rate));
  if (onset + 16 > options.length) {
    throw ContractViolation("synth_waveform: record too short for the arrival time");
  }

  SyntheticWaveform out;
  out.onset_index = onset;
  out.waveform.sample_rate = sample_rate;
  out.waveform.sensor_id = sensor;
  out.waveform.samples.assign(options.length, 0.0);
  std::normal_distribution<double> noise(0.0, options.noise_std > 0.0 ? options.noise_std : 1.0);
  const double omega = 2.0 * std::numbers::pi * options.frequency / sample_rate;
  const double decay = options.decay_time * sample_rate;
  for (std::size_t n = 0; n < options.length; ++n) {
    double v = 0.0;
    if (n >= onset) {
      const double k = static_cast<double>(n - onset);
      v = options.amplitude * std::exp(-k / decay) * std::cos(omega * k);
    }
    if (options.noise_std > 0.0) v += noise(rng);
    out.waveform.samples[n] = v;
  }
  return out;
}

}  // namespace loel::synthetic
