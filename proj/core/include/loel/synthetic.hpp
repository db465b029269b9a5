#pragma once

#include "loel/events.hpp"
#include "loel/geometry.hpp"
#include "loel/random.hpp"
#include "loel/signal.hpp"

#include <cstdint>
#include <vector>

namespace loel::synthetic {

// Shortest obstacle-avoiding paths on a plate with circular holes. Builds a
// visibility graph over circle tangent points and walks hole boundaries along
// arcs, so lengths are exact for circular obstacles. Thread-safe after construction.
class PathSolver {
 public:
  explicit PathSolver(PlateGeometry geometry);

  const PlateGeometry& geometry() const { return geometry_; }

  // Geodesic length in mm. Throws InvalidLocation for points off the plate or
  // inside a hole.
  double path_length(Point2 from, Point2 to) const;

  // Geodesic length / wave speed, in seconds.
  double travel_time(Point2 from, Point2 to) const;

 private:
  struct Node {
    Point2 p;
    int circle;  // -1 for free endpoints
  };
  struct Edge {
    std::size_t a, b;
    double length;
  };
  bool segment_clear(Point2 a, Point2 b) const;
  void check_location(Point2 p) const;

  PlateGeometry geometry_;
  std::vector<Node> static_nodes_;  // bitangent points between holes
  std::vector<Edge> static_edges_;  // bitangent segments free of other holes
};

double travel_time(const PlateGeometry& geometry, Point2 from, Point2 to);

struct SyntheticCampaign {
  PlateGeometry geometry = default_geometry();
  SensorLayout layout = default_layout();
  double grid_spacing = 10.0;     // mm
  double dtoa_noise_std = 2e-7;   // s, on each arrival
  std::uint64_t seed = 1;

  void validate() const;
};

// Clearance kept from plate edges and hole boundaries by grids and test draws.
inline constexpr double kBoundaryMargin = 1.0;  // mm

// Arrival at sensor s is travel_time(source, s) + eps_s with eps_s ~ N(0, noise_std^2),
// so the pair entry (a, b) is arrival(a) - arrival(b).
std::vector<double> synth_dtoa(const PathSolver& solver, const SensorLayout& layout,
                               const signal::PairIndex& pairs, Point2 source, double noise_std,
                               Rng& rng);

// Training grid at (spacing/2 + i*spacing, spacing/2 + j*spacing), rows of
// increasing y. Points within 1 mm of a plate edge or hole boundary are dropped.
std::vector<Point2> grid_locations(const PlateGeometry& geometry, double spacing);

// Grid locations paired with synthetic dTOA vectors; noise drawn in point order.
EventTable generate_grid(const SyntheticCampaign& campaign);

// Uniform draws over the valid plate area (1 mm clearance), by rejection.
std::vector<Point2> draw_locations(const PlateGeometry& geometry, std::size_t count, Rng& rng);

EventTable synth_events(const SyntheticCampaign& campaign, const std::vector<Point2>& sources,
                        double noise_std, Rng& rng, const std::string& id_prefix = "e");

struct WaveformOptions {
  std::size_t length = 2048;        // samples
  double amplitude = 1.0;           // peak of the burst envelope
  double noise_std = 0.0;           // additive Gaussian noise
  double frequency = 300e3;         // Hz, burst carrier
  double decay_time = 1e-3;         // s, exponential envelope
  double pretrigger = 0.0;          // s added to every arrival
};

// Noise std for a given peak-amplitude SNR in dB.
double noise_for_snr(double amplitude, double snr_db);

struct SyntheticWaveform {
  signal::Waveform waveform;
  std::size_t onset_index = 0;  // ground truth
};

// Gaussian noise plus a decaying cosine burst whose first sample is at the true onset.
SyntheticWaveform synth_waveform(const PathSolver& solver, const SensorLayout& layout, Point2 source,
                                 int sensor, double sample_rate, Rng& rng,
                                 const WaveformOptions& options = {});

}  // namespace loel::synthetic
