#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace loel::signal {

struct Waveform {
  std::vector<double> samples;
  double sample_rate = 0.0;  // Hz
  int sensor_id = 0;

  void validate() const;  // sample_rate > 0, at least 16 samples
};

struct OnsetEstimate {
  double onset_time = 0.0;  // s from record start
  std::size_t onset_index = 0;
  std::vector<double> aic_curve;
};

using SensorPair = std::pair<int, int>;

// Ordered sensor pairs. The dTOA entry for (a, b) is onset(a) - onset(b).
class PairIndex {
 public:
  PairIndex() = default;
  // Arbitrary ordered pairs; a != b and no pair listed twice.
  explicit PairIndex(std::vector<SensorPair> pairs);

  // Canonical index over sensor ids 0..S-1: every a < b, lexicographic.
  static PairIndex all(int sensor_count);
  // Canonical index over arbitrary sensor ids (sorted ascending first).
  static PairIndex all(std::vector<int> sensor_ids);

  std::size_t size() const { return pairs_.size(); }
  const SensorPair& operator[](std::size_t j) const { return pairs_[j]; }
  const std::vector<SensorPair>& pairs() const { return pairs_; }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  // Position of (a, b) or size() when absent.
  std::size_t find(int a, int b) const;
  std::vector<int> sensor_ids() const;

  PairIndex reversed() const;  // every pair swapped to (b, a)

  bool operator==(const PairIndex&) const = default;

 private:
  std::vector<SensorPair> pairs_;
};

// Label used in CSV headers: "<a>_<b>".
std::string pair_label(const SensorPair& p);

// Maeda-form AIC over split points k in [2, N-3]:
//   AIC(k) = k log var(x[0, k)) + (N - k - 1) log var(x[k, N))
// Population variances, floored at 1e-30. Entries outside the valid range are +inf.
std::vector<double> aic_curve(const Waveform& w);

// Argmin of the AIC curve; the smallest index wins ties.
OnsetEstimate pick_onset(const Waveform& w);

// Entry j = onset_time(a_j) - onset_time(b_j). Throws IncompleteEvent when a
// pair references a sensor without an onset.
std::vector<double> dtoa_vector(const std::map<int, OnsetEstimate>& onsets, const PairIndex& pairs);

// Same, from bare arrival times keyed by sensor id.
std::vector<double> dtoa_from_arrivals(const std::map<int, double>& arrivals, const PairIndex& pairs);

}  // namespace loel::signal
