#include "loel/signal.hpp"

#include "loel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace loel::signal {

namespace {
constexpr double kVarianceFloor = 1e-30;
}

void Waveform::validate() const {
  if (!(sample_rate > 0.0)) throw ContractViolation("waveform: sample rate must be positive");
  if (samples.size() < 16) throw ContractViolation("waveform: at least 16 samples required");
}

PairIndex::PairIndex(std::vector<SensorPair> pairs) : pairs_(std::move(pairs)) {
  std::set<SensorPair> seen;
  for (const auto& p : pairs_) {
    if (p.first == p.second) throw ContractViolation("pair index: a sensor cannot pair with itself");
    if (!seen.insert(p).second) throw ContractViolation("pair index: duplicate pair " + pair_label(p));
  }
}

PairIndex PairIndex::all(int sensor_count) {
  std::vector<int> ids(static_cast<std::size_t>(std::max(sensor_count, 0)));
  for (int i = 0; i < sensor_count; ++i) ids[static_cast<std::size_t>(i)] = i;
  return all(std::move(ids));
}

PairIndex PairIndex::all(std::vector<int> sensor_ids) {
  std::sort(sensor_ids.begin(), sensor_ids.end());
  sensor_ids.erase(std::unique(sensor_ids.begin(), sensor_ids.end()), sensor_ids.end());
  std::vector<SensorPair> pairs;
  for (std::size_t i = 0; i < sensor_ids.size(); ++i) {
    for (std::size_t j = i + 1; j < sensor_ids.size(); ++j) pairs.emplace_back(sensor_ids[i], sensor_ids[j]);
  }
  return PairIndex(std::move(pairs));
}

std::size_t PairIndex::find(int a, int b) const {
  const auto it = std::find(pairs_.begin(), pairs_.end(), SensorPair{a, b});
  return static_cast<std::size_t>(it - pairs_.begin());
}

std::vector<int> PairIndex::sensor_ids() const {
  std::set<int> ids;
  for (const auto& [a, b] : pairs_) {
    ids.insert(a);
    ids.insert(b);
  }
  return {ids.begin(), ids.end()};
}

PairIndex PairIndex::reversed() const {
  std::vector<SensorPair> out;
  out.reserve(pairs_.size());
  for (const auto& [a, b] : pairs_) out.emplace_back(b, a);
  return PairIndex(std::move(out));
}

std::string pair_label(const SensorPair& p) {
  return std::to_string(p.first) + "_" + std::to_string(p.second);
}

std::vector<double> aic_curve(const Waveform& w) {
  w.validate();
  const std::size_t n = w.samples.size();
  // Shift by the record mean so the running sums stay well conditioned.
  long double shift = 0.0L;
  for (const double s : w.samples) shift += s;
  shift /= static_cast<long double>(n);

  std::vector<long double> sum(n + 1, 0.0L), sum_sq(n + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    const long double v = static_cast<long double>(w.samples[i]) - shift;
    sum[i + 1] = sum[i] + v;
    sum_sq[i + 1] = sum_sq[i] + v * v;
  }
  if (sum_sq[n] - sum[n] * sum[n] / static_cast<long double>(n) <= 0.0L) {
    throw DegenerateSignal("aic: signal is constant");
  }

  auto variance = [&](std::size_t lo, std::size_t hi) {
    const auto count = static_cast<long double>(hi - lo);
    const long double s = sum[hi] - sum[lo];
    const long double ss = sum_sq[hi] - sum_sq[lo];
    const long double var = ss / count - (s / count) * (s / count);
    return std::max(static_cast<double>(var), kVarianceFloor);
  };

  std::vector<double> curve(n, std::numeric_limits<double>::infinity());
  for (std::size_t k = 2; k + 3 <= n; ++k) {
    const double left = static_cast<double>(k) * std::log(variance(0, k));
    const double right = static_cast<double>(n - k - 1) * std::log(variance(k, n));
    curve[k] = left + right;
  }
  return curve;
}

OnsetEstimate pick_onset(const Waveform& w) {
  OnsetEstimate est;
  est.aic_curve = aic_curve(w);
  const auto it = std::min_element(est.aic_curve.begin(), est.aic_curve.end());
  est.onset_index = static_cast<std::size_t>(it - est.aic_curve.begin());
  est.onset_time = static_cast<double>(est.onset_index) / w.sample_rate;
  return est;
}

std::vector<double> dtoa_from_arrivals(const std::map<int, double>& arrivals, const PairIndex& pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    const auto ia = arrivals.find(a);
    const auto ib = arrivals.find(b);
    if (ia == arrivals.end() || ib == arrivals.end()) {
      throw IncompleteEvent("dtoa: no onset for sensor " + std::to_string(ia == arrivals.end() ? a : b));
    }
    out.push_back(ia->second - ib->second);
  }
  return out;
}

std::vector<double> dtoa_vector(const std::map<int, OnsetEstimate>& onsets, const PairIndex& pairs) {
  std::map<int, double> arrivals;
  for (const auto& [id, est] : onsets) arrivals.emplace(id, est.onset_time);
  return dtoa_from_arrivals(arrivals, pairs);
}

}  // namespace loel::signal
