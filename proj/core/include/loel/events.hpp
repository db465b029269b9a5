#pragma once

#include "loel/geometry.hpp"
#include "loel/signal.hpp"

#include <optional>
#include <string>
#include <vector>

namespace loel {

// One emission: optional known origin plus its dTOA vector in PairIndex order.
struct AEEvent {
  std::string id;
  std::optional<Point2> origin;
  std::vector<double> dtoa;  // s
};

struct EventTable {
  signal::PairIndex pairs;
  std::vector<AEEvent> events;
};

}  // namespace loel
