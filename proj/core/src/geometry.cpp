#include "loel/geometry.hpp"

#include "loel/errors.hpp"

#include <string>

namespace loel {

void PlateGeometry::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) throw ContractViolation("geometry: plate dimensions must be positive");
  if (!(wave_speed > 0.0)) throw ContractViolation("geometry: wave speed must be positive");
  for (std::size_t i = 0; i < holes.size(); ++i) {
    const Hole& h = holes[i];
    if (!(h.radius > 0.0)) throw ContractViolation("geometry: hole radius must be positive");
    if (h.centre.x - h.radius < 0.0 || h.centre.x + h.radius > width || h.centre.y - h.radius < 0.0 ||
        h.centre.y + h.radius > height) {
      throw ContractViolation("geometry: hole " + std::to_string(i) + " extends outside the plate");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (distance(h.centre, holes[j].centre) <= h.radius + holes[j].radius) {
        throw ContractViolation("geometry: holes " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
      }
    }
  }
}

bool PlateGeometry::inside_plate(Point2 p, double margin) const {
  return p.x >= margin && p.x <= width - margin && p.y >= margin && p.y <= height - margin;
}

bool PlateGeometry::inside_hole(Point2 p, double margin) const {
  for (const Hole& h : holes) {
    if (distance(p, h.centre) < h.radius + margin) return true;
  }
  return false;
}

bool PlateGeometry::is_valid_location(Point2 p, double margin) const {
  return inside_plate(p, margin) && !inside_hole(p, margin);
}

void SensorLayout::validate(const PlateGeometry& geometry) const {
  if (positions.size() < 3) throw ContractViolation("layout: at least three sensors are required");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!geometry.is_valid_location(positions[i])) {
      throw ContractViolation("layout: sensor " + std::to_string(i) + " is outside the plate or inside a hole");
    }
  }
}

PlateGeometry default_geometry() {
  PlateGeometry g;
  g.holes = {
      {{62.0, 95.0}, 15.0},
      {{138.0, 135.0}, 25.0},
      {{60.0, 225.0}, 20.0},
      {{145.0, 262.0}, 12.0},
      {{88.0, 305.0}, 10.0},
  };
  return g;
}

SensorLayout default_layout() {
  return {{
      {20.0, 20.0},
      {100.0, 15.0},
      {180.0, 20.0},
      {185.0, 185.0},
      {180.0, 350.0},
      {100.0, 355.0},
      {20.0, 350.0},
      {15.0, 185.0},
  }};
}

}  // namespace loel
