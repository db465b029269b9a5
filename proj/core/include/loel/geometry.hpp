#pragma once

#include <cmath>
#include <vector>

namespace loel {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2, Point2) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

struct Hole {
  Point2 centre;
  double radius = 0.0;  // mm
};

// Rectangular plate [0, width] x [0, height] with circular through-holes.
struct PlateGeometry {
  double width = 200.0;      // mm
  double height = 370.0;     // mm
  std::vector<Hole> holes;
  double wave_speed = 5.4e6;  // mm/s

  // Throws ContractViolation unless dimensions and speed are positive, every
  // hole lies inside the plate and no two holes overlap.
  void validate() const;

  bool inside_plate(Point2 p, double margin = 0.0) const;
  // True when p is strictly inside a hole enlarged by `margin`.
  bool inside_hole(Point2 p, double margin = 0.0) const;
  // Inside the plate and outside every hole, both with the given clearance.
  bool is_valid_location(Point2 p, double margin = 0.0) const;
};

struct SensorLayout {
  std::vector<Point2> positions;  // sensor id == index

  std::size_t count() const { return positions.size(); }
  // Sensors inside the plate, outside holes, and at least three of them.
  void validate(const PlateGeometry& geometry) const;
};

// 200 x 370 mm plate with five off-centre holes of radius 10 to 30 mm.
PlateGeometry default_geometry();
// Sensors near the four corners and the four edge midpoints.
SensorLayout default_layout();

}  // namespace loel
