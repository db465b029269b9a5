#pragma once

#include "loel/geometry.hpp"

#include <array>
#include <optional>
#include <vector>

namespace loel::baselines {

using Triangle = std::array<std::size_t, 3>;  // counter-clockwise vertex indices

// Bowyer-Watson Delaunay triangulation. Throws TriangulationError for fewer
// than three points or an all-collinear set.
std::vector<Triangle> delaunay(const std::vector<Point2>& points);

struct Barycentric {
  std::size_t triangle;
  std::array<double, 3> weights;
};

// Point location over a fixed triangulation via a uniform bucket grid.
class TriangleLocator {
 public:
  TriangleLocator(std::vector<Point2> points, std::vector<Triangle> triangles);

  // Containing triangle with barycentric weights; nullopt outside the hull.
  std::optional<Barycentric> locate(Point2 p) const;

 private:
  std::size_t bucket_of(double x, double y, std::size_t& ix, std::size_t& iy) const;

  std::vector<Point2> points_;
  std::vector<Triangle> triangles_;
  Point2 lo_, hi_;
  std::size_t nx_ = 1, ny_ = 1;
  double cell_x_ = 1.0, cell_y_ = 1.0;
  std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace loel::baselines
