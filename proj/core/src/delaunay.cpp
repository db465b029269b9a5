#include "loel/delaunay.hpp"

#include "loel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace loel::baselines {

namespace {

using Real = long double;

struct P {
  Real x, y;
};

Real orient(const P& a, const P& b, const P& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// > 0 when d lies strictly inside the circumcircle of counter-clockwise (a, b, c).
Real incircle(const P& a, const P& b, const P& c, const P& d) {
  const Real adx = a.x - d.x, ady = a.y - d.y;
  const Real bdx = b.x - d.x, bdy = b.y - d.y;
  const Real cdx = c.x - d.x, cdy = c.y - d.y;
  const Real alift = adx * adx + ady * ady;
  const Real blift = bdx * bdx + bdy * bdy;
  const Real clift = cdx * cdx + cdy * cdy;
  return alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) + clift * (adx * bdy - ady * bdx);
}

}  // namespace

std::vector<Triangle> delaunay(const std::vector<Point2>& points) {
  const std::size_t n = points.size();
  if (n < 3) throw TriangulationError("delaunay: at least three points are required");

  double min_x = points[0].x, max_x = points[0].x, min_y = points[0].y, max_y = points[0].y;
  for (const Point2& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  // Integer shift keeps grid-aligned coordinates exact, so cocircular grid
  // points are classified consistently.
  const double cx = std::round(0.5 * (min_x + max_x));
  const double cy = std::round(0.5 * (min_y + max_y));
  const double extent = std::max({max_x - min_x, max_y - min_y, 1.0});
  const Real s = 100.0L * std::ceil(extent);

  std::vector<P> v;
  v.reserve(n + 3);
  for (const Point2& p : points) v.push_back({Real(p.x) - Real(cx), Real(p.y) - Real(cy)});
  v.push_back({-3 * s, -3 * s});
  v.push_back({3 * s, -3 * s});
  v.push_back({0, 3 * s});

  {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(points[a].x, points[a].y) < std::tie(points[b].x, points[b].y);
    });
    for (std::size_t k = 1; k < n; ++k) {
      if (points[order[k]] == points[order[k - 1]]) throw TriangulationError("delaunay: duplicate point");
    }
  }

  std::vector<Triangle> tris{{n, n + 1, n + 2}};
  std::vector<std::pair<std::size_t, std::size_t>> boundary;
  std::vector<char> bad;
  for (std::size_t i = 0; i < n; ++i) {
    bad.assign(tris.size(), 0);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const auto& [a, b, c] = tris[t];
      if (incircle(v[a], v[b], v[c], v[i]) > 0) bad[t] = 1;
    }
    // Cavity boundary: edges of bad triangles that appear exactly once.
    std::map<std::pair<std::size_t, std::size_t>, int> edge_count;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!bad[t]) continue;
      for (int e = 0; e < 3; ++e) {
        const std::size_t a = tris[t][e], b = tris[t][(e + 1) % 3];
        ++edge_count[{std::min(a, b), std::max(a, b)}];
      }
    }
    boundary.clear();
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!bad[t]) continue;
      for (int e = 0; e < 3; ++e) {
        const std::size_t a = tris[t][e], b = tris[t][(e + 1) % 3];
        if (edge_count[{std::min(a, b), std::max(a, b)}] == 1) boundary.emplace_back(a, b);
      }
    }
    std::vector<Triangle> next;
    next.reserve(tris.size() + 2);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!bad[t]) next.push_back(tris[t]);
    }
    for (const auto& [a, b] : boundary) {
      // Directed edges of CCW triangles keep CCW orientation with the new point.
      if (orient(v[a], v[b], v[i]) > 0) next.push_back({a, b, i});
    }
    tris = std::move(next);
  }

  std::vector<Triangle> out;
  for (const Triangle& t : tris) {
    if (t[0] < n && t[1] < n && t[2] < n) out.push_back(t);
  }
  if (out.empty()) throw TriangulationError("delaunay: points are collinear");
  return out;
}

TriangleLocator::TriangleLocator(std::vector<Point2> points_in, std::vector<Triangle> triangles_in)
    : points_(std::move(points_in)), triangles_(std::move(triangles_in)) {
  const auto& points = points_;
  const auto& triangles = triangles_;
  if (points.empty()) throw TriangulationError("locator: no points");
  lo_ = hi_ = points.front();
  for (const Point2& p : points) {
    lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
    hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
  }
  const double w = std::max(hi_.x - lo_.x, 1e-9), h = std::max(hi_.y - lo_.y, 1e-9);
  const double per_side = std::ceil(std::sqrt(static_cast<double>(triangles.size()) / 2.0));
  nx_ = static_cast<std::size_t>(std::max(1.0, per_side * std::sqrt(w / h)));
  ny_ = static_cast<std::size_t>(std::max(1.0, per_side * std::sqrt(h / w)));
  cell_x_ = w / static_cast<double>(nx_);
  cell_y_ = h / static_cast<double>(ny_);
  buckets_.resize(nx_ * ny_);
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    double tx0 = points[triangles[t][0]].x, tx1 = tx0, ty0 = points[triangles[t][0]].y, ty1 = ty0;
    for (const std::size_t k : triangles[t]) {
      tx0 = std::min(tx0, points[k].x);
      tx1 = std::max(tx1, points[k].x);
      ty0 = std::min(ty0, points[k].y);
      ty1 = std::max(ty1, points[k].y);
    }
    std::size_t ix0, iy0, ix1, iy1;
    bucket_of(tx0, ty0, ix0, iy0);
    bucket_of(tx1, ty1, ix1, iy1);
    for (std::size_t iy = iy0; iy <= iy1; ++iy) {
      for (std::size_t ix = ix0; ix <= ix1; ++ix) buckets_[iy * nx_ + ix].push_back(t);
    }
  }
}

std::size_t TriangleLocator::bucket_of(double x, double y, std::size_t& ix, std::size_t& iy) const {
  const auto fx = std::clamp(std::floor((x - lo_.x) / cell_x_), 0.0, static_cast<double>(nx_ - 1));
  const auto fy = std::clamp(std::floor((y - lo_.y) / cell_y_), 0.0, static_cast<double>(ny_ - 1));
  ix = static_cast<std::size_t>(fx);
  iy = static_cast<std::size_t>(fy);
  return iy * nx_ + ix;
}

std::optional<Barycentric> TriangleLocator::locate(Point2 p) const {
  constexpr double kTol = -1e-12;
  if (p.x < lo_.x || p.x > hi_.x || p.y < lo_.y || p.y > hi_.y) return std::nullopt;
  std::size_t ix, iy;
  const auto& candidates = buckets_[bucket_of(p.x, p.y, ix, iy)];
  const auto& pts = points_;
  for (const std::size_t t : candidates) {
    const Triangle& tri = triangles_[t];
    const Point2 a = pts[tri[0]], b = pts[tri[1]], c = pts[tri[2]];
    const double area = cross(b - a, c - a);
    if (area == 0.0) continue;
    const double wa = cross(b - p, c - p) / area;
    const double wb = cross(c - p, a - p) / area;
    const double wc = 1.0 - wa - wb;
    if (wa >= kTol && wb >= kTol && wc >= kTol) return Barycentric{t, {wa, wb, wc}};
  }
  return std::nullopt;
}

}  // namespace loel::baselines
