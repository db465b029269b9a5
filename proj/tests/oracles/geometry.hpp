#pragma once

// Geometric references: TOA hyperbola proximity and the Delaunay empty
// circumcircle test.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct P2 {
  double x, y;
};

inline double dist(P2 a, P2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Branch {q : |q - a| - |q - b| = delta} as (-+A cosh t, B sinh t) in a frame
// centred between the foci, first axis from a to b. The branch is sampled
// densely in t over the part that can be nearest to points within `extent` of
// the centre, and the best sample refined by ternary search. |delta| >= |a - b|
// collapses it to the ray that leaves the nearer sensor away from the other.
class HyperbolaBranch {
 public:
  HyperbolaBranch(P2 a, P2 b, double delta, double extent) {
    const double ab = dist(a, b);
    ux_ = (b.x - a.x) / ab, uy_ = (b.y - a.y) / ab;
    mid_ = {(a.x + b.x) / 2, (a.y + b.y) / 2};
    c_ = ab / 2, big_a_ = std::fabs(delta) / 2;
    side_ = delta < 0 ? -1.0 : 1.0;  // closer to a means negative u
    ray_ = big_a_ >= c_ * (1 - 1e-12);
    if (ray_) return;
    big_b_ = std::sqrt(c_ * c_ - big_a_ * big_a_);
    reach_ = std::asinh((2 * extent + 2 * ab) / big_b_) + 1;
    samples_.resize(kSamples + 1);
    for (int k = 0; k <= kSamples; ++k) samples_[k] = at(-reach_ + 2 * reach_ * k / kSamples);
  }

  double distance(P2 p) const {
    const double pu = (p.x - mid_.x) * ux_ + (p.y - mid_.y) * uy_;
    const double pv = -(p.x - mid_.x) * uy_ + (p.y - mid_.y) * ux_;
    if (ray_) {
      const double u = std::fmax(side_ * pu, c_);
      return std::hypot(side_ * pu - u, pv);
    }
    const auto d2 = [&](P2 q) { return (q.x - pu) * (q.x - pu) + (q.y - pv) * (q.y - pv); };
    int best_k = 0;
    double best = d2(samples_[0]);
    for (int k = 1; k <= kSamples; ++k) {
      const double v = d2(samples_[k]);
      if (v < best) best = v, best_k = k;
    }
    const double step = 2 * reach_ / kSamples, t0 = -reach_ + step * best_k;
    double lo = t0 - 2 * step, hi = t0 + 2 * step;
    for (int it = 0; it < 200; ++it) {
      const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if (d2(at(m1)) < d2(at(m2))) hi = m2; else lo = m1;
    }
    return std::sqrt(std::fmin(best, d2(at((lo + hi) / 2))));
  }

 private:
  static constexpr int kSamples = 4000;
  P2 at(double t) const { return {side_ * big_a_ * std::cosh(t), big_b_ * std::sinh(t)}; }

  double ux_ = 1, uy_ = 0, c_ = 0, big_a_ = 0, big_b_ = 0, side_ = 1, reach_ = 0;
  P2 mid_{0, 0};
  bool ray_ = false;
  std::vector<P2> samples_;
};

// Euclidean distance from p to the branch for a single query.
inline double hyperbola_distance(P2 p, P2 a, P2 b, double delta) {
  const P2 mid{(a.x + b.x) / 2, (a.y + b.y) / 2};
  return HyperbolaBranch(a, b, delta, dist(p, mid)).distance(p);
}

inline bool near_hyperbola(P2 p, P2 a, P2 b, double delta, double r) {
  return hyperbola_distance(p, a, b, delta) <= r;
}

// Signed circumcircle test in long double: > 0 when d lies strictly inside
// the circumcircle of counter-clockwise triangle (a, b, c).
inline long double in_circle(P2 a, P2 b, P2 c, P2 d) {
  const long double adx = static_cast<long double>(a.x) - d.x, ady = static_cast<long double>(a.y) - d.y;
  const long double bdx = static_cast<long double>(b.x) - d.x, bdy = static_cast<long double>(b.y) - d.y;
  const long double cdx = static_cast<long double>(c.x) - d.x, cdy = static_cast<long double>(c.y) - d.y;
  const long double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

inline long double orient(P2 a, P2 b, P2 c) {
  return (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
         (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
}

// Area of the convex hull (monotone chain), for checking triangulation coverage.
inline double hull_area(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end(), [](P2 a, P2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<P2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && orient(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && orient(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  double area = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const P2 a = h[i], b = h[(i + 1) % h.size()];
    area += a.x * b.y - b.x * a.y;
  }
  return area / 2;
}

}  // namespace oracle
