#pragma once

// Brute-force Gaussian-process reference: kernels evaluated from their closed
// forms in long double, explicit Gauss-Jordan inverse and LU determinant.
// Shares no code with the library's Cholesky path.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Real = long double;
using Vec = std::vector<Real>;
using Mat = std::vector<Vec>;
using Point = std::vector<double>;

enum class Radius { L1, L2 };

inline Real scaled_radius(const Point& a, const Point& b, const std::vector<double>& l, Radius form) {
  Real acc = 0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const Real u = (static_cast<Real>(a[d]) - b[d]) / l[d];
    acc += form == Radius::L1 ? std::fabs(u) : u * u;
  }
  return form == Radius::L1 ? acc : std::sqrt(acc);
}

inline Real matern32(const Point& a, const Point& b, const std::vector<double>& l, Real sf2, Radius form) {
  const Real s3r = std::sqrt(3.0L) * scaled_radius(a, b, l, form);
  return sf2 * (1 + s3r) * std::exp(-s3r);
}

inline Real rbf(const Point& a, const Point& b, const std::vector<double>& l, Real sf2) {
  const Real r = scaled_radius(a, b, l, Radius::L2);
  return sf2 * std::exp(-r * r / 2);
}

struct Problem {
  std::vector<Point> x;
  std::vector<double> y;
  std::vector<double> l;
  double sf2 = 1.0;
  double sn2 = 0.0;
  Radius form = Radius::L2;
  bool use_rbf = false;

  Real k(const Point& a, const Point& b) const {
    return use_rbf ? rbf(a, b, l, sf2) : matern32(a, b, l, sf2, form);
  }
};

inline Mat gram(const Problem& p) {
  const std::size_t n = p.x.size();
  Mat k(n, Vec(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i][j] = p.k(p.x[i], p.x[j]) + (i == j ? p.sn2 : 0.0L);
  }
  return k;
}

// Gauss-Jordan with partial pivoting.
inline Mat inverse(Mat a) {
  const std::size_t n = a.size();
  Mat inv(n, Vec(n, 0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0) throw std::runtime_error("oracle: singular matrix");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const Real d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const Real f = a[r][c];
      if (f == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

// Determinant by LU with partial pivoting.
inline Real determinant(Mat a) {
  const std::size_t n = a.size();
  Real det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0) return 0;
    if (piv != c) {
      std::swap(a[c], a[piv]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Real f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

struct Posterior {
  Real mean;
  Real variance;
};

// Joint-Gaussian conditioning with an explicit inverse.
inline Posterior conditional(const Problem& p, const Point& xs) {
  const Mat kinv = inverse(gram(p));
  const std::size_t n = p.x.size();
  Vec ks(n);
  for (std::size_t i = 0; i < n; ++i) ks[i] = p.k(xs, p.x[i]);
  Real mean = 0, quad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Real row_y = 0, row_k = 0;
    for (std::size_t j = 0; j < n; ++j) {
      row_y += kinv[i][j] * p.y[j];
      row_k += kinv[i][j] * ks[j];
    }
    mean += ks[i] * row_y;
    quad += ks[i] * row_k;
  }
  return {mean, p.k(xs, xs) - quad};
}

inline Real nlml(const Problem& p) {
  const Mat k = gram(p);
  const Mat kinv = inverse(k);
  const std::size_t n = p.x.size();
  Real quad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) quad += p.y[i] * kinv[i][j] * p.y[j];
  }
  const Real two_pi = 2 * 3.14159265358979323846264338327950288L;
  return quad / 2 + std::log(determinant(k)) / 2 + static_cast<Real>(n) / 2 * std::log(two_pi);
}

// alpha = K^-1 y through the explicit inverse.
inline Vec alpha(const Problem& p) {
  const Mat kinv = inverse(gram(p));
  Vec a(p.x.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) a[i] += kinv[i][j] * p.y[j];
  }
  return a;
}

}  // namespace oracle
