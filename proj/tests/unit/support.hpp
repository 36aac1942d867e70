#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "sgbl/linalg.hpp"
#include "sgbl/rng.hpp"

namespace sgbl::test {

/// Central difference gradient of f at x with per-coordinate step h * max(1, |x_i|).
inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                                 double h) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    Vector a = x, b = x;
    a[i] += step;
    b[i] -= step;
    g[i] = (f(a) - f(b)) / (2.0 * step);
  }
  return g;
}

/// Fourth-order five-point stencil with step h * max(1, |x_i|).
inline Vector five_point_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                                    double h) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    auto at = [&](double k) {
      Vector y = x;
      y[i] += k * step;
      return f(y);
    };
    g[i] = (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * step);
  }
  return g;
}

inline double rel_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1e-300, std::max(a.norm(), b.norm()));
}

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Cyclic Jacobi rotations; returns the smallest eigenvalue of a symmetric matrix.
inline double jacobi_min_eigenvalue(Matrix a) {
  const Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  return a.diagonal().minCoeff();
}

template <class F>
void for_each_subset(Index d, Index k, std::vector<Index>& cur, Index start, F&& f) {
  if (static_cast<Index>(cur.size()) == k) {
    f(cur);
    return;
  }
  for (Index i = start; i < d; ++i) {
    cur.push_back(i);
    for_each_subset(d, k, cur, i + 1, f);
    cur.pop_back();
  }
}

inline double phi2_oracle(const Matrix& A, Index s) {
  const Matrix gram = A.transpose() * A;
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 1; k <= s; ++k) {
    std::vector<Index> cur;
    for_each_subset(A.cols(), k, cur, 0, [&](const std::vector<Index>& S) {
      Matrix M(k, k);
      for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) M(a, b) = gram(S[a], S[b]);
      best = std::min(best, jacobi_min_eigenvalue(M));
    });
  }
  return best;
}

}  // namespace sgbl::test
