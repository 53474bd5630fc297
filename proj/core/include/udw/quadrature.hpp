#pragma once

#include <map>
#include <mutex>

#include "udw/lattice.hpp"

namespace udw {

// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
inline const std::vector<std::pair<double, double>>& gauss_legendre(int n) {
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");

  std::vector<std::pair<double, double>> nw(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev estimate.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nw[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
  }
  return cache.emplace(n, std::move(nw)).first->second;
}

template <class F>
cplx quad_1d(F&& f, double a, double b, int n) {
  const auto& nw = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  cplx acc = 0.0;
  for (const auto& [x, w] : nw) acc += w * f(mid + half * x);
  return half * acc;
}

// Integral over the simplex a <= t2 <= t1 <= b. Inner nodes are strictly
// interior, so t1 and t2 never coincide.
template <class F>
cplx quad_simplex(F&& f, double a, double b, int n) {
  const auto& nw = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  cplx acc = 0.0;
  for (const auto& [x1, w1] : nw) {
    const double t1 = mid + half * x1;
    const double m2 = 0.5 * (a + t1), h2 = 0.5 * (t1 - a);
    cplx inner = 0.0;
    for (const auto& [x2, w2] : nw) inner += w2 * f(t1, m2 + h2 * x2);
    acc += w1 * h2 * inner;
  }
  return half * acc;
}

// Node-doubling convergence wrappers.
template <class F>
cplx quad_1d_adaptive(F&& f, double a, double b, double tol, int n0 = 32,
                      int nmax = 2048) {
  cplx prev = quad_1d(f, a, b, n0);
  for (int n = 2 * n0; n <= nmax; n *= 2) {
    const cplx cur = quad_1d(f, a, b, n);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

template <class F>
cplx quad_simplex_adaptive(F&& f, double a, double b, double tol, int n0 = 32,
                           int nmax = 512) {
  cplx prev = quad_simplex(f, a, b, n0);
  for (int n = 2 * n0; n <= nmax; n *= 2) {
    const cplx cur = quad_simplex(f, a, b, n);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace udw
