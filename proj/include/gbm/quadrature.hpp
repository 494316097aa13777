#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "gbm/error.hpp"

namespace gbm::quad {

// Gauss-Legendre rule of fixed order on [-1, 1], nodes by Newton iteration.
template <int N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (int i = 0; i < N; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  template <class F>
  double apply(const F& f, double a, double b) const {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += weights[i] * f(mid + half * nodes[i]);
    return s * half;
  }
};

inline const GaussLegendre<16>& gl16() {
  static const GaussLegendre<16> rule;
  return rule;
}

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

namespace detail {

template <class F>
void adapt(const F& f, double a, double b, double whole, double tol, int depth, Result& out) {
  const double mid = 0.5 * (a + b);
  const double left = gl16().apply(f, a, mid);
  const double right = gl16().apply(f, mid, b);
  const double err = std::abs(whole - (left + right));
  if (err <= tol || depth <= 0 || !(b - a > 1e-14 * std::max(1.0, std::abs(a)))) {
    out.value += left + right;
    out.error += err;
    if (err > tol) out.converged = false;
    return;
  }
  adapt(f, a, mid, left, 0.5 * tol, depth - 1, out);
  adapt(f, mid, b, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

// Adaptive composite Gauss-Legendre on [a, b] to absolute tolerance `tol`.
template <class F>
Result integrate(const F& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
  Result out;
  if (!(b > a)) return out;
  detail::adapt(f, a, b, gl16().apply(f, a, b), tol, max_depth, out);
  return out;
}

// Same, with the interval split at the given interior breakpoints (kinks of
// the integrand). Tolerance is shared in proportion to piece length.
template <class F>
Result integrate_piecewise(const F& f, double a, double b, std::vector<double> breaks,
                           double tol = 1e-10, int max_depth = 40) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  Result total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]), hi = std::min(b, breaks[i + 1]);
    if (!(hi > lo)) continue;
    const Result r = integrate(f, lo, hi, tol * (hi - lo) / (b - a), max_depth);
    total.value += r.value;
    total.error += r.error;
    total.converged = total.converged && r.converged;
  }
  return total;
}

// Throwing wrapper: value only, or QuadratureError when the target is missed.
template <class F>
double integrate_or_throw(const F& f, double a, double b, std::vector<double> breaks, double tol) {
  const Result r = integrate_piecewise(f, a, b, std::move(breaks), tol);
  if (!r.converged && r.error > tol) throw QuadratureError("quadrature tolerance not met", r.error);
  return r.value;
}

}  // namespace gbm::quad
