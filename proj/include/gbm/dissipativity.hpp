#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gbm/boundary.hpp"

namespace gbm {

struct ProbeGrid {
  double radius = 10.0;
  int points = 2001;  // per line, or per half-line on G
};

// Probe points of the grid, origins included (0+ and 0- on G).
inline std::vector<StatePoint> probe_points(Topology topo, const ProbeGrid& grid) {
  std::vector<StatePoint> pts;
  const int n = std::max(grid.points, 3);
  if (topo == Topology::line) {
    for (int i = 0; i < n; ++i)
      pts.push_back(StatePoint::on_line(-grid.radius + 2.0 * grid.radius * i / (n - 1)));
    pts.push_back(StatePoint::on_line(0.0));
  } else {
    for (int i = 0; i < n; ++i) {
      const double x = grid.radius * i / (n - 1);
      pts.push_back(StatePoint::plus(x));
      pts.push_back(StatePoint::minus(-x));
    }
  }
  return pts;
}

struct DissipativityResult {
  bool holds = true;
  double margin = 0.0;         // ||lambda f - L f|| - lambda ||f||
  double resolvent_norm = 0.0; // ||lambda f - L f||
  double sup_norm = 0.0;       // ||f||
};

// Numerical check of ||lambda f - L f|| >= lambda ||f|| with L f = f''/2
// (one-sided at the origins). Only meaningful for members of the domain, so
// f must satisfy the boundary equation(s) to within `residual_tol`.
inline DissipativityResult dissipativity_check(const DomainFunction& f, const GeneratorCoeffs& k,
                                               double lambda, const ProbeGrid& grid = {},
                                               double residual_tol = 1e-6) {
  if (!(lambda > 0.0)) throw InvalidParameters("lambda must be positive");
  const double res = boundary_residual(f, k);
  if (!(res <= residual_tol))
    throw ContractNotApplicable("function is not in the generator domain (residual " +
                                std::to_string(res) + ")");
  DissipativityResult out;
  for (const StatePoint& p : probe_points(f.topology(), grid)) {
    const double v = f(p);
    const double lv = 0.5 * f.second_derivative(p);
    out.sup_norm = std::max(out.sup_norm, std::abs(v));
    out.resolvent_norm = std::max(out.resolvent_norm, std::abs(lambda * v - lv));
  }
  out.margin = out.resolvent_norm - lambda * out.sup_norm;
  const double slack = 1e-6 * std::max(1.0, lambda * out.sup_norm);
  out.holds = out.margin >= -slack;
  return out;
}

}  // namespace gbm
