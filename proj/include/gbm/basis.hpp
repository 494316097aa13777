#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "gbm/error.hpp"
#include "gbm/state.hpp"

namespace gbm {

// Named test functions used by the comparison runs. All vanish at infinity;
// "side" differs between 0+ and 0- and is only defined on G.
inline const std::vector<std::string>& basis_names() {
  static const std::vector<std::string> names{"gauss", "lorentz", "exp_abs", "skew", "side"};
  return names;
}

inline Observable basis_function(std::string_view name, Topology topo) {
  if (name == "gauss") return lift([](double x) { return std::exp(-x * x); });
  if (name == "lorentz") return lift([](double x) { return 1.0 / (1.0 + x * x); });
  if (name == "exp_abs") return lift([](double x) { return std::exp(-std::abs(x)); });
  if (name == "skew")
    return lift_sides([](double x) { return std::exp(-x); }, [](double x) { return std::exp(2.0 * x); });
  if (name == "side") {
    if (topo != Topology::two_half) throw InvalidParameters("basis function 'side' needs the two_half topology");
    return lift_sides([](double x) { return std::exp(-0.5 * x * x); },
                      [](double x) { return 0.5 * std::exp(-0.5 * x * x); });
  }
  throw InvalidParameters("unknown basis function '" + std::string(name) + "'");
}

}  // namespace gbm
