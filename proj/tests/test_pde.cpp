#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gbm/pde.hpp"
#include "gbm/quadrature.hpp"

using namespace gbm;

namespace {

const auto kReflected = GeneratorCoeffsTwoHalf::make(0, 0, 0, 0, 1, 1, 0, 0);

double heat(double t, double z) { return std::exp(-z * z / (2 * t)) / std::sqrt(2 * std::numbers::pi * t); }

// Method of images on [0, inf) for f0 = e^{-y^2}.
double images(double t, double x) {
  auto w = [&](double y) { return std::exp(-y * y) * (heat(t, x - y) + heat(t, x + y)); };
  return quad::integrate_or_throw(w, 0.0, 12.0, {x}, 1e-13);
}

// Free heat flow on the line for f0 = e^{-|y|}.
double free_flow(double t, double x) {
  auto w = [&](double y) { return std::exp(-std::abs(y)) * heat(t, x - y); };
  return quad::integrate_or_throw(w, -30.0, 30.0, {0.0, x}, 1e-13);
}

double images_error(double h) {
  const double t = 0.5;
  Grid g(Topology::two_half, h, 8.0);
  const auto f = evolve_semigroup(g.sample(lift_sides([](double y) { return std::exp(-y * y); },
                                                      [](double) { return 0.0; })),
                                  kReflected, t, h, g);
  double err = 0.0;
  for (double x = 0.0; x <= 3.0 + 1e-12; x += 0.25) err = std::max(err, std::abs(semigroup_expectation(f, StatePoint::plus(x), t) - images(t, x)));
  return err;
}

EvolveOptions stride(std::size_t k) {
  EvolveOptions o;
  o.store_stride = k;
  return o;
}

}  // namespace

TEST(Grid, Layout) {
  Grid line(Topology::line, 0.5, 2.0);
  EXPECT_EQ(line.size(), 9u);
  EXPECT_EQ(line.point(line.origin()), StatePoint::on_line(0.0));
  Grid two(Topology::two_half, 0.5, 2.0);
  EXPECT_EQ(two.size(), 10u);
  EXPECT_EQ(two.point(two.origin_minus()), StatePoint::origin_minus());
  EXPECT_EQ(two.point(two.origin_plus()), StatePoint::origin_plus());
  EXPECT_EQ(two.point(0), StatePoint::minus(-2.0));
  EXPECT_EQ(two.point(9), StatePoint::plus(2.0));
  EXPECT_THROW(Grid(Topology::line, 0.3, 1.0), InvalidParameters);
  EXPECT_THROW(Grid(Topology::line, -0.1, 1.0), InvalidParameters);
}

TEST(Evolve, TrivialCases) {
  Grid g(Topology::line, 0.05, 4.0);
  const auto k = GeneratorCoeffsLine::make(0.2, 0.3, 0.3, 0.2);
  const auto z = evolve_semigroup(std::vector<double>(g.size(), 0.0), k, 1.0, 0.05, g);
  for (const auto& v : z.values)
    for (double x : v) EXPECT_EQ(x, 0.0);
  const auto f0 = g.sample(lift([](double y) { return std::exp(-y * y); }));
  const auto same = evolve_semigroup(f0, k, 0.0, 0.05, g);
  ASSERT_EQ(same.values.size(), 1u);
  EXPECT_EQ(same.values[0], f0);
  EXPECT_THROW(evolve_semigroup(f0, kReflected, 1.0, 0.1, g), InvalidParameters);
  EXPECT_THROW(evolve_semigroup(f0, k, 1.0, 0.0, g), InvalidParameters);
}

TEST(Evolve, ReflectedMatchesImages) {
  EXPECT_LT(images_error(0.01), 2e-4);
}

TEST(Evolve, SecondOrderOnImages) {
  const double e1 = images_error(0.04), e2 = images_error(0.02), e3 = images_error(0.01);
  EXPECT_GT(std::log2(e1 / e2), 1.9) << e1 << " " << e2;
  EXPECT_GT(std::log2(e2 / e3), 1.9) << e2 << " " << e3;
}

TEST(Evolve, RegularOriginIsFreeHeatFlow) {
  // c2- = c2+ and nothing else: the origin is an ordinary point.
  const double t = 0.7, h = 0.01;
  Grid g(Topology::line, h, 12.0);
  const auto f = evolve_semigroup(g.sample(lift([](double y) { return std::exp(-std::abs(y)); })),
                                  GeneratorCoeffsLine::make(0, 1, 1, 0), t, h, g);
  for (double x : {-2.0, -0.5, 0.0, 0.37, 1.0, 3.0})
    EXPECT_NEAR(semigroup_expectation(f, StatePoint::on_line(x), t), free_flow(t, x), 1e-4) << x;
}

TEST(Evolve, MinusSideUntouchedWhenDecoupled) {
  Grid g(Topology::two_half, 0.02, 6.0);
  const auto f = evolve_semigroup(g.sample(lift_sides([](double y) { return std::exp(-y * y); },
                                                      [](double) { return 0.0; })),
                                  kReflected, 1.0, 0.02, g);
  for (std::size_t i = 0; i <= g.origin_minus(); ++i) EXPECT_EQ(f.values.back()[i], 0.0);
}

TEST(Evolve, ConservationInReflectedCase) {
  Grid g(Topology::two_half, 0.01, 16.0);
  const double mass0 = std::sqrt(std::numbers::pi) / 2.0;
  const auto f0 = g.sample(lift_sides([=](double y) { return std::exp(-y * y) / mass0; }, [](double) { return 0.0; }));
  const auto f = evolve_semigroup(f0, kReflected, 2.0, 0.01, g, stride(20));
  auto mass = [&](const std::vector<double>& u) {
    double m = 0.5 * g.h() * u[g.origin_plus()];
    for (std::size_t i = g.origin_plus() + 1; i < g.size(); ++i) m += g.h() * u[i];
    return m;
  };
  const double m0 = mass(f.values.front());
  EXPECT_NEAR(m0, 1.0, 1e-6);
  for (const auto& v : f.values) EXPECT_NEAR(mass(v), m0, 1e-10);
}

TEST(Evolve, ContractionAndPositivity) {
  const GeneratorCoeffs ks[] = {GeneratorCoeffsLine::make(0, 0, 0, 1), GeneratorCoeffsLine::make(0.3, 0.1, 0.4, 0.2),
                                GeneratorCoeffsTwoHalf::make(SideCoeffs{0.25, 6, 2, 1}, SideCoeffs{0.25, 4, 2, 1}),
                                GeneratorCoeffsTwoHalf::make(SideCoeffs{0, 0.5, 0, 1}, SideCoeffs{1, 0, 0.5, 0})};
  for (const auto& k : ks) {
    Grid g(topology_of(k), 0.01, 8.0);
    // a datum that violates every boundary condition
    const auto f0 = g.sample(lift_sides([](double y) { return std::exp(-std::abs(y - 0.3)); },
                                        [](double y) { return 0.5 * std::exp(-y * y); }));
    const auto f = evolve_semigroup(f0, k, 1.0, 0.01, g);
    EXPECT_TRUE(f.contraction_ok);
    EXPECT_TRUE(f.positivity_ok);
    EXPECT_LE(f.max_norm_growth, 0.0);
    EXPECT_GE(f.min_value, -1e-8);
    for (std::size_t j = 1; j < f.values.size(); ++j)
      EXPECT_LE(detail::sup_norm(f.values[j]), detail::sup_norm(f.values[j - 1]) * (1 + 1e-12));
  }
}

TEST(Evolve, StickyAbsorbingOriginHoldsItsValue) {
  Grid g(Topology::line, 0.02, 6.0);
  const auto f0 = g.sample(lift([](double y) { return std::exp(-y * y); }));
  const auto f = evolve_semigroup(f0, GeneratorCoeffsLine::make(0, 0, 0, 1), 2.0, 0.02, g);
  for (const auto& v : f.values) EXPECT_DOUBLE_EQ(v[g.origin()], 1.0);
}

TEST(Expectation, NodesAndInterpolation) {
  Grid g(Topology::two_half, 0.05, 5.0);
  const auto f0 = g.sample(lift([](double y) { return std::exp(-y * y); }));
  const auto f = evolve_semigroup(f0, kReflected, 0.5, 0.05, g, stride(2));
  const std::size_t node = g.origin_plus() + 7;
  EXPECT_EQ(semigroup_expectation(f, g.point(node), f.times[2]), f.values[2][node]);
  EXPECT_EQ(semigroup_expectation(f, StatePoint::origin_minus(), 0.0), f0[g.origin_minus()]);
  // equal slices: interpolated value is that value
  SemigroupField flat = f;
  flat.values[2] = flat.values[1];
  const double mid = 0.5 * (f.times[1] + f.times[2]);
  EXPECT_NEAR(semigroup_expectation(flat, StatePoint::plus(1.23), mid), semigroup_expectation(flat, StatePoint::plus(1.23), f.times[1]), 1e-15);
  EXPECT_THROW(semigroup_expectation(f, StatePoint::plus(1.0), 0.6), UnsupportedQuery);
  EXPECT_THROW(semigroup_expectation(f, StatePoint::plus(6.0), 0.1), UnsupportedQuery);
  EXPECT_EQ(semigroup_expectation(f, StatePoint::cemetery(), 0.1), 0.0);
}

TEST(Expectation, OffGridAgainstImages) {
  Grid g(Topology::two_half, 0.01, 8.0);
  const auto f = evolve_semigroup(g.sample(lift([](double y) { return std::exp(-y * y); })), kReflected, 0.5, 0.01, g,
                                  stride(10));
  for (double x : {0.003, 0.1234, 0.777, 2.0101})
    for (double t : {0.1, 0.255, 0.5})
      EXPECT_NEAR(semigroup_expectation(f, StatePoint::plus(x), t), images(t, x), 2e-4 + 0.05 * 0.05 * 0.5) << x << " " << t;
}

TEST(Laplace, ZeroDatumAndHorizon) {
  Grid g(Topology::line, 0.05, 10.0);
  const Observable zero = [](const StatePoint&) { return 0.0; };
  const auto k = GeneratorCoeffsLine::make(0, 0, 0, 1);
  EXPECT_EQ(laplace_check(zero, k, 1.0, g, 30.0, {0.05}), 0.0);
  EXPECT_THROW(laplace_check(zero, k, 1.0, g, 10.0), HorizonTooShort);
}

TEST(Laplace, AbsorbedLineAgreesAndConverges) {
  const Observable g0 = lift([](double y) { return std::exp(-std::abs(y)); });
  const auto k = GeneratorCoeffsLine::make(0, 0, 0, 1);
  auto run = [&](double h) {
    Grid g(Topology::line, h, 25.0);
    LaplaceOptions o;
    o.dt = h;
    return laplace_check(g0, k, 1.0, g, 30.0, o);
  };
  const double coarse = run(1e-2), fine = run(5e-3);
  EXPECT_LE(coarse, 5e-4);
  EXPECT_GE(coarse / fine, 3.0) << coarse << " " << fine;
}

TEST(Laplace, TwoHalfSwitchingSet) {
  const Observable g0 = lift_sides([](double y) { return std::exp(-y * y); }, [](double y) { return 0.5 * std::exp(-std::abs(y)); });
  const auto k = GeneratorCoeffsTwoHalf::make(SideCoeffs{0.25, 6, 2, 1}, SideCoeffs{0.25, 4, 2, 1});
  Grid g(Topology::two_half, 1e-2, 25.0);
  EXPECT_LE(laplace_check(g0, k, 1.0, g, 30.0), 5e-4);
}
