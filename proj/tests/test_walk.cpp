#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "gbm/walk.hpp"
#include "gbm/walk_io.hpp"

using namespace gbm;

namespace {

const WalkParamsTwoHalf kAsym{0.25, 0.25, 2.0, 2.0, 6.0, 4.0};

// Kolmogorov distance of a sample from a CDF.
template <class Cdf>
double ks_distance(std::vector<double> x, Cdf F) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = F(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST(LatticeState, StringsAndParsing) {
  EXPECT_EQ(LatticeState::site(Topology::line, 3).str(), "3");
  EXPECT_EQ(LatticeState::zero().str(), "0");
  EXPECT_EQ(LatticeState::zero_plus().str(), "0+");
  EXPECT_EQ(LatticeState::zero_minus().str(), "0-");
  EXPECT_EQ(LatticeState::cemetery(Topology::two_half).str(), "D");
  for (std::string s : {"-7", "0+", "0-", "D", "12"})
    EXPECT_EQ(LatticeState::parse(Topology::two_half, s).str(), s);
  EXPECT_EQ(LatticeState::parse(Topology::line, "0"), LatticeState::zero());
  EXPECT_THROW(LatticeState::parse(Topology::line, "0+"), InvalidParameters);
  EXPECT_THROW(LatticeState::parse(Topology::line, "x1"), InvalidParameters);
  EXPECT_EQ(LatticeState::site(Topology::two_half, 4).tag(), LatticeState::Tag::pos_half);
  EXPECT_EQ(LatticeState::site(Topology::two_half, -4).tag(), LatticeState::Tag::neg_half);
}

TEST(LatticeState, MacroscopicStart) {
  EXPECT_EQ(LatticeState::from_macroscopic(Topology::two_half, 1.0 / 3.0, 500).k(), 166);
  EXPECT_EQ(LatticeState::from_macroscopic(Topology::two_half, 0.0, 500), LatticeState::zero_plus());
  EXPECT_EQ(LatticeState::from_macroscopic(Topology::two_half, -0.001, 500).k(), -1);
  EXPECT_EQ(LatticeState::from_macroscopic(Topology::line, 0.0, 10), LatticeState::zero());
  const StatePoint p = LatticeState::site(Topology::two_half, -5).point(10);
  EXPECT_EQ(p.side(), Side::minus);
  EXPECT_DOUBLE_EQ(p.x(), -0.5);
}

TEST(StepRates, Examples) {
  const WalkParams p = kAsym;
  auto r = step_rates(LatticeState::site(Topology::two_half, 3), p, 500);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].target.k(), 2);
  EXPECT_EQ(r[1].target.k(), 4);
  EXPECT_DOUBLE_EQ(r[0].rate, 125000.0);
  EXPECT_DOUBLE_EQ(r[1].rate, 125000.0);

  r = step_rates(LatticeState::zero_plus(), p, 500);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], (Transition{LatticeState::cemetery(Topology::two_half), 0.25}));
  EXPECT_EQ(r[1], (Transition{LatticeState::site(Topology::two_half, 1), 1000.0}));
  EXPECT_EQ(r[2], (Transition{LatticeState::zero_minus(), 6.0}));

  r = step_rates(LatticeState::zero_minus(), p, 500);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[1], (Transition{LatticeState::site(Topology::two_half, -1), 1000.0}));
  EXPECT_EQ(r[2], (Transition{LatticeState::zero_plus(), 4.0}));

  EXPECT_TRUE(step_rates(LatticeState::cemetery(Topology::two_half), p, 500).empty());
}

TEST(StepRates, LineOriginAndNeighbours) {
  const WalkParams p = WalkParamsLine{0.5, 2.0, 3.0};
  auto r = step_rates(LatticeState::zero(), p, 10);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_DOUBLE_EQ(r[0].rate, 0.5);
  EXPECT_DOUBLE_EQ(r[1].rate, 20.0);
  EXPECT_DOUBLE_EQ(r[2].rate, 30.0);
  EXPECT_EQ(r[2].target.k(), -1);
  // zero-rate targets omitted
  r = step_rates(LatticeState::zero(), WalkParams{WalkParamsLine{0.0, 1.0, 0.0}}, 10);
  ASSERT_EQ(r.size(), 1u);
  // neighbours of +-1 are the origin
  r = step_rates(LatticeState::site(Topology::line, -1), p, 10);
  EXPECT_EQ(r[1].target, LatticeState::zero());
  r = step_rates(LatticeState::site(Topology::two_half, -1), WalkParams{kAsym}, 10);
  EXPECT_EQ(r[1].target, LatticeState::zero_minus());
  EXPECT_THROW(step_rates(LatticeState::zero(), WalkParams{kAsym}, 10), InvalidParameters);
}

TEST(Samplers, PassageHalfTail) {
  // P(J >= i) = C(2i, i)/4^i, including the far tail past the series switch.
  Engine64 g(11);
  const int N = 400000;
  std::vector<double> js(N);
  for (auto& j : js) j = detail::sample_passage_half(g);
  for (int i : {1, 2, 5, 40, 255, 256, 300, 2000}) {
    double q = 1.0;
    for (int k = 0; k < i; ++k) q *= (2.0 * k + 1.0) / (2.0 * k + 2.0);
    const double freq = std::count_if(js.begin(), js.end(), [&](double j) { return j >= i; }) / double(N);
    EXPECT_NEAR(freq, q, 5.0 * std::sqrt(q * (1 - q) / N) + 1e-12) << "i=" << i;
  }
}

TEST(Samplers, PassageHalfMatchesExactSurvivalAtSwitch) {
  // J sampled around the switch point must respect exact q on both sides:
  // conditional frequencies of J in [250, 262) by brute-force q.
  Engine64 g(5);
  std::vector<double> q(300);
  q[0] = 1.0;
  for (int k = 0; k + 1 < 300; ++k) q[k + 1] = q[k] * (2.0 * k + 1.0) / (2.0 * k + 2.0);
  const int N = 2000000;
  int in_range = 0, above = 0;
  for (int i = 0; i < N; ++i) {
    const double j = detail::sample_passage_half(g);
    if (j >= 250 && j < 262) ++in_range;
    if (j >= 262) ++above;
  }
  const double p_in = q[250] - q[262];
  EXPECT_NEAR(in_range / double(N), p_in, 5.0 * std::sqrt(p_in / N));
  EXPECT_NEAR(above / double(N), q[262], 5.0 * std::sqrt(q[262] / N));
}

TEST(Samplers, ReflectedShareMatchesPathCount) {
  // Dynamic programming over all m-step paths from k.
  for (int k : {1, 2, 3, 70}) {
    for (int m : {0, 1, 4, 9, 30, 80, 81}) {
      const int W = m + k + 2;
      std::vector<double> all(2 * W + 1, 0.0), touch(2 * W + 1, 0.0);
      all[k + W] = 1.0;
      for (int s = 0; s < m; ++s) {
        std::vector<double> na(2 * W + 1, 0.0), nt(2 * W + 1, 0.0);
        for (int x = 1; x < 2 * W; ++x)
          for (int dx : {-1, 1}) {
            na[x + dx] += all[x];
            nt[x + dx] += touch[x];
            if (x + dx == W) nt[x + dx] += all[x] - touch[x];
          }
        all.swap(na);
        touch.swap(nt);
      }
      for (int j = 1; j <= k + m; ++j) {
        if (all[j + W] == 0.0) continue;
        EXPECT_NEAR(detail::reflected_share(m, k, j), touch[j + W] / all[j + W], 1e-10)
            << "k=" << k << " m=" << m << " j=" << j;
      }
    }
  }
}

TEST(Samplers, SurvivingDistanceMatchesKilledChain) {
  // Exact law of the distance after Poisson(mu) steps, killed at 0.
  const int d = 2;
  const double mu = 6.0;
  const int MAXM = 80, W = MAXM + d + 2;
  std::vector<double> p(W, 0.0), law(W, 0.0);
  p[d] = 1.0;
  double pm = std::exp(-mu);
  for (int m = 0; m <= MAXM; ++m) {
    for (int x = 1; x < W; ++x) law[x] += pm * p[x];
    std::vector<double> np(W, 0.0);
    for (int x = 1; x + 1 < W; ++x) {
      np[x - 1] += 0.5 * p[x];
      np[x + 1] += 0.5 * p[x];
    }
    np[0] = 0.0;
    p.swap(np);
    pm *= mu / (m + 1);
  }
  const double surv = std::accumulate(law.begin() + 1, law.end(), 0.0);
  Engine64 g(3);
  const int N = 200000;
  std::map<std::int64_t, int> hist;
  for (int i = 0; i < N; ++i) ++hist[detail::sample_surviving_distance(g, d, mu)];
  for (int x = 1; x < 12; ++x) {
    const double pr = law[x] / surv;
    EXPECT_NEAR(hist[x] / double(N), pr, 5.0 * std::sqrt(pr * (1 - pr) / N) + 1e-9) << x;
  }
}

TEST(SimulatePath, StartAtCemetery) {
  SimConfig cfg;
  cfg.n = 10;
  cfg.start = LatticeState::cemetery(Topology::two_half);
  const PathRecord r = simulate_path(cfg, WalkParams{kAsym});
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_TRUE(r.events[0].state.is_cemetery());
  EXPECT_EQ(r.terminal, Terminal::killed);
  EXPECT_EQ(state_at(r, 0.5).str(), "D");
}

TEST(SimulatePath, FirstJumpIsExponential) {
  SimConfig cfg;
  cfg.n = 30;
  cfg.t_horizon = 0.1;
  cfg.start = 2.0;
  std::vector<double> first;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const PathRecord r = simulate_indexed(cfg, WalkParams{WalkParamsLine{}}, i);
    ASSERT_GE(r.events.size(), 2u);
    first.push_back(r.events[1].t);
  }
  const double rate = 900.0;
  const double D = ks_distance(first, [&](double x) { return 1.0 - std::exp(-rate * x); });
  EXPECT_LT(D, 1.95 / std::sqrt(10000.0));  // 0.1% level
}

TEST(SimulatePath, PathInvariants) {
  SimConfig cfg;
  cfg.n = 8;
  cfg.t_horizon = 1.0;
  cfg.start = 0.25;
  for (const WalkParams& p : {WalkParams{kAsym}, WalkParams{WalkParamsLine{0.5, 1.0, 2.0}}}) {
    for (std::uint64_t i = 0; i < 10000; ++i) {
      const PathRecord r = simulate_indexed(cfg, p, i);
      ASSERT_EQ(r.events.front().t, 0.0);
      for (std::size_t e = 1; e < r.events.size(); ++e) {
        const auto& a = r.events[e - 1];
        const auto& b = r.events[e];
        ASSERT_LT(a.t, b.t);
        ASSERT_FALSE(a.state == b.state);
        ASSERT_FALSE(a.state.is_cemetery());
        const bool nearest = !a.state.is_cemetery() && !b.state.is_cemetery() &&
                             std::llabs(a.state.k() - b.state.k()) == 1;
        const bool origin_swap = a.state.is_origin() && b.state.is_origin();
        const bool killed = a.state.is_origin() && b.state.is_cemetery();
        ASSERT_TRUE(nearest || origin_swap || killed) << a.state.str() << " -> " << b.state.str();
        if (origin_swap) {
          ASSERT_EQ(p.index(), 1u);
        }
      }
      ASSERT_LE(r.events.back().t, cfg.t_horizon);
      ASSERT_EQ(r.final_state, r.events.back().state);
    }
  }
}

TEST(SimulatePath, Reproducible) {
  SimConfig cfg;
  cfg.n = 50;
  cfg.seed = 99;
  cfg.start = 1.0 / 3.0;
  EXPECT_EQ(simulate_path(cfg, WalkParams{kAsym}), simulate_path(cfg, WalkParams{kAsym}));
  cfg.record_mode = RecordMode::boundary_events_only;
  cfg.observe = {0.25, 0.5};
  EXPECT_EQ(simulate_path(cfg, WalkParams{kAsym}), simulate_path(cfg, WalkParams{kAsym}));
}

TEST(SimulatePath, AsymSwitchesAndDies) {
  SimConfig cfg;
  cfg.n = 500;
  cfg.t_horizon = 1.0;
  cfg.start = 1.0 / 3.0;
  cfg.record_mode = RecordMode::boundary_events_only;
  int switched = 0, killed = 0;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const PathRecord r = simulate_indexed(cfg, WalkParams{kAsym}, i);
    bool sw = false;
    for (std::size_t e = 1; e < r.events.size(); ++e)
      sw = sw || (r.events[e - 1].state.is_origin() && r.events[e].state.is_origin());
    switched += sw;
    killed += r.terminal == Terminal::killed;
  }
  EXPECT_GT(switched, 0);
  EXPECT_GT(killed, 0);
}

TEST(SimulatePath, EventCap) {
  SimConfig cfg;
  cfg.n = 100;
  cfg.start = 1.0;
  cfg.event_cap = 50;
  EXPECT_THROW(simulate_path(cfg, WalkParams{WalkParamsLine{}}), EventCapExceeded);
}

TEST(SimulatePath, ExcursionEngineRejectsFullPaths) {
  SimConfig cfg;
  cfg.engine = SimEngine::excursion;
  EXPECT_THROW(simulate_path(cfg, WalkParams{kAsym}), InvalidParameters);
}

TEST(SimulatePath, EnginesAgreeInLaw) {
  // Same observation functionals from the stepping and excursion engines.
  SimConfig cfg;
  cfg.n = 20;
  cfg.t_horizon = 0.6;
  cfg.start = 0.15;
  cfg.record_mode = RecordMode::boundary_events_only;
  cfg.observe = {0.2, 0.6};
  const WalkParams p = kAsym;
  const int m = 40000;
  auto moments = [&](SimEngine e, std::uint64_t salt) {
    SimConfig c = cfg;
    c.engine = e;
    c.seed = salt;
    std::array<double, 6> acc{};
    for (int i = 0; i < m; ++i) {
      const PathRecord r = simulate_indexed(c, p, i);
      const StatePoint a = state_at(r, 0.2).point(c.n), b = state_at(r, 0.6).point(c.n);
      const double xa = a.is_cemetery() ? 0.0 : a.x(), xb = b.is_cemetery() ? 0.0 : b.x();
      acc[0] += xa;
      acc[1] += xb;
      acc[2] += xb * xb;
      acc[3] += b.is_cemetery();
      acc[4] += b.side() == Side::minus;
      acc[5] += a.side() == Side::minus;
    }
    for (auto& v : acc) v /= m;
    return acc;
  };
  const auto s = moments(SimEngine::stepping, 1), x = moments(SimEngine::excursion, 2);
  const std::array<double, 6> sd{0.4, 0.5, 0.5, 0.5, 0.5, 0.5};
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(s[i], x[i], 5.0 * sd[i] * std::sqrt(2.0 / m)) << i;
}

TEST(SimulatePath, KilledWalkSurvivalAndMartingale) {
  // Absorbing origin: survival follows the reflection principle, and the
  // lattice position stopped at the origin is a martingale.
  SimConfig cfg;
  cfg.n = 200;
  cfg.t_horizon = 0.25;
  cfg.start = 0.2;
  cfg.record_mode = RecordMode::endpoints_only;
  cfg.observe = {0.25};
  const WalkParams p = WalkParamsLine{1e6, 0.0, 0.0};
  const int m = 50000;
  double alive = 0.0, pos = 0.0, pos2 = 0.0;
  for (int i = 0; i < m; ++i) {
    const PathRecord r = simulate_indexed(cfg, p, i);
    const LatticeState s = state_at(r, 0.25);
    if (s.is_site()) {
      alive += 1.0;
      const double x = static_cast<double>(s.k()) / cfg.n;
      pos += x;
      pos2 += x * x;
    }
  }
  const double surv = alive / m;
  const double target = 2.0 * normal_cdf(0.2 / std::sqrt(0.25)) - 1.0;
  EXPECT_NEAR(surv, target, 3.0 * std::sqrt(target * (1 - target) / m) + 2.0 / cfg.n);
  const double mean = pos / m, sd = std::sqrt(pos2 / m - mean * mean);
  EXPECT_NEAR(mean, 0.2, 4.0 * sd / std::sqrt(m));
}

TEST(SimulatePath, FarStartIsBrownian) {
  SimConfig cfg;
  cfg.n = 100;
  cfg.t_horizon = 0.1;
  cfg.start = 2.0;
  cfg.record_mode = RecordMode::endpoints_only;
  const int m = 20000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < m; ++i) {
    const double x = static_cast<double>(simulate_indexed(cfg, WalkParams{kAsym}, i).final_state.k()) / cfg.n;
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / m, var = s2 / m - mean * mean;
  EXPECT_NEAR(mean, 2.0, 4.0 * std::sqrt(0.1 / m) + 1.0 / cfg.n);
  EXPECT_NEAR(var, 0.1, 4.0 * 0.1 * std::sqrt(2.0 / m) + 1.0 / cfg.n);
}

TEST(SimulatePath, TruncationIsRare) {
  SimConfig cfg;
  cfg.n = 20;
  cfg.start = 0.0;
  int truncated = 0;
  for (std::uint64_t i = 0; i < 10000; ++i)
    truncated += simulate_indexed(cfg, WalkParams{WalkParamsLine{0.0, 1.0, 1.0}}, i).terminal == Terminal::truncated;
  EXPECT_LT(truncated / 10000.0, 1e-4);
  cfg.L = 0.2;
  cfg.t_horizon = 5.0;
  EXPECT_EQ(simulate_path(cfg, WalkParams{WalkParamsLine{0.0, 1.0, 1.0}}).terminal, Terminal::truncated);
}

TEST(SimulatePath, OriginDestinationFrequencies) {
  SimConfig cfg;
  cfg.n = 500;
  cfg.start = LatticeState::zero_plus();
  std::array<double, 3> count{};
  const int m = 20000;
  for (int i = 0; i < m; ++i) {
    cfg.seed = derive_seed(17, i);
    cfg.t_horizon = 0.05;
    cfg.record_mode = RecordMode::boundary_events_only;
    const PathRecord r = simulate_path(cfg, WalkParams{kAsym});
    ASSERT_GE(r.events.size(), 2u);
    const LatticeState& s = r.events[1].state;
    count[s.is_cemetery() ? 0 : s.is_site() ? 1 : 2] += 1;
  }
  const double total = 0.25 + 1000.0 + 6.0;
  const std::array<double, 3> p{0.25 / total, 1000.0 / total, 6.0 / total};
  for (int i = 0; i < 3; ++i)
    EXPECT_NEAR(count[i] / m, p[i], 4.0 * std::sqrt(p[i] * (1 - p[i]) / m) + 1e-12) << i;
}

TEST(Batch, DeterministicAndWorkerIndependent) {
  SimConfig cfg;
  cfg.n = 30;
  cfg.seed = 5;
  cfg.start = 0.1;
  const WalkParams p = kAsym;
  const auto one = simulate_batch(cfg, p, 1);
  SimConfig c1 = cfg;
  c1.seed = derive_seed(5, 0);
  EXPECT_EQ(one[0], simulate_path(c1, p));
  const auto a = simulate_batch(cfg, p, 50, 1);
  const auto b = simulate_batch(cfg, p, 50, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, simulate_batch(cfg, p, 50, 1));
  auto fold = [](double& acc, const PathRecord& r, std::uint64_t) { acc += r.events.size() * 1e-3 + r.end_time; };
  auto merge = [](double& acc, const double& part) { acc += part; };
  cfg.record_mode = RecordMode::boundary_events_only;
  EXPECT_EQ(simulate_fold(cfg, p, 3000, 0.0, fold, merge, 1), simulate_fold(cfg, p, 3000, 0.0, fold, merge, 4));
}

TEST(Batch, MeanDisplacement) {
  SimConfig cfg;
  cfg.n = 50;
  cfg.t_horizon = 1.0;
  cfg.start = 5.0;
  const int m = 10000;
  const auto ens = simulate_batch(cfg, WalkParams{WalkParamsLine{}}, m);
  double s = 0;
  for (const auto& r : ens) s += static_cast<double>(r.final_state.k()) / cfg.n - 5.0;
  EXPECT_NEAR(s / m, 0.0, 4.0 * std::sqrt(1.0 / m));
}

TEST(StateAt, RightContinuousAndQueries) {
  SimConfig cfg;
  cfg.n = 10;
  cfg.start = 0.3;
  const PathRecord r = simulate_path(cfg, WalkParams{WalkParamsLine{0.5, 1.0, 1.0}});
  EXPECT_EQ(state_at(r, 0.0), r.events[0].state);
  for (std::size_t e = 1; e < std::min<std::size_t>(r.events.size(), 20); ++e) {
    EXPECT_EQ(state_at(r, r.events[e].t), r.events[e].state);
    EXPECT_EQ(state_at(r, std::nextafter(r.events[e].t, 0.0)), r.events[e - 1].state);
  }
  EXPECT_THROW(state_at(r, 1.5), UnsupportedQuery);

  cfg.start = LatticeState::zero();
  cfg.t_horizon = 1.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const PathRecord k = simulate_indexed(cfg, WalkParams{WalkParamsLine{50.0, 0.0, 0.0}}, i);
    if (k.terminal == Terminal::killed) {
      EXPECT_TRUE(state_at(k, 1.0).is_cemetery());
    }
  }

  cfg.record_mode = RecordMode::endpoints_only;
  cfg.start = 0.3;
  const PathRecord e = simulate_path(cfg, WalkParams{WalkParamsLine{0.5, 1.0, 1.0}});
  EXPECT_EQ(state_at(e, 0.0), LatticeState::site(Topology::line, 3));
  EXPECT_EQ(state_at(e, 1.0), e.final_state);
  if (e.terminal == Terminal::alive) {
    EXPECT_THROW(state_at(e, 0.5), UnsupportedQuery);
  }
}

TEST(StateAt, BoundaryModeSnapshotsAgreeWithFullPath) {
  // Same seed, stepping engine: boundary filter of the full path.
  SimConfig cfg;
  cfg.n = 15;
  cfg.start = 0.2;
  cfg.engine = SimEngine::stepping;
  cfg.observe = {0.1, 0.2, 0.7};
  for (std::uint64_t i = 0; i < 300; ++i) {
    cfg.seed = i;
    cfg.record_mode = RecordMode::full_path;
    const PathRecord f = simulate_path(cfg, WalkParams{kAsym});
    cfg.record_mode = RecordMode::boundary_events_only;
    const PathRecord b = simulate_path(cfg, WalkParams{kAsym});
    EXPECT_EQ(f.final_state, b.final_state);
    for (double t : cfg.observe) EXPECT_EQ(state_at(f, t), state_at(b, t));
    for (const Event& e : b.events) EXPECT_EQ(state_at(f, e.t), e.state);
  }
}

TEST(PathIo, CsvAndJsonl) {
  SimConfig cfg;
  cfg.n = 10;
  cfg.start = 0.2;
  cfg.t_horizon = 0.05;
  cfg.seed = 8;
  const PathRecord r = simulate_path(cfg, WalkParams{kAsym});
  std::ostringstream csv;
  write_path_csv(csv, r);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,state");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, r.events.size());

  std::ostringstream js;
  write_path_jsonl(js, r);
  const auto j = nlohmann::json::parse(js.str());
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), 8u);
  EXPECT_EQ(j.at("terminal_flag"), "alive");
  EXPECT_EQ(path_from_json(j), r);
}
