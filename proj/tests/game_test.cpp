#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "netfolk/fixtures.hpp"
#include "netfolk/game.hpp"

using namespace netfolk;

namespace {

StageGame dilemma() {
  // C = 0, D = 1; player 2 fastest.
  return StageGame::dense({2, 2}, {{3, 3}, {0, 5}, {5, 0}, {1, 1}});
}

StageGame pennies() {
  return StageGame::dense({2, 2}, {{1, -1}, {-1, 1}, {-1, 1}, {1, -1}});
}

// Grid search over the opponent's simplex (2 players).
double grid_minmax_2p(const StageGame& g, Player k, double step) {
  const Player o = 3 - k;
  const int mo = g.actions(o);
  const int steps = static_cast<int>(std::lround(1.0 / step));
  double best = 1e18;
  auto eval = [&](const std::vector<double>& y) {
    double br = -1e18;
    for (int a = 0; a < g.actions(k); ++a) {
      double v = 0;
      for (int b = 0; b < mo; ++b) {
        ActionProfile p(2);
        p[k - 1] = a;
        p[o - 1] = b;
        v += y[b] * g.payoff(k, p);
      }
      br = std::max(br, v);
    }
    best = std::min(best, br);
  };
  if (mo == 2) {
    for (int s = 0; s <= steps; ++s) eval({s * step, 1 - s * step});
  } else {
    for (int s = 0; s <= steps; ++s) {
      for (int r = 0; r + s <= steps; ++r) eval({s * step, r * step, 1 - (s + r) * step});
    }
  }
  return best;
}

// Point-in-hull by trying every simplex of at most n+1 hull points.
bool hull_oracle(const std::vector<PayoffPoint>& pts, const PayoffPoint& v) {
  const int n = static_cast<int>(v.size());
  const int h = static_cast<int>(pts.size());
  for (std::uint32_t mask = 1; mask < (1u << h); ++mask) {
    const int s = __builtin_popcount(mask);
    if (s > n + 1) continue;
    std::vector<int> idx;
    for (int c = 0; c < h; ++c) {
      if (mask >> c & 1) idx.push_back(c);
    }
    Eigen::MatrixXd a(n + 1, s);
    Eigen::VectorXd b(n + 1);
    for (int c = 0; c < s; ++c) {
      for (int i = 0; i < n; ++i) a(i, c) = pts[idx[c]][i];
      a(n, c) = 1.0;
    }
    for (int i = 0; i < n; ++i) b(i) = v[i];
    b(n) = 1.0;
    Eigen::VectorXd w = a.completeOrthogonalDecomposition().solve(b);
    if ((a * w - b).norm() < 1e-9 && w.minCoeff() > -1e-9) return true;
  }
  return false;
}

}  // namespace

TEST(StageGame, Validation) {
  EXPECT_THROW(StageGame::dense({1, 2}, {{0, 0}, {0, 0}}), GameError);
  EXPECT_THROW(StageGame::dense({2, 2}, {{0, 0}}), GameError);
  EXPECT_THROW(StageGame::dense({2, 2}, {{0, 0}, {0}, {0, 0}, {0, 0}}), GameError);
  const auto g = dilemma();
  EXPECT_EQ(g.payoffs({0, 1}), (PayoffPoint{0, 5}));
  EXPECT_EQ(g.max_payoff(1), 5);
  EXPECT_EQ(g.hull_points().size(), 4u);
  EXPECT_TRUE(g.hull_exhaustive());
}

TEST(StageGame, LocalMatchesDense) {
  const auto net = fixtures::cycle(4);
  const auto a = fixtures::network_dilemma_dense(net);
  const auto profiles = enumerate_profiles(a.action_counts());
  std::vector<PayoffPoint> tensor;
  for (const auto& p : profiles) tensor.push_back(a.payoffs(p));
  const auto b = StageGame::dense(a.action_counts(), tensor);
  for (const auto& p : profiles) EXPECT_EQ(a.payoffs(p), b.payoffs(p));
  EXPECT_EQ(a.payoffs({0, 0, 0, 0}), (PayoffPoint{3, 3, 3, 3}));
  EXPECT_EQ(a.payoffs({1, 0, 0, 0}), (PayoffPoint{4, 1, 3, 1}));
}

TEST(StageGame, ExpectedPayoff) {
  const auto g = pennies();
  MixedProfile x{{0.5, 0.5}, {0.25, 0.75}};
  EXPECT_NEAR(g.expected_payoff(1, x), 0.5 * (0.25 - 0.75) + 0.5 * (-0.25 + 0.75), 1e-12);
}

TEST(Minmax, Examples) {
  for (Player k : {1, 2}) {
    const auto c = minmax(pennies(), k);
    EXPECT_NEAR(c.value, 0.0, 1e-9);
    EXPECT_TRUE(c.exact);
    EXPECT_NEAR(c.value, grid_minmax_2p(pennies(), k, 1e-3), 2e-3);
  }
  const auto pd = minmax(dilemma(), 1);
  EXPECT_NEAR(pd.value, 1.0, 1e-9);
  EXPECT_NEAR(pd.punisher_profile[1][1], 1.0, 1e-9);
  EXPECT_EQ(pd.best_response_action, 1);
  const auto c = StageGame::dense({2, 2}, {{7, 1}, {7, 2}, {7, 3}, {7, 4}});
  EXPECT_NEAR(minmax(c, 1).value, 7.0, 1e-12);
  EXPECT_THROW(minmax(c, 3), GameError);
}

TEST(Minmax, TwoPlayerGridOracle) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> pay(-3, 3), acts(2, 3);
  for (int trial = 0; trial < 60; ++trial) {
    const std::vector<int> counts{acts(rng), acts(rng)};
    std::vector<PayoffPoint> t(counts[0] * counts[1]);
    for (auto& u : t) u = {double(pay(rng)), double(pay(rng))};
    const auto g = StageGame::dense(counts, t);
    for (Player k : {1, 2}) {
      const auto c = minmax(g, k);
      EXPECT_TRUE(c.exact);
      EXPECT_NEAR(c.value, grid_minmax_2p(g, k, 1e-3), 2e-3);
      EXPECT_NEAR(c.value, c.best_response_value, 1e-7);
      EXPECT_NEAR(g.expected_payoff(k, c.punisher_profile), c.value, 1e-7);
    }
  }
}

TEST(Minmax, ThreePlayerUpperBoundsGrid) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pay(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PayoffPoint> t(8);
    for (auto& u : t) u = {double(pay(rng)), double(pay(rng)), double(pay(rng))};
    const auto g = StageGame::dense({2, 2, 2}, t);
    const auto c = minmax(g, 1);
    double grid = 1e18;
    for (int p = 0; p <= 100; ++p) {
      for (int q = 0; q <= 100; ++q) {
        MixedProfile x{{1, 0}, {p / 100.0, 1 - p / 100.0}, {q / 100.0, 1 - q / 100.0}};
        double br = -1e18;
        for (int a = 0; a < 2; ++a) {
          x[0] = {a == 0 ? 1.0 : 0.0, a == 0 ? 0.0 : 1.0};
          br = std::max(br, g.expected_payoff(1, x));
        }
        grid = std::min(grid, br);
      }
    }
    EXPECT_LE(c.value, grid + 1e-9);
    EXPECT_GE(c.value, c.lower_bound - 1e-9);
    EXPECT_NEAR(c.value, c.best_response_value, 1e-7);
  }
}

TEST(Normalize, ShiftsMinmaxToZero) {
  const auto n = normalize(dilemma());
  EXPECT_EQ(n.payoffs({1, 1}), (PayoffPoint{0, 0}));
  const auto nn = normalize(n);
  for (const auto& a : enumerate_profiles(n.action_counts())) {
    EXPECT_EQ(n.payoffs(a), nn.payoffs(a));
  }
  const auto c = normalize(StageGame::dense({2, 2}, {{7, 1}, {7, 2}, {7, 3}, {7, 4}}));
  for (const auto& a : enumerate_profiles(c.action_counts())) EXPECT_EQ(c.payoff(1, a), 0.0);
}

TEST(Hull, FeasibleIrExamples) {
  const auto g = normalize(dilemma());
  EXPECT_TRUE(feasible_ir(g, {2, 2}));
  EXPECT_FALSE(feasible_ir(g, {0, 2}));
  EXPECT_TRUE(feasible_ir(g, {1, 1}));
  EXPECT_FALSE(feasible_ir(g, {3, 3}));
  EXPECT_THROW(feasible_ir(g, {1}), GameError);
}

TEST(Hull, MatchesSimplexOracle) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> pay(-3, 3);
  std::uniform_real_distribution<double> pt(-3.5, 3.5);
  for (int trial = 0; trial < 80; ++trial) {
    const std::vector<int> counts{3, 3};
    std::vector<PayoffPoint> t(9);
    for (auto& u : t) u = {double(pay(rng)), double(pay(rng))};
    const auto g = StageGame::dense(counts, t);
    for (int q = 0; q < 10; ++q) {
      PayoffPoint v{pt(rng), pt(rng)};
      EXPECT_EQ(hull_weights(g, v).has_value(), hull_oracle(g.hull_points(), v));
    }
    // Vertices and edge midpoints lie on the boundary.
    PayoffPoint mid{(t[0][0] + t[4][0]) / 2, (t[0][1] + t[4][1]) / 2};
    EXPECT_TRUE(hull_weights(g, mid).has_value());
  }
}

TEST(Hull, BasicWeightsHaveSmallSupport) {
  const auto g = fixtures::network_dilemma_dense(fixtures::cycle(4));
  const auto v = fixtures::dilemma_target(g);
  const auto w = hull_weights(g, v);
  ASSERT_TRUE(w);
  int support = 0;
  for (double x : *w) support += x > 1e-12;
  EXPECT_LE(support, 5);
}

TEST(Hull, InteriorExamples) {
  EXPECT_TRUE(interior_nonempty(normalize(dilemma())));
  const auto same = StageGame::dense({2, 2}, {{1, 1}, {2, 2}, {3, 3}, {0, 0}});
  EXPECT_FALSE(interior_nonempty(same));
  const auto negative = StageGame::dense({2, 2}, {{-1, 1}, {1, -1}, {-1, -1}, {-2, 0}});
  EXPECT_FALSE(interior_nonempty(negative));
  EXPECT_TRUE(interior_nonempty(fixtures::network_dilemma(fixtures::two_cycles())));
}

TEST(Discount, Examples) {
  EXPECT_NEAR(discounted_payoff({}, 0.7, PayoffPoint{4})[0], 4, 1e-12);
  EXPECT_NEAR(discounted_payoff({{1}}, 0.5)[0], 0.5, 1e-12);
  std::vector<PayoffPoint> alt;
  for (int t = 0; t < 10000; ++t) alt.push_back({double(1 - t % 2)});
  const double closed = 0.1 / (1 - 0.81);
  EXPECT_NEAR(discounted_payoff(alt, 0.9)[0], closed, 1e-12);
  EXPECT_NEAR(closed, 0.5263, 1e-4);
  EXPECT_THROW(discounted_payoff({{1}}, 1.0), GameError);
  EXPECT_THROW(discounted_payoff({{1}}, 0.0), GameError);
}

TEST(TargetPath, PureTargetIsConstant) {
  const auto g = normalize(dilemma());
  for (double d : {0.5, 0.8, 0.99}) {
    const auto s = target_sequence(g, {2, 2}, d, 50, 1e-12);
    for (const auto& a : s.profiles) EXPECT_EQ(a, (ActionProfile{0, 0}));
    EXPECT_TRUE(s.within_epsilon);
  }
}

TEST(TargetPath, SinglePlayerMidpoint) {
  const auto g = StageGame::dense({2}, {{1}, {3}});
  const auto s = target_sequence(g, {2}, 0.9, 400, 1e-6);
  std::vector<PayoffPoint> stage;
  for (const auto& a : s.profiles) stage.push_back(g.payoffs(a));
  EXPECT_NEAR(discounted_payoff(stage, 0.9)[0], 2.0, 1e-6);
  EXPECT_LT(s.total_error, 1e-9);
}

TEST(TargetPath, ExactValueAndContinuationsStayFeasible) {
  const auto g = normalize(dilemma());
  const PayoffPoint v{1.7, 2.1};
  for (double d : {0.7, 0.75, 0.9, 0.99}) {
    TargetPath path(g, v, d);
    std::vector<PayoffPoint> stage;
    for (long t = 1; t <= 300; ++t) {
      stage.push_back(g.payoffs(path.profile(t)));
      EXPECT_TRUE(hull_weights(g, path.continuation(t)).has_value());
    }
    const auto total = discounted_payoff(stage, d, path.continuation(301));
    EXPECT_NEAR(total[0], v[0], 1e-9);
    EXPECT_NEAR(total[1], v[1], 1e-9);
    // Continuation identity w_t = (1-d) u_t + d w_{t+1}.
    for (long t = 1; t <= 300; t += 37) {
      const auto w = path.continuation(t);
      const auto w1 = path.continuation(t + 1);
      const auto u = g.payoffs(path.profile(t));
      for (int i = 0; i < 2; ++i) EXPECT_NEAR(w[i], (1 - d) * u[i] + d * w1[i], 1e-9);
    }
  }
}

TEST(TargetPath, TriangleCentreNeedsMorePatience) {
  // Half-size corner copies of a triangle miss its medial triangle, so no
  // exact path with feasible continuations exists at delta = 1/2.
  const auto g = StageGame::dense({2, 2}, {{3, 0}, {0, 3}, {1, 1}, {1, 1}});
  const PayoffPoint centre{4.0 / 3, 4.0 / 3};
  TargetPath path(g, centre, 0.5);
  EXPECT_THROW(path.profile(20), GameError);
  TargetPath patient(g, centre, 2.0 / 3);
  EXPECT_NO_THROW(patient.profile(200));
}

TEST(TargetPath, Errors) {
  const auto g = normalize(dilemma());
  EXPECT_THROW(target_sequence(g, {1.7, 2.1}, 0.3, 10, 1e-3), GameError);
  EXPECT_THROW(target_sequence(g, {5, 5}, 0.9, 10, 1e-3), GameError);
  EXPECT_THROW(target_sequence(g, {1.7, 2.1}, 0.9, 0, 1e-3), GameError);
}

TEST(Thresholds, GainExpressions) {
  GainTerms g{2.0, 0.0, 1.0, 0.0, 3, 15};
  EXPECT_NEAR(phase1_gain(g, 1 - 1e-6), -1.0, 1e-3);
  GainTerms h{3.0, 1.0, 1.0, 0.5, 3, 15};
  EXPECT_GT(phase1_gain(h, 0.01), 0.0);
  EXPECT_LT(phase3_gain(h, 0.0, 0.999), 0.0);
}

TEST(Thresholds, DilemmaCertificate) {
  const auto g = normalize(dilemma());
  const PayoffPoint v{1.7, 2.1};
  const long L = 10;
  const auto th = thresholds(g, v, L, minmax_all(g));
  ASSERT_EQ(th.T.size(), 2u);
  for (Player i = 1; i <= 2; ++i) {
    const double ratio = g.max_payoff(i) / th.v_prime[i - 1];
    EXPECT_LT(ratio, 1 + th.T[i - 1]);
    if (th.T[i - 1] > 1) EXPECT_GE(ratio, th.T[i - 1]);
    EXPECT_GT(th.v_prime[i - 1], 0.0);
    EXPECT_LT(th.v_prime[i - 1], v[i - 1]);
    EXPECT_TRUE(hull_weights(g, th.reward_target(i)).has_value());
  }
  EXPECT_GT(th.rho, 0.0);
  EXPECT_LT(th.delta_bar, 1.0);
  for (int s = 1; s <= 10; ++s) {
    const double d = th.delta_bar + (1 - th.delta_bar) * s / 11.0;
    for (Player k = 1; k <= 2; ++k) {
      GainTerms gt{g.max_payoff(k), v[k - 1], th.v_prime[k - 1], th.rho, th.T[k - 1], L};
      EXPECT_LT(phase1_gain(gt, d), 0.0);
      EXPECT_LT(phase4_gain(gt, d), 0.0);
      EXPECT_LT(phase3_gain(gt, th.w_of(k, 3 - k), d), 0.0);
    }
  }
}

TEST(Thresholds, EmptyInteriorRejected) {
  const auto single = StageGame::dense({2, 2}, {{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  EXPECT_THROW(thresholds(single, {1, 1}, 5, minmax_all(single)), GameError);
}
