#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "netfolk/engine.hpp"
#include "netfolk/fixtures.hpp"

using namespace netfolk;

namespace {

struct Economy {
  Network g;
  StageGame game;
  PayoffPoint v;
};

Economy dilemma4() {
  auto g = fixtures::cycle(4);
  auto game = fixtures::network_dilemma_dense(g);
  auto v = fixtures::dilemma_target(game);
  return {g, game, v};
}

Economy pennies4() { return {fixtures::cycle(4), fixtures::pennies_ring(4), PayoffPoint(4, 0.7)}; }

double audit_delta(const Economy& e) {
  EquilibriumPlan probe(e.g, e.game, e.v, 0.9);
  return (1.0 + probe.thresholds().delta_bar) / 2.0;
}

int flipped(EquilibriumPlan& plan, Player p, long t) {
  return (plan.main_path().profile(t)[p - 1] + 1) % plan.game().actions(p);
}

}  // namespace

TEST(Plan, RejectsCutVertex) {
  auto g = fixtures::two_triangles();
  auto game = fixtures::network_dilemma_dense(g);
  EXPECT_THROW(EquilibriumPlan(g, game, fixtures::dilemma_target(game), 0.99), std::exception);
}

TEST(Plan, ScheduleOffsets) {
  auto e = dilemma4();
  EquilibriumPlan plan(e.g, e.game, e.v, audit_delta(e));
  const auto s = plan.schedule({2, 5});
  EXPECT_EQ(s.s3, 5 + plan.L() + 1);
  EXPECT_EQ(s.s4, 5 + plan.L() + plan.T(2) + 1);
  EXPECT_EQ(s.s5, 5 + 2 * plan.L() + plan.T(2) + 1);
}

TEST(Plan, DrawFrequencies) {
  auto e = pennies4();
  EquilibriumPlan plan(e.g, e.game, e.v, audit_delta(e));
  ASSERT_TRUE(plan.mixes(2, 1));
  const auto& x = plan.minmax(1).punisher_profile[1];
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> count(plan.game().actions(2), 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++count[plan.draw(2, 1, unit(rng))];
  for (std::size_t a = 0; a < count.size(); ++a) {
    EXPECT_NEAR(static_cast<double>(count[a]) / draws, x[a], 0.02);
  }
}

TEST(Plan, TargetPlaysBestResponse) {
  auto e = pennies4();
  EquilibriumPlan plan(e.g, e.game, e.v, audit_delta(e));
  EXPECT_EQ(plan.support(1, 1), std::vector<int>{plan.minmax(1).best_response_action});
}

TEST(Run, OnPathPaysTarget) {
  for (const auto& e : {dilemma4(), pennies4()}) {
    EquilibriumPlan plan(e.g, e.game, e.v, audit_delta(e));
    GameRunOptions o;
    o.horizon = 25;
    const auto run = run_game(plan, o);
    ASSERT_TRUE(run.tail_closed);
    for (int i = 0; i < plan.players(); ++i) EXPECT_NEAR(run.total[i], e.v[i], 1e-9);
    for (long t = 1; t <= o.horizon; ++t) EXPECT_EQ(run.actions[t - 1], plan.main_path().profile(t));
    EXPECT_FALSE(run.fallback);
    EXPECT_EQ(run.lies_detected, 0);
  }
}

TEST(Run, PhasesFollowSchedule) {
  auto e = dilemma4();
  EquilibriumPlan plan(e.g, e.game, e.v, audit_delta(e));
  GameRunOptions o;
  o.deviations = {{1, 1, flipped(plan, 1, 1)}};
  const auto run = run_game(plan, o);
  const auto s = plan.schedule({1, 1});
  for (Player p = 1; p <= plan.players(); ++p) {
    std::map<Phase, long> entered;
    for (const auto& ev : run.transitions) {
      if (ev.player == p && !entered.count(ev.to)) entered[ev.to] = ev.stage;
    }
    EXPECT_EQ(entered[Phase::III], s.s3) << p;
    EXPECT_EQ(entered[Phase::IVStart], s.s4) << p;
    EXPECT_EQ(entered[Phase::IV], s.s4 + 1) << p;
  }
  EXPECT_EQ(run.knowers.at(s.s3 - 2), plan.players());
  EXPECT_EQ(run.missing_reports, 0);
  EXPECT_FALSE(run.fallback);
}

TEST(Run, PunishedPlayerHeldToMinmax) {
  auto e = pennies4();
  EquilibriumPlan plan(e.g, e.game, e.v, audit_delta(e));
  GameRunOptions o;
  o.accounting = Accounting::Expected;
  o.deviations = {{1, 1, flipped(plan, 1, 1)}};
  const auto run = run_game(plan, o);
  const auto s = plan.schedule({1, 1});
  for (long t = s.s3; t < s.s4; ++t) {
    EXPECT_NEAR(run.payoffs[t - 1][0], plan.minmax_values()[0], 1e-9);
  }
}

TEST(Run, SimultaneousDeviationsTriggerFallback) {
  auto e = dilemma4();
  EquilibriumPlan plan(e.g, e.game, e.v, audit_delta(e));
  GameRunOptions o;
  o.horizon = 10;
  o.deviations = {{1, 2, flipped(plan, 1, 2)}, {3, 2, flipped(plan, 3, 2)}};
  EXPECT_TRUE(run_game(plan, o).fallback);
}

TEST(Run, SingleLieDoesNotMoveTheSchedule) {
  auto e = dilemma4();
  EquilibriumPlan plan(e.g, e.game, e.v, audit_delta(e));
  GameRunOptions o;
  o.deviations = {{1, 1, flipped(plan, 1, 1)}};
  const auto honest = run_game(plan, o);
  for (long stage = 2; stage <= plan.L() + 1; ++stage) {
    for (auto kind : {LieDirective::Kind::DropClaims, LieDirective::Kind::DropRelays,
                      LieDirective::Kind::WithholdAccusations}) {
      GameRunOptions lied = o;
      LieDirective d;
      d.kind = kind;
      lied.lies.liars[stage] = {Lie{3, {d}}};
      const auto run = run_game(plan, lied);
      ASSERT_EQ(run.transitions.size(), honest.transitions.size()) << stage;
      for (std::size_t i = 0; i < run.transitions.size(); ++i) {
        EXPECT_EQ(run.transitions[i].stage, honest.transitions[i].stage);
        EXPECT_EQ(run.transitions[i].to, honest.transitions[i].to);
      }
      EXPECT_EQ(run.actions, honest.actions);
    }
  }
}

TEST(Run, PunisherIndifferentAcrossDraws) {
  auto e = pennies4();
  EquilibriumPlan plan(e.g, e.game, e.v, audit_delta(e));
  const auto s = plan.schedule({1, 1});
  const long len = s.s4 - s.s3;
  ASSERT_LE(len, 4);
  std::vector<double> totals;
  for (int bits = 0; bits < (1 << len); ++bits) {
    GameRunOptions o;
    o.deviations = {{1, 1, flipped(plan, 1, 1)}};
    o.draws = [&](Player p, long t) -> std::optional<int> {
      if (p != 2 || t < s.s3 || t >= s.s4) return std::nullopt;
      return plan.support(2, 1)[(bits >> (t - s.s3)) & 1];
    };
    const auto run = run_game(plan, o);
    ASSERT_TRUE(run.tail_closed);
    EXPECT_EQ(run.missing_reports, 0);
    totals.push_back(run.total[1]);
  }
  for (double x : totals) EXPECT_NEAR(x, totals.front(), 1e-9);
}

TEST(Run, TracesAreDeterministic) {
  auto e = pennies4();
  EquilibriumPlan plan(e.g, e.game, e.v, audit_delta(e));
  auto trace = [&](std::uint64_t seed) {
    std::ostringstream out;
    GameRunOptions o;
    o.seed = seed;
    o.trace = TraceWriter(&out, TraceLevel::Full);
    o.deviations = {{2, 3, flipped(plan, 2, 3)}};
    run_game(plan, o);
    return out.str();
  };
  const auto a = trace(11);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, trace(11));
  EXPECT_NE(a, trace(12));
}

TEST(Audit, LowDiscountIsProfitable) {
  auto e = dilemma4();
  EquilibriumPlan plan(e.g, e.game, e.v, 0.7);
  const auto report = deviation_gain_audit(plan);
  EXPECT_GT(report.cases, 0);
  bool path = false;
  for (const auto& c : report.witnesses) path = path || c.window == "I";
  EXPECT_TRUE(path);
  EXPECT_FALSE(report.passed());
}

TEST(Audit, PathDeviationsUnprofitable) {
  auto e = dilemma4();
  EquilibriumPlan plan(e.g, e.game, e.v, audit_delta(e));
  const auto report = deviation_gain_audit(plan);
  for (const auto& c : report.witnesses) {
    if (c.window == "I") ADD_FAILURE() << "stage " << c.stage << " player " << c.player;
  }
}
