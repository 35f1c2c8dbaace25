#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "netfolk/config.hpp"

using namespace netfolk;
using nlohmann::json;

TEST(Config, ExplicitGraph) {
  const auto g = parse_graph(json::parse(R"({"n": 4, "edges": [[1,2],[2,3],[3,4],[4,1]]})"));
  EXPECT_EQ(g.size(), 4);
  EXPECT_EQ(g.edge_count(), 4u);
  EXPECT_TRUE(g.adjacent(4, 1));
  EXPECT_THROW(parse_graph(json::parse(R"({"fixture": "moebius"})")), ConfigError);
}

TEST(Config, DenseGame) {
  const auto g = parse_graph(json::parse(R"({"fixture": "complete", "n": 2})"));
  const auto game = parse_game(
      json::parse(R"({"actions": [2, 2], "payoffs": [[1,1],[0,2],[2,0],[0,0]]})"), g);
  EXPECT_DOUBLE_EQ(game.payoff(1, {1, 0}), 2.0);
  EXPECT_DOUBLE_EQ(game.payoff(2, {0, 1}), 2.0);
}

TEST(Config, RunDefaults) {
  const auto c = parse_run_config(json::parse(R"({
    "graph": {"fixture": "cycle", "n": 5}, "game": {"fixture": "dilemma"},
    "adversary": {"deviation": {"player": 2, "stage": 3},
                  "liars": [{"stage": 5, "player": 4,
                             "directives": [{"kind": "fake_claim", "claim": {"player": 1, "period": 2}},
                                            {"kind": "omit", "target": 3}]}]}})"));
  EXPECT_EQ(c.v.size(), 5u);
  EXPECT_FALSE(c.delta);
  ASSERT_EQ(c.deviations.size(), 1u);
  EXPECT_EQ(c.deviations[0].action, -1);
  ASSERT_EQ(c.lies.liars.at(5).size(), 1u);
  const auto& d = c.lies.liars.at(5)[0].directives;
  EXPECT_EQ(d[0].kind, LieDirective::Kind::FakeClaim);
  EXPECT_EQ(d[0].claim, (DeviationId{1, 2}));
  EXPECT_EQ(d[1].target, 3);

  auto plan = make_plan(c);
  EXPECT_GT(plan.delta(), plan.thresholds().delta_bar);
  const auto dev = resolve_deviations(plan, c);
  EXPECT_NE(dev[0].action, plan.main_path().profile(3)[1]);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_run_config(json::parse(
                   R"({"graph": {"fixture": "cycle", "n": 4}, "game": {"fixture": "pennies"}})")),
               ConfigError);
  EXPECT_THROW(parse_run_config(json::parse(
                   R"({"graph": {"fixture": "cycle", "n": 4}, "game": {"fixture": "dilemma"}, "mode": "loose"})")),
               ConfigError);
  EXPECT_THROW(parse_campaign(json::parse(R"({"fixtures": []})")), ConfigError);
  EXPECT_THROW(parse_campaign(json::parse(R"({"graph": 1})")), ConfigError);
  EXPECT_THROW(parse_campaign(json::parse(R"({"fixtures": [{"graph": {"fixture": "cycle", "n": 4},
                 "game": {"fixture": "dilemma"}}], "verifiers": ["nonsense"]})")),
               ConfigError);
}

TEST(Config, CutVertexRejectedBeforeRuns) {
  auto c = parse_campaign(json::parse(R"({"seeds": 5, "fixtures": [
      {"graph": {"fixture": "cycle", "n": 5}, "game": {"fixture": "dilemma"}},
      {"graph": {"fixture": "two_triangles"}, "game": {"fixture": "dilemma"}}]})"));
  EXPECT_THROW(run_campaign(c), ProtocolError);
}

TEST(Campaign, SmallPasses) {
  auto c = parse_campaign(json::parse(R"({"seeds": 40, "threads": 2, "exhaustive": true, "fixtures": [
      {"name": "c5", "graph": {"fixture": "cycle", "n": 5}, "game": {"fixture": "dilemma", "dense": true}}]})"));
  const auto r = run_campaign(c);
  EXPECT_TRUE(r.passed());
  ASSERT_EQ(r.entries.size(), 4u);
  EXPECT_EQ(r.to_json().at("pass"), true);
}

TEST(Campaign, StressFailuresAreSeparated) {
  auto c = parse_campaign(json::parse(R"({"seeds": 10, "fixtures": [
      {"mode": "stress", "n_prime": 5, "graph": {"fixture": "two_triangles"},
       "game": {"fixture": "dilemma"}}], "verifiers": ["deadline"]})"));
  const auto r = run_campaign(c);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].second.violations, 0);
  EXPECT_GT(r.entries[0].second.out_of_hypothesis, 0);
}

TEST(Campaign, ThreadCountDoesNotChangeResults) {
  auto c = parse_campaign(json::parse(R"({"seeds": 30, "greedy": false, "fixtures": [
      {"graph": {"fixture": "wheel", "n": 6}, "game": {"fixture": "dilemma"}}],
      "verifiers": ["block_progress"]})"));
  c.threads = 1;
  const auto a = run_campaign(c).to_json().dump();
  c.threads = 3;
  EXPECT_EQ(a, run_campaign(c).to_json().dump());
}
