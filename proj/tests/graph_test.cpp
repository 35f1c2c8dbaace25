#include <gtest/gtest.h>

#include "netfolk/fixtures.hpp"
#include "netfolk/graph.hpp"
#include "oracles.hpp"

using namespace netfolk;
namespace fx = netfolk::fixtures;

TEST(Network, RejectsBadEdges) {
  EXPECT_THROW(Network(3, {{1, 1}}), GraphError);
  EXPECT_THROW(Network(3, {{1, 4}}), GraphError);
  try {
    Network(3, {{0, 2}});
    FAIL();
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("[0,2]"), std::string::npos);
  }
  Network g(3, {{1, 2}, {2, 1}, {2, 3}});
  EXPECT_EQ(g.edge_count(), 2u);
}

TEST(Network, Neighbors) {
  const auto tri = fx::cycle(3);
  EXPECT_EQ(neighbors(tri, 1), (std::set<Player>{2, 3}));
  EXPECT_EQ(neighbors(fx::path(3), 1), (std::set<Player>{2}));
  EXPECT_THROW((void)tri.neighbors(4), GraphError);
  const auto fig = fx::two_cycles();
  EXPECT_EQ(neighbors(fig, 3), (std::set<Player>{2, 4}));
}

TEST(Network, RemoveVertex) {
  const auto tri = fx::cycle(3);
  const auto g = remove_vertex(tri, 3);
  EXPECT_EQ(g.size(), 2);
  EXPECT_TRUE(g.adjacent(1, 2));
  EXPECT_EQ(tri.size(), 3);
  const auto p = remove_vertex(fx::path(3), 2);
  EXPECT_EQ(p.edge_count(), 0u);
  EXPECT_FALSE(is_connected(p));
  EXPECT_THROW(remove_vertex(tri, 0), GraphError);
  const auto fig = fx::two_cycles();
  for (Player v = 1; v <= fig.size(); ++v) {
    if (fig.degree(v) == 2) EXPECT_TRUE(is_connected(remove_vertex(fig, v)));
  }
}

TEST(TwoConnected, Examples) {
  EXPECT_TRUE(is_two_connected(fx::cycle(3)));
  EXPECT_FALSE(is_two_connected(fx::path(3)));
  EXPECT_TRUE(is_two_connected(fx::two_cycles()));
  EXPECT_FALSE(is_two_connected(fx::two_triangles()));
  EXPECT_EQ(articulation_points(fx::two_triangles()), std::vector<Player>{3});
  EXPECT_TRUE(is_two_connected(fx::petersen()));
  EXPECT_TRUE(is_two_connected(fx::wheel(6)));
  EXPECT_TRUE(is_two_connected(fx::theta({2, 3, 4})));
  EXPECT_THROW(is_two_connected(Network(1, {})), GraphError);
}

TEST(TwoConnected, MatchesRemovalOracleOnAllSmallGraphs) {
  for (int n = 2; n <= 6; ++n) {
    const std::uint64_t count = std::uint64_t{1} << (n * (n - 1) / 2);
    for (std::uint64_t bits = 0; bits < count; ++bits) {
      const auto g = oracle::graph_from_bits(n, bits);
      ASSERT_EQ(is_two_connected(g), oracle::two_connected(g)) << "n=" << n << " bits=" << bits;
    }
  }
}

TEST(TwoConnected, ConsistentWithRemoveVertex) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 3 + trial % 7;
    const auto g = oracle::random_graph(n, 0.45, rng);
    bool all = is_connected(g);
    for (Player v = 1; v <= n && all; ++v) all = is_connected(remove_vertex(g, v));
    EXPECT_EQ(is_two_connected(g), all);
  }
}

TEST(CycleThrough, Examples) {
  auto c = cycle_through(fx::cycle(3), 1, 2);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->vertices, (std::vector<Player>{1, 2, 3}));
  EXPECT_FALSE(cycle_through(fx::two_triangles(), 1, 5));
  EXPECT_THROW(cycle_through(fx::cycle(3), 2, 2), GraphError);
  const auto fig = fx::two_cycles();
  auto w = cycle_through(fig, 3, fx::two_cycles_e(10));
  ASSERT_TRUE(w);
  EXPECT_TRUE(w->valid_in(fig));
  EXPECT_TRUE(w->contains(3));
  EXPECT_TRUE(w->contains(fx::two_cycles_e(10)));
}

TEST(CycleThrough, LexicographicallySmallest) {
  // K4 from 1: smallest sequence through 1 and 3 is 1-2-3.
  auto c = cycle_through(fx::complete(4), 3, 1);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->vertices, (std::vector<Player>{1, 2, 3}));
}

TEST(CycleThrough, EveryPairOnRandomTwoConnected) {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 150) {
    const int n = 3 + static_cast<int>(rng() % 7);
    const auto g = oracle::random_graph(n, 0.5, rng);
    if (!oracle::two_connected(g)) continue;
    ++checked;
    const int longest = longest_cycle_length(g);
    for (Player i = 1; i <= n; ++i) {
      for (Player j = i + 1; j <= n; ++j) {
        auto c = cycle_through(g, i, j);
        ASSERT_TRUE(c);
        EXPECT_TRUE(c->valid_in(g));
        EXPECT_TRUE(c->contains(i) && c->contains(j));
        EXPECT_LE(c->length(), longest);
      }
    }
  }
}

TEST(CycleThrough, MatchesOracleOnArbitraryGraphs) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 6;
    const auto g = oracle::random_graph(n, 0.4, rng);
    for (Player i = 1; i <= n; ++i) {
      for (Player j = i + 1; j <= n; ++j) {
        EXPECT_EQ(cycle_through(g, i, j).has_value(), oracle::cycle_exists(g, i, j));
      }
    }
  }
}

TEST(LongestCycle, Examples) {
  EXPECT_EQ(longest_cycle_length(fx::cycle(12)), 12);
  EXPECT_EQ(longest_cycle_length(fx::complete(4)), 4);
  EXPECT_EQ(longest_cycle_length(fx::two_cycles()), 20);
  EXPECT_EQ(longest_cycle_length(fx::petersen()), 9);
  EXPECT_EQ(longest_cycle_length(fx::two_triangles()), 3);
  EXPECT_THROW(longest_cycle_length(fx::path(4)), GraphError);
}

TEST(LongestCycle, MatchesSubsetOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 3 + trial % 7;
    const auto g = oracle::random_graph(n, 0.35 + 0.1 * (trial % 4), rng);
    const int expect = oracle::longest_cycle(g);
    if (expect == 0) {
      EXPECT_THROW(longest_cycle_length(g), GraphError);
    } else {
      EXPECT_EQ(longest_cycle_length(g), expect);
    }
  }
}

TEST(Distance, Examples) {
  EXPECT_EQ(distance(fx::cycle(3), 1, 1), 0);
  EXPECT_EQ(distance(fx::path(3), 1, 3), 2);
  EXPECT_EQ(distance(fx::cycle(12), 1, 7), 6);
  EXPECT_EQ(distance(Network(3, {{1, 2}}), 1, 3), kUnreachable);
  const auto d = all_distances(fx::petersen());
  for (Player i = 1; i <= 10; ++i) {
    for (Player j = 1; j <= 10; ++j) EXPECT_EQ(d[i][j], distance(fx::petersen(), i, j));
  }
}
