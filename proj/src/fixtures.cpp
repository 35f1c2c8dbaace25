#include "netfolk/fixtures.hpp"

#include <algorithm>

namespace netfolk::fixtures {

Network path(int n) {
  std::vector<std::pair<Player, Player>> e;
  for (Player i = 1; i < n; ++i) e.emplace_back(i, i + 1);
  return Network(n, e);
}

Network cycle(int n) {
  if (n < 3) throw GraphError("a cycle needs at least 3 vertices");
  std::vector<std::pair<Player, Player>> e;
  for (Player i = 1; i <= n; ++i) e.emplace_back(i, i % n + 1);
  return Network(n, e);
}

Network complete(int n) {
  std::vector<std::pair<Player, Player>> e;
  for (Player i = 1; i <= n; ++i) {
    for (Player j = i + 1; j <= n; ++j) e.emplace_back(i, j);
  }
  return Network(n, e);
}

Network wheel(int n) {
  if (n < 4) throw GraphError("a wheel needs at least 4 vertices");
  std::vector<std::pair<Player, Player>> e;
  for (Player i = 2; i <= n; ++i) {
    e.emplace_back(1, i);
    e.emplace_back(i, i == n ? 2 : i + 1);
  }
  return Network(n, e);
}

Network petersen() {
  std::vector<std::pair<Player, Player>> e;
  for (Player i = 0; i < 5; ++i) {
    e.emplace_back(i + 1, (i + 1) % 5 + 1);          // outer
    e.emplace_back(i + 6, (i + 2) % 5 + 6);          // inner pentagram
    e.emplace_back(i + 1, i + 6);                    // spokes
  }
  return Network(10, e);
}

Network theta(const std::vector<int>& path_edges) {
  int n = 2;
  std::vector<std::pair<Player, Player>> e;
  for (int len : path_edges) {
    if (len < 1) throw GraphError("theta path needs at least one edge");
    Player prev = 1;
    for (int s = 1; s < len; ++s) {
      ++n;
      e.emplace_back(prev, n);
      prev = n;
    }
    e.emplace_back(prev, 2);
  }
  return Network(n, e);
}

Network two_triangles() {
  return Network(5, {{1, 2}, {2, 3}, {1, 3}, {3, 4}, {4, 5}, {3, 5}});
}

Player two_cycles_e(int m) {
  if (m < 1 || m > 16) throw GraphError("e index out of range");
  if (m == 4) return 6;
  if (m == 14) return 8;
  if (m <= 3) return 12 + m;
  if (m <= 13) return 11 + m;
  return 10 + m;
}

Network two_cycles() {
  std::vector<std::pair<Player, Player>> e;
  for (Player i = 1; i <= 12; ++i) e.emplace_back(i, i % 12 + 1);
  for (int m = 1; m <= 16; ++m) e.emplace_back(two_cycles_e(m), two_cycles_e(m % 16 + 1));
  return Network(26, e);
}

namespace {

LocalPayoff dilemma_local(const Network& g, Player i, double benefit, double cost) {
  LocalPayoff lp;
  lp.scope = g.neighbors(i);
  lp.scope.push_back(i);
  std::sort(lp.scope.begin(), lp.scope.end());
  const std::size_t k = lp.scope.size();
  lp.table.resize(std::size_t{1} << k);
  for (std::size_t idx = 0; idx < lp.table.size(); ++idx) {
    double u = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
      const bool cooperates = ((idx >> (k - 1 - s)) & 1u) == 0;
      if (!cooperates) continue;
      u += lp.scope[s] == i ? -cost : benefit;
    }
    lp.table[idx] = u;
  }
  return lp;
}

}  // namespace

StageGame network_dilemma(const Network& g, double benefit, double cost) {
  const int n = g.size();
  std::vector<LocalPayoff> local;
  for (Player i = 1; i <= n; ++i) local.push_back(dilemma_local(g, i, benefit, cost));
  std::vector<ActionProfile> hull{ActionProfile(n, 0), ActionProfile(n, 1)};
  for (int flip = 0; flip < 2; ++flip) {
    for (Player i = 1; i <= n; ++i) {
      ActionProfile a(n, flip);
      a[i - 1] = 1 - flip;
      hull.push_back(a);
    }
  }
  return StageGame::local(std::vector<int>(n, 2), std::move(local), std::move(hull));
}

StageGame network_dilemma_dense(const Network& g, double benefit, double cost) {
  const int n = g.size();
  std::vector<LocalPayoff> local;
  for (Player i = 1; i <= n; ++i) local.push_back(dilemma_local(g, i, benefit, cost));
  return StageGame::local(std::vector<int>(n, 2), std::move(local));
}

StageGame pennies_ring(int n) {
  if (n < 2 || n % 2) throw GameError("pennies ring needs an even number of players");
  std::vector<PayoffPoint> payoffs;
  for (const auto& a : enumerate_profiles(std::vector<int>(n, 2))) {
    PayoffPoint u(n);
    for (int i = 0; i < n; ++i) {
      const bool same = a[i] == a[(i + 1) % n];
      u[i] = (i % 2 == 0) == same ? 1.0 : 0.0;
    }
    payoffs.push_back(std::move(u));
  }
  return StageGame::dense(std::vector<int>(n, 2), payoffs);
}

PayoffPoint dilemma_target(const StageGame& game, double eps) {
  const int n = game.players();
  PayoffPoint v = game.payoffs(ActionProfile(n, 0));
  for (double& x : v) x *= 1.0 - eps;
  for (Player i = 1; i <= n; ++i) {
    ActionProfile a(n, 0);
    a[i - 1] = 1;
    const auto u = game.payoffs(a);
    for (int p = 0; p < n; ++p) v[p] += eps / n * u[p];
  }
  return v;
}

}  // namespace netfolk::fixtures
