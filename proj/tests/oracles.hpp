#pragma once

// Brute-force reference implementations used only by tests.

#include <cstdint>
#include <random>
#include <vector>

#include "netfolk/graph.hpp"

namespace oracle {

using netfolk::Network;
using netfolk::Player;

inline bool connected_without(const Network& g, Player skip) {
  const int n = g.size();
  Player start = 0;
  int alive = 0;
  for (Player v = 1; v <= n; ++v) {
    if (v != skip) {
      ++alive;
      if (!start) start = v;
    }
  }
  if (alive <= 1) return true;
  std::vector<char> seen(n + 1, 0);
  std::vector<Player> stack{start};
  seen[start] = 1;
  int count = 1;
  while (!stack.empty()) {
    Player u = stack.back();
    stack.pop_back();
    for (Player w = 1; w <= n; ++w) {
      if (w != skip && !seen[w] && g.adjacent(u, w)) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == alive;
}

inline bool two_connected(const Network& g) {
  if (!connected_without(g, 0)) return false;
  for (Player v = 1; v <= g.size(); ++v) {
    if (g.size() > 2 && !connected_without(g, v)) return false;
  }
  return true;
}

// ham[mask] is true when the induced subgraph on mask (size >= 3) has a
// Hamiltonian cycle. Held-Karp over subsets anchored at the lowest vertex.
inline std::vector<char> hamiltonian_subsets(const Network& g) {
  const int n = g.size();
  const std::uint32_t full = 1u << n;
  std::vector<char> ham(full, 0);
  std::vector<std::uint32_t> reach(full, 0);  // reach[mask]: bitmask of path ends
  for (int s = 0; s < n; ++s) reach[1u << s] = 1u << s;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    if (!reach[mask]) continue;
    const int low = __builtin_ctz(mask);
    for (int v = 0; v < n; ++v) {
      if (!(reach[mask] >> v & 1)) continue;
      if (__builtin_popcount(mask) >= 3 && g.adjacent(v + 1, low + 1)) ham[mask] = 1;
      for (int w = low + 1; w < n; ++w) {
        if (mask >> w & 1) continue;
        if (g.adjacent(v + 1, w + 1)) reach[mask | (1u << w)] |= 1u << w;
      }
    }
  }
  return ham;
}

inline int longest_cycle(const Network& g) {
  const auto ham = hamiltonian_subsets(g);
  int best = 0;
  for (std::uint32_t m = 0; m < ham.size(); ++m) {
    if (ham[m]) best = std::max(best, __builtin_popcount(m));
  }
  return best;
}

// Is there a cycle containing both i and j?
inline bool cycle_exists(const Network& g, Player i, Player j) {
  const auto ham = hamiltonian_subsets(g);
  const std::uint32_t need = (1u << (i - 1)) | (1u << (j - 1));
  for (std::uint32_t m = 0; m < ham.size(); ++m) {
    if (ham[m] && (m & need) == need) return true;
  }
  return false;
}

inline Network random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<Player, Player>> e;
  for (Player a = 1; a <= n; ++a) {
    for (Player b = a + 1; b <= n; ++b) {
      if (coin(rng)) e.emplace_back(a, b);
    }
  }
  return Network(n, e);
}

inline Network graph_from_bits(int n, std::uint64_t bits) {
  std::vector<std::pair<Player, Player>> e;
  int pos = 0;
  for (Player a = 1; a <= n; ++a) {
    for (Player b = a + 1; b <= n; ++b, ++pos) {
      if (bits >> pos & 1) e.emplace_back(a, b);
    }
  }
  return Network(n, e);
}

}  // namespace oracle
