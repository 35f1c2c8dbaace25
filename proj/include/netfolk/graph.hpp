#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace netfolk {

/// Players are numbered 1..n throughout the library.
using Player = int;

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Undirected simple graph on vertices 1..n. Immutable after construction.
class Network {
 public:
  Network() = default;

  /// Throws GraphError naming the offending edge on self-loops or
  /// out-of-range endpoints. Duplicate edges (in either orientation) are
  /// collapsed.
  Network(int n, const std::vector<std::pair<Player, Player>>& edges);

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] bool contains(Player i) const { return i >= 1 && i <= n_; }
  [[nodiscard]] bool adjacent(Player i, Player j) const;

  /// Sorted neighbor list; throws GraphError on an out-of-range player.
  [[nodiscard]] const std::vector<Player>& neighbors(Player i) const;
  [[nodiscard]] int degree(Player i) const {
    return static_cast<int>(neighbors(i).size());
  }

  /// Edges as (i, j) with i < j, lexicographically sorted.
  [[nodiscard]] std::vector<std::pair<Player, Player>> edges() const;
  [[nodiscard]] std::size_t edge_count() const { return edge_count_; }

  friend bool operator==(const Network& a, const Network& b) {
    return a.n_ == b.n_ && a.adj_ == b.adj_;
  }

 private:
  int n_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<std::vector<Player>> adj_;  // index 0 unused
  std::vector<std::uint8_t> matrix_;      // (n+1)^2 adjacency bitmap
};

/// A simple cycle given as a closed vertex sequence (last wraps to first).
struct CycleWitness {
  std::vector<Player> vertices;

  [[nodiscard]] int length() const { return static_cast<int>(vertices.size()); }
  [[nodiscard]] bool contains(Player p) const;
  /// True if the sequence is a simple cycle of length >= 3 in g.
  [[nodiscard]] bool valid_in(const Network& g) const;
};

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

std::set<Player> neighbors(const Network& g, Player i);

/// G_{-i}: the graph with vertex i removed. Remaining vertices keep their
/// relative order and are renumbered 1..n-1; `relabel` (if given) receives
/// the new-index -> old-index map (slot 0 unused).
Network remove_vertex(const Network& g, Player i,
                      std::vector<Player>* relabel = nullptr);

bool is_connected(const Network& g);

/// Vertices whose removal disconnects g (Tarjan low-link).
std::vector<Player> articulation_points(const Network& g);

bool is_two_connected(const Network& g);

/// Lexicographically smallest cycle (as a vertex sequence starting at
/// min(i, j)) that passes through both i and j.
std::optional<CycleWitness> cycle_through(const Network& g, Player i, Player j);

/// Vertex count of the longest simple cycle. Exhaustive search, fine for
/// sparse graphs or n up to ~15. Throws GraphError on an acyclic graph.
int longest_cycle_length(const Network& g);

/// BFS hop count, kUnreachable when disconnected.
int distance(const Network& g, Player i, Player j);

/// All-pairs hop distances, indexed [i][j] with 1-based players.
std::vector<std::vector<int>> all_distances(const Network& g);

}  // namespace netfolk
