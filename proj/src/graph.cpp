#include "netfolk/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace netfolk {

namespace {

std::string edge_str(Player a, Player b) {
  return "[" + std::to_string(a) + "," + std::to_string(b) + "]";
}

void require_player(const Network& g, Player i) {
  if (!g.contains(i)) {
    throw GraphError("player " + std::to_string(i) + " out of range 1.." +
                     std::to_string(g.size()));
  }
}

}  // namespace

Network::Network(int n, const std::vector<std::pair<Player, Player>>& edges)
    : n_(n), adj_(static_cast<std::size_t>(n) + 1) {
  if (n < 1) throw GraphError("graph needs at least one vertex");
  matrix_.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0);
  for (auto [a, b] : edges) {
    if (a < 1 || a > n || b < 1 || b > n) {
      throw GraphError("edge " + edge_str(a, b) + " has an endpoint outside 1.." +
                       std::to_string(n));
    }
    if (a == b) throw GraphError("edge " + edge_str(a, b) + " is a self-loop");
    auto& cell = matrix_[static_cast<std::size_t>(a) * (n + 1) + b];
    if (cell) continue;
    cell = 1;
    matrix_[static_cast<std::size_t>(b) * (n + 1) + a] = 1;
    adj_[a].push_back(b);
    adj_[b].push_back(a);
    ++edge_count_;
  }
  for (auto& row : adj_) std::sort(row.begin(), row.end());
}

bool Network::adjacent(Player i, Player j) const {
  if (!contains(i) || !contains(j)) return false;
  return matrix_[static_cast<std::size_t>(i) * (n_ + 1) + j] != 0;
}

const std::vector<Player>& Network::neighbors(Player i) const {
  require_player(*this, i);
  return adj_[i];
}

std::vector<std::pair<Player, Player>> Network::edges() const {
  std::vector<std::pair<Player, Player>> out;
  out.reserve(edge_count_);
  for (Player i = 1; i <= n_; ++i) {
    for (Player j : adj_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

bool CycleWitness::contains(Player p) const {
  return std::find(vertices.begin(), vertices.end(), p) != vertices.end();
}

bool CycleWitness::valid_in(const Network& g) const {
  if (vertices.size() < 3) return false;
  std::set<Player> seen(vertices.begin(), vertices.end());
  if (seen.size() != vertices.size()) return false;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (!g.adjacent(vertices[k], vertices[(k + 1) % vertices.size()])) return false;
  }
  return true;
}

std::set<Player> neighbors(const Network& g, Player i) {
  const auto& nb = g.neighbors(i);
  return {nb.begin(), nb.end()};
}

Network remove_vertex(const Network& g, Player i, std::vector<Player>* relabel) {
  require_player(g, i);
  if (g.size() == 1) throw GraphError("cannot remove the only vertex");
  std::vector<Player> to_new(static_cast<std::size_t>(g.size()) + 1, 0);
  std::vector<Player> to_old(1, 0);
  for (Player v = 1; v <= g.size(); ++v) {
    if (v == i) continue;
    to_old.push_back(v);
    to_new[v] = static_cast<Player>(to_old.size()) - 1;
  }
  std::vector<std::pair<Player, Player>> edges;
  for (auto [a, b] : g.edges()) {
    if (a != i && b != i) edges.emplace_back(to_new[a], to_new[b]);
  }
  if (relabel) *relabel = to_old;
  return Network(g.size() - 1, edges);
}

bool is_connected(const Network& g) {
  const int n = g.size();
  if (n == 0) return true;
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Player> stack{1};
  seen[1] = 1;
  int count = 1;
  while (!stack.empty()) {
    Player u = stack.back();
    stack.pop_back();
    for (Player w : g.neighbors(u)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n;
}

std::vector<Player> articulation_points(const Network& g) {
  const int n = g.size();
  std::vector<int> disc(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> low(static_cast<std::size_t>(n) + 1, 0);
  std::vector<char> is_cut(static_cast<std::size_t>(n) + 1, 0);
  int timer = 0;

  // Iterative DFS; frame = (vertex, parent, next neighbor index, children).
  struct Frame {
    Player v;
    Player parent;
    std::size_t next;
    int children;
  };
  for (Player root = 1; root <= n; ++root) {
    if (disc[root]) continue;
    std::vector<Frame> stack{{root, 0, 0, 0}};
    disc[root] = low[root] = ++timer;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& nb = g.neighbors(f.v);
      if (f.next < nb.size()) {
        Player w = nb[f.next++];
        if (w == f.parent) continue;
        if (disc[w]) {
          low[f.v] = std::min(low[f.v], disc[w]);
        } else {
          disc[w] = low[w] = ++timer;
          ++f.children;
          stack.push_back({w, f.v, 0, 0});
        }
        continue;
      }
      Frame done = f;
      stack.pop_back();
      if (stack.empty()) {
        if (done.children > 1) is_cut[done.v] = 1;
      } else {
        Frame& parent = stack.back();
        low[parent.v] = std::min(low[parent.v], low[done.v]);
        if (parent.parent != 0 && low[done.v] >= disc[parent.v]) is_cut[parent.v] = 1;
      }
    }
  }
  std::vector<Player> out;
  for (Player v = 1; v <= n; ++v) {
    if (is_cut[v]) out.push_back(v);
  }
  return out;
}

bool is_two_connected(const Network& g) {
  if (g.size() < 2) throw GraphError("2-connectivity needs at least two vertices");
  return is_connected(g) && articulation_points(g).empty();
}

namespace {

// BFS from `from` over vertices not marked in `blocked`; `from` itself is
// always allowed.
std::vector<char> reachable(const Network& g, Player from,
                            const std::vector<char>& blocked) {
  std::vector<char> seen(static_cast<std::size_t>(g.size()) + 1, 0);
  std::queue<Player> q;
  q.push(from);
  seen[from] = 1;
  while (!q.empty()) {
    Player u = q.front();
    q.pop();
    for (Player w : g.neighbors(u)) {
      if (!seen[w] && !blocked[w]) {
        seen[w] = 1;
        q.push(w);
      }
    }
  }
  return seen;
}

}  // namespace

std::optional<CycleWitness> cycle_through(const Network& g, Player i, Player j) {
  require_player(g, i);
  require_player(g, j);
  if (i == j) throw GraphError("cycle_through needs two distinct players");
  const Player start = std::min(i, j);
  const Player other = std::max(i, j);

  std::vector<char> on_path(static_cast<std::size_t>(g.size()) + 1, 0);
  std::vector<Player> path{start};
  on_path[start] = 1;

  std::function<bool(Player)> dfs = [&](Player u) -> bool {
    const bool have_other = on_path[other] != 0;
    if (path.size() >= 3 && have_other && g.adjacent(u, start)) return true;
    // The walk must still be able to reach `other` (if missing) and close at
    // `start` through unvisited vertices.
    {
      std::vector<char> blocked = on_path;
      blocked[start] = 0;
      auto seen = reachable(g, u, blocked);
      if (!seen[start] && !g.adjacent(u, start)) return false;
      if (!have_other && !seen[other]) return false;
    }
    for (Player w : g.neighbors(u)) {
      if (on_path[w]) continue;
      on_path[w] = 1;
      path.push_back(w);
      if (dfs(w)) return true;
      path.pop_back();
      on_path[w] = 0;
    }
    return false;
  };

  if (dfs(start)) return CycleWitness{path};
  return std::nullopt;
}

int longest_cycle_length(const Network& g) {
  const int n = g.size();
  int best = 0;
  std::vector<char> on_path(static_cast<std::size_t>(n) + 1, 0);

  for (Player start = 1; start <= n && best < n; ++start) {
    // Cycles are enumerated from their smallest vertex.
    std::vector<char> blocked(static_cast<std::size_t>(n) + 1, 0);
    for (Player v = 1; v < start; ++v) blocked[v] = 1;

    std::function<void(Player, int)> dfs = [&](Player u, int depth) {
      if (best == n) return;
      if (depth >= 3 && depth > best && g.adjacent(u, start)) best = depth;
      std::vector<char> mask = blocked;
      for (Player v = 1; v <= n; ++v) {
        if (on_path[v]) mask[v] = 1;
      }
      mask[u] = 0;
      auto seen = reachable(g, u, mask);
      int extra = 0;
      for (Player v = 1; v <= n; ++v) {
        if (seen[v] && v != u) ++extra;
      }
      if (depth + extra <= best) return;
      for (Player w : g.neighbors(u)) {
        if (w <= start || on_path[w]) continue;
        on_path[w] = 1;
        dfs(w, depth + 1);
        on_path[w] = 0;
      }
    };
    on_path[start] = 1;
    dfs(start, 1);
    on_path[start] = 0;
  }
  if (best < 3) throw GraphError("no cycle; graph cannot be 2-connected");
  return best;
}

int distance(const Network& g, Player i, Player j) {
  require_player(g, i);
  require_player(g, j);
  if (i == j) return 0;
  std::vector<int> dist(static_cast<std::size_t>(g.size()) + 1, -1);
  std::queue<Player> q;
  dist[i] = 0;
  q.push(i);
  while (!q.empty()) {
    Player u = q.front();
    q.pop();
    for (Player w : g.neighbors(u)) {
      if (dist[w] >= 0) continue;
      dist[w] = dist[u] + 1;
      if (w == j) return dist[w];
      q.push(w);
    }
  }
  return kUnreachable;
}

std::vector<std::vector<int>> all_distances(const Network& g) {
  const int n = g.size();
  std::vector<std::vector<int>> d(static_cast<std::size_t>(n) + 1,
                                  std::vector<int>(static_cast<std::size_t>(n) + 1,
                                                   kUnreachable));
  for (Player s = 1; s <= n; ++s) {
    auto& row = d[s];
    row[s] = 0;
    std::queue<Player> q;
    q.push(s);
    while (!q.empty()) {
      Player u = q.front();
      q.pop();
      for (Player w : g.neighbors(u)) {
        if (row[w] != kUnreachable) continue;
        row[w] = row[u] + 1;
        q.push(w);
      }
    }
  }
  return d;
}

}  // namespace netfolk
