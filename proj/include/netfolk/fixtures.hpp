#pragma once

#include "netfolk/game.hpp"
#include "netfolk/graph.hpp"

namespace netfolk::fixtures {

Network path(int n);
Network cycle(int n);
Network complete(int n);
/// Hub 1 joined to every vertex of the rim cycle 2..n.
Network wheel(int n);
Network petersen();
/// Two hubs joined by internally disjoint paths with the given edge counts.
Network theta(const std::vector<int>& path_edges);
/// Two triangles sharing vertex 3: {1,2,3} and {3,4,5}.
Network two_triangles();

/// A 12-cycle c1..c12 (players 1..12) and a 16-cycle e1..e16 with
/// e4 = c6 and e14 = c8. The remaining e-vertices are players 13..26 in
/// the order e1, e2, e3, e5, ..., e13, e15, e16.
Network two_cycles();
/// Player index of e_m in two_cycles().
Player two_cycles_e(int m);

/// Network prisoner's dilemma: action 0 cooperates, 1 defects;
/// u_i = benefit * (cooperating neighbors) - cost * [i cooperates].
/// The hull is spanned by mutual cooperation, mutual defection, every
/// single defection and every lone cooperator.
StageGame network_dilemma(const Network& g, double benefit = 2.0, double cost = 1.0);

/// Dense version of network_dilemma (all profiles enumerated).
StageGame network_dilemma_dense(const Network& g, double benefit = 2.0, double cost = 1.0);

/// Ring of matching pennies on an even cycle: odd players want to match
/// their successor, even players to mismatch it; payoffs 0 or 1.
StageGame pennies_ring(int n = 4);

/// Convex combination of mutual cooperation (weight 1 - eps) and the
/// uniform average of single defections.
PayoffPoint dilemma_target(const StageGame& game, double eps = 0.1);

}  // namespace netfolk::fixtures
