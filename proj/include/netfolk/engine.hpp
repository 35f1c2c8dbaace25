#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "netfolk/simulator.hpp"
#include "netfolk/strategy.hpp"

namespace netfolk {

/// Player `player` plays `action` at `stage` whatever the strategy says.
struct ActionDeviation {
  Player player = 0;
  long stage = 0;
  int action = 0;
};

struct GameRunOptions {
  long horizon = 0;  // 0: past the last reward switch of every scripted deviation
  std::uint64_t seed = 1;
  RunMode mode = RunMode::Unilateral;
  Accounting accounting = Accounting::Realized;
  TraceWriter trace;
  std::vector<ActionDeviation> deviations;
  /// Message lies and announcements; its `deviation` field is ignored.
  AdversaryScript lies;
  /// Forced punishment draw of a mixing punisher at a stage, if any.
  std::function<std::optional<int>(Player, long)> draws;
};

struct PhaseEvent {
  long stage;
  Player player;
  Phase from;
  Phase to;
};

struct GameRun {
  long horizon = 0;
  std::vector<ActionProfile> actions;   // actions[t-1]
  std::vector<PayoffPoint> payoffs;     // per the accounting mode
  std::vector<int> knowers;             // players knowing the first scripted deviation
  std::vector<PhaseEvent> transitions;
  /// Normalized discounted payoff including the closed-form tail.
  PayoffPoint total;
  bool tail_closed = false;
  bool unilateral = true;
  bool fallback = false;
  long lies_detected = 0;
  long missing_reports = 0;
};

/// Plays the repeated game with the equilibrium strategies.
GameRun run_game(EquilibriumPlan& plan, const GameRunOptions& options);

struct AuditCase {
  Player player = 0;
  long stage = 0;
  int action = 0;
  std::string window;
  double gain = 0.0;   // (U_dev - U_conf) / ((1 - delta) delta^(stage-1))
  double bound = 0.0;  // analytic upper bound for the window
};

struct AuditReport {
  long cases = 0;
  long profitable = 0;      // gain >= -margin
  long bound_exceeded = 0;  // simulated gain above the analytic bound
  double worst_gain = -1e300;
  std::vector<AuditCase> witnesses;  // profitable cases, then the worst one
  [[nodiscard]] bool passed() const { return cases > 0 && profitable == 0; }
};

/// Enumerates single-stage pure-action deviations of every player in the
/// first two path stages, the first and last punishment stages and the
/// first three reward stages (the latter after a deviation by `context` at
/// stage 1), under expected accounting.
AuditReport deviation_gain_audit(EquilibriumPlan& plan, Player context = 1,
                                 double margin = 1e-6, std::uint64_t seed = 1);

}  // namespace netfolk
