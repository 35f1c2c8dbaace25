#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "netfolk/game.hpp"
#include "netfolk/protocol.hpp"

namespace netfolk {

enum class Phase { I, II, III, IVStart, IV, Fallback };
std::string phase_name(Phase p);

/// Stages of the punishment and reward triggered by one deviation.
struct PunishmentSchedule {
  DeviationId cause;
  long s3 = 0;  // first punishment stage, t0 + L + 1
  long s4 = 0;  // first reward stage (arbitrary action), t0 + L + T + 1
  long s5 = 0;  // compensated reward from here on, t0 + 2L + T + 1
};

/// Action regime prescribed at a stage by the set of known deviations.
struct Regime {
  Phase phase = Phase::I;  // I, III, IVStart or IV
  std::optional<PunishmentSchedule> schedule;
  [[nodiscard]] Player target() const { return schedule ? schedule->cause.deviator : 0; }
};

/// Everything the players agree on before play: the game, the target, the
/// thresholds and the shared deterministic paths.
class EquilibriumPlan {
 public:
  /// Throws GameError / ProtocolError when the hypotheses fail, unless
  /// `stress` (which skips the 2-connectivity check).
  EquilibriumPlan(const Network& g, StageGame game, PayoffPoint v, double delta,
                  ProtocolConfig protocol = {}, bool stress = false);

  [[nodiscard]] const ProtocolContext& protocol() const { return *ctx_; }
  [[nodiscard]] const Network& graph() const { return ctx_->graph; }
  [[nodiscard]] const StageGame& game() const { return game_; }
  [[nodiscard]] const PayoffPoint& v() const { return v_; }
  [[nodiscard]] double delta() const { return delta_; }
  [[nodiscard]] long L() const { return ctx_->L; }
  [[nodiscard]] int players() const { return game_.players(); }
  [[nodiscard]] const Thresholds& thresholds() const { return th_; }
  [[nodiscard]] const MinmaxCertificate& minmax(Player k) const { return certs_.at(k - 1); }
  /// Minmax levels (the normalization offsets).
  [[nodiscard]] const std::vector<double>& minmax_values() const { return offsets_; }
  [[nodiscard]] int T(Player k) const { return th_.T.at(k - 1); }

  [[nodiscard]] PunishmentSchedule schedule(const DeviationId& d) const;
  /// Regime after the deviations in `known`: the latest one whose
  /// punishment has started governs.
  [[nodiscard]] Regime regime(const std::vector<DeviationId>& known, long t) const;

  /// Reward target v' + rho (1 - e_k) in game units.
  [[nodiscard]] PayoffPoint reward_target(Player k) const;
  /// Actions player i may play while k is punished (k: its best response).
  [[nodiscard]] std::vector<int> support(Player i, Player k) const;
  [[nodiscard]] bool mixes(Player i, Player k) const { return support(i, k).size() > 1; }
  /// Draws player i's punishment action from its minmax mixture against k
  /// with uniform variate u in [0,1).
  [[nodiscard]] int draw(Player i, Player k, double u) const;
  /// Expected payoff of every player while k is punished and all conform.
  [[nodiscard]] const PayoffPoint& punishment_payoff(Player k) const;

  TargetPath& main_path() { return *main_; }
  TargetPath& reward_path(Player k);
  /// Path for a compensated reward target, shared across players.
  TargetPath& compensated_path(const DeviationId& d, const PayoffPoint& target);

 private:
  std::shared_ptr<ProtocolContext> ctx_;
  StageGame game_;
  PayoffPoint v_;
  double delta_;
  std::vector<double> offsets_;
  std::vector<MinmaxCertificate> certs_;
  Thresholds th_;
  std::unique_ptr<TargetPath> main_;
  std::map<Player, std::unique_ptr<TargetPath>> reward_;
  std::map<std::pair<DeviationId, PayoffPoint>, std::unique_ptr<TargetPath>> compensated_;
  std::vector<PayoffPoint> punish_payoff_;
};

enum class Accounting {
  Realized,  // realized stage payoffs, compensated rewards
  Expected,  // conforming punishers' draws replaced by their mixtures, no compensation
};

/// Equilibrium strategy of one player over its private history.
class PlayerAgent {
 public:
  PlayerAgent(EquilibriumPlan& plan, Player self, std::uint64_t seed,
              Accounting accounting = Accounting::Realized);

  [[nodiscard]] Player self() const { return self_; }
  [[nodiscard]] Regime regime(long t) const;
  /// Phase tag at stage t (Phase II overlays Phase I while a protocol runs).
  [[nodiscard]] Phase phase(long t) const;
  [[nodiscard]] bool fallback() const { return fallback_; }

  /// Prescribed action of the player at stage t; `u` is its punishment
  /// draw (ignored outside punishment).
  int choose_action(long t, double u);
  /// True iff `action` by player j at stage t conforms to this player's view.
  [[nodiscard]] bool conforms(long t, Player j, int action);

  ProtocolMessage compose(long t);
  void record_sent(long t, const ProtocolMessage& sent) { proto_.record_sent(t, sent); }
  void receive(long t, const std::map<Player, ProtocolMessage>& inbox);
  /// Actions of the closed neighborhood at stage t.
  void observe(long t, const std::map<Player, int>& actions);
  void end_stage(long t) { proto_.end_stage(t); }

  /// Continuation value at stage t of the path regime in force there.
  /// Empty during punishment or at the arbitrary reward stage.
  [[nodiscard]] std::optional<PayoffPoint> continuation(long t);

  [[nodiscard]] ProtocolPlayer& protocol() { return proto_; }
  [[nodiscard]] const ProtocolPlayer& protocol() const { return proto_; }
  /// Punishment action sequences starting at stage `from` known so far,
  /// per player.
  [[nodiscard]] std::map<Player, ActionReport> reports(long from) const;
  [[nodiscard]] long missing_reports() const { return missing_reports_; }

 private:
  [[nodiscard]] int prescribed(long t, Player j, const Regime& r);
  /// Compensated reward target from s5 on; empty when no compensation is due.
  const std::optional<PayoffPoint>& compensated_target(const PunishmentSchedule& s);

  EquilibriumPlan* plan_;
  Player self_;
  Accounting accounting_;
  ProtocolPlayer proto_;
  bool fallback_ = false;
  int fallback_action_ = 0;
  std::map<long, std::map<Player, int>> observed_;
  std::map<long, std::map<Player, ActionReport>> reports_;
  std::vector<ActionReport> relay_reports_;
  std::map<DeviationId, std::optional<PayoffPoint>> comp_targets_;
  long missing_reports_ = 0;
};

}  // namespace netfolk
