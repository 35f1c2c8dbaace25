#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netfolk/graph.hpp"

namespace netfolk {

class GameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pure action profile; entry p-1 is player p's action index (0-based).
using ActionProfile = std::vector<int>;

/// Payoff vector in R^n; entry p-1 belongs to player p.
using PayoffPoint = std::vector<double>;

/// Per-player probability vectors; entry p-1 is player p's mixture.
using MixedProfile = std::vector<std::vector<double>>;

/// Payoff of one player as a table over the actions of the players in its
/// scope (always including the player itself). A dense normal-form game is
/// the special case where every scope is the full player set.
struct LocalPayoff {
  std::vector<Player> scope;  // sorted ascending
  std::vector<double> table;  // mixed radix over scope, last scope player fastest
};

class StageGame {
 public:
  StageGame() = default;

  /// Dense game: payoffs[index] is u(a) for the profile with that mixed-radix
  /// index (player n fastest).
  static StageGame dense(std::vector<int> action_counts,
                         const std::vector<PayoffPoint>& payoffs);

  /// Graphical game. `hull_profiles` lists the pure profiles used for
  /// convex-hull computations when the full profile space is too large to
  /// enumerate; an empty list means "enumerate everything".
  static StageGame local(std::vector<int> action_counts, std::vector<LocalPayoff> payoffs,
                         std::vector<ActionProfile> hull_profiles = {});

  [[nodiscard]] int players() const { return static_cast<int>(actions_.size()); }
  [[nodiscard]] int actions(Player i) const { return actions_.at(i - 1); }
  [[nodiscard]] const std::vector<int>& action_counts() const { return actions_; }
  [[nodiscard]] const std::vector<Player>& scope(Player i) const {
    return local_.at(i - 1).scope;
  }
  [[nodiscard]] const LocalPayoff& local_payoff(Player i) const { return local_.at(i - 1); }

  [[nodiscard]] double payoff(Player i, const ActionProfile& a) const;
  [[nodiscard]] PayoffPoint payoffs(const ActionProfile& a) const;

  /// Expected payoff of player i under independent mixing.
  [[nodiscard]] double expected_payoff(Player i, const MixedProfile& x) const;

  /// Greatest one-shot payoff of player i.
  [[nodiscard]] double max_payoff(Player i) const;
  [[nodiscard]] double max_abs_payoff() const;

  /// Profiles spanning the feasible set used by every hull computation.
  [[nodiscard]] const std::vector<ActionProfile>& hull_profiles() const {
    return *hull_profiles_;
  }
  [[nodiscard]] const std::vector<PayoffPoint>& hull_points() const { return *hull_points_; }
  /// False when hull_profiles is a caller-supplied subset of A, in which case
  /// hull membership answers are sound only in the positive direction.
  [[nodiscard]] bool hull_exhaustive() const { return hull_exhaustive_; }

  /// Same game with u_i replaced by u_i - offsets[i-1].
  [[nodiscard]] StageGame shifted(const std::vector<double>& offsets) const;

 private:
  void finish(std::vector<ActionProfile> hull_profiles);
  [[nodiscard]] std::size_t local_index(Player i, const ActionProfile& a) const;

  std::vector<int> actions_;
  std::vector<LocalPayoff> local_;
  std::shared_ptr<const std::vector<ActionProfile>> hull_profiles_;
  std::shared_ptr<const std::vector<PayoffPoint>> hull_points_;
  bool hull_exhaustive_ = true;
};

/// Every pure profile of the game in mixed-radix order; throws GameError if
/// there are more than `cap`.
std::vector<ActionProfile> enumerate_profiles(const std::vector<int>& action_counts,
                                              std::size_t cap = 1u << 20);

struct MinmaxCertificate {
  Player target = 0;
  double value = 0.0;
  /// Punishers' mixtures; the target's slot holds its pure best response.
  /// Players outside the target's payoff scope are assigned pure action 0.
  MixedProfile punisher_profile;
  double best_response_value = 0.0;
  int best_response_action = 0;
  /// Correlated-punishment lower bound on the independent minmax.
  double lower_bound = 0.0;
  bool exact = false;
};

MinmaxCertificate minmax(const StageGame& game, Player k);
std::vector<MinmaxCertificate> minmax_all(const StageGame& game);

/// Shift payoffs so every minmax level is zero.
StageGame normalize(const StageGame& game);

/// Barycentric weights over game.hull_points() reproducing v, if v lies in
/// the convex hull. The weights come from a basic LP solution, so at most
/// n+1 of them are nonzero.
std::optional<std::vector<double>> hull_weights(const StageGame& game, const PayoffPoint& v,
                                                double tol = 1e-9);

bool feasible_ir(const StageGame& game, const PayoffPoint& v);
bool interior_nonempty(const StageGame& game);

/// Normalized discounted sum (1-d) sum_t d^(t-1) u_t + d^T * tail.
PayoffPoint discounted_payoff(const std::vector<PayoffPoint>& stage_payoffs, double delta,
                              const std::optional<PayoffPoint>& tail = std::nullopt);

/// Deterministic pure-action path whose discounted value is exactly the
/// target. The continuation value w_t is tracked as a convex combination of
/// hull payoffs; each stage plays the hull profile whose removal leaves the
/// feasible continuation closest to the target.
class TargetPath {
 public:
  TargetPath(const StageGame& game, PayoffPoint target, double delta);

  /// Profile prescribed at stage t (1-based), generated on demand. Throws
  /// GameError if no feasible continuation exists.
  const ActionProfile& profile(long t);
  /// Index into game.hull_profiles() of the stage-t profile.
  int profile_index(long t);
  /// Exact continuation value from stage t onward.
  PayoffPoint continuation(long t);

  [[nodiscard]] const PayoffPoint& target() const { return target_; }
  [[nodiscard]] double delta() const { return delta_; }
  [[nodiscard]] std::size_t support_size() const { return support_size_; }
  [[nodiscard]] long generated() const { return static_cast<long>(chosen_.size()); }

 private:
  using Weights = std::vector<std::pair<int, double>>;  // (hull index, weight)

  void extend_to(long t);
  [[nodiscard]] std::optional<Weights> sparse_weights(const PayoffPoint& v) const;
  [[nodiscard]] PayoffPoint point_of(const Weights& w) const;

  StageGame game_;
  PayoffPoint target_;
  double delta_;
  std::size_t support_size_ = 0;
  std::vector<Weights> weights_;  // weights_[t-1]: decomposition of w_t
  std::vector<int> chosen_;       // chosen_[t-1]: hull index played at t
};

struct TargetSequence {
  std::vector<ActionProfile> profiles;
  /// |discounted value of the emitted prefix plus exact tail - v|_inf.
  double total_error = 0.0;
  /// max_t |w_t - v|_inf over the emitted horizon.
  double max_continuation_error = 0.0;
  bool within_epsilon = false;
};

/// Throws GameError when v is infeasible or delta is outside
/// [max(1/2, 1/n), 1) or below the barycentric bound of v's support.
TargetSequence target_sequence(const StageGame& game, const PayoffPoint& v, double delta,
                             long horizon, double epsilon);

/// Gain expressions used for the discount threshold.
struct GainTerms {
  double vbar;    // greatest one-shot payoff
  double v;       // target payoff
  double vprime;  // post-punishment payoff
  double rho;     // reward bonus
  int T;          // punishment length
  long L;         // protocol length
};
/// Phase I deviation: vbar - v - d^(L+1) (1-d^T)/(1-d) v'.
double phase1_gain(const GainTerms& g, double delta);
/// Deviation while minmaxing someone else, w = own payoff while minmaxing.
double phase3_gain(const GainTerms& g, double w, double delta);
/// Phase IV deviation at the unbonused reward level.
double phase4_gain(const GainTerms& g, double delta);

struct Thresholds {
  PayoffPoint v_prime;
  double lambda = 0.0;  // v' = (1 - lambda) v
  double rho = 0.0;
  double rho_max = 0.0;
  std::vector<int> T;        // per player
  double delta_bar = 0.0;
  long L = 0;
  std::vector<double> w;     // w[k'][k] flattened row-major: payoff of k while minmaxing k'
  [[nodiscard]] double w_of(Player k, Player punished) const {
    return w.at(static_cast<std::size_t>(punished - 1) * T.size() + (k - 1));
  }
  /// Reward target while rewarding the punishers of k.
  [[nodiscard]] PayoffPoint reward_target(Player k) const;
};

/// Expects a normalized game. L is the protocol length of the network.
Thresholds thresholds(const StageGame& game, const PayoffPoint& v, long L,
                      const std::vector<MinmaxCertificate>& minmax_certs);

}  // namespace netfolk
