#include "netfolk/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace netfolk {

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::I: return "I";
    case Phase::II: return "II";
    case Phase::III: return "III";
    case Phase::IVStart: return "IV-start";
    case Phase::IV: return "IV";
    case Phase::Fallback: return "fallback";
  }
  return "?";
}

EquilibriumPlan::EquilibriumPlan(const Network& g, StageGame game, PayoffPoint v, double delta,
                                 ProtocolConfig protocol, bool stress)
    : game_(std::move(game)), v_(std::move(v)), delta_(delta) {
  if (game_.players() != g.size()) {
    throw GameError("game has " + std::to_string(game_.players()) + " players, network has " +
                    std::to_string(g.size()));
  }
  if (!stress && !is_two_connected(g)) {
    const auto cut = articulation_points(g);
    throw ProtocolError("network is not 2-connected" +
                        (cut.empty() ? std::string()
                                     : ": articulation vertex " + std::to_string(cut.front())));
  }
  const int n = game_.players();
  const double bound = std::max(0.5, 1.0 / std::max(2, n));
  if (!(delta_ >= bound && delta_ < 1.0)) {
    throw GameError("discount factor " + std::to_string(delta_) + " outside [" +
                    std::to_string(bound) + ", 1)");
  }
  ctx_ = std::make_shared<ProtocolContext>(g, protocol);
  certs_ = minmax_all(game_);
  for (const auto& c : certs_) offsets_.push_back(c.value);
  PayoffPoint vn = v_;
  for (int i = 0; i < n; ++i) vn[i] -= offsets_[i];
  th_ = netfolk::thresholds(game_.shifted(offsets_), vn, ctx_->L, certs_);
  main_ = std::make_unique<TargetPath>(game_, v_, delta_);
  for (Player k = 1; k <= n; ++k) {
    PayoffPoint e(n);
    for (Player i = 1; i <= n; ++i) e[i - 1] = game_.expected_payoff(i, certs_[k - 1].punisher_profile);
    punish_payoff_.push_back(std::move(e));
  }
}

PunishmentSchedule EquilibriumPlan::schedule(const DeviationId& d) const {
  PunishmentSchedule s;
  s.cause = d;
  s.s3 = d.period + L() + 1;
  s.s4 = d.period + L() + T(d.deviator) + 1;
  s.s5 = d.period + 2 * L() + T(d.deviator) + 1;
  return s;
}

Regime EquilibriumPlan::regime(const std::vector<DeviationId>& known, long t) const {
  Regime r;
  const DeviationId* latest = nullptr;
  for (const auto& d : known) {
    if (d.period + L() + 1 > t) continue;
    if (!latest || d.period > latest->period) latest = &d;
  }
  if (!latest) return r;
  r.schedule = schedule(*latest);
  if (t < r.schedule->s4) {
    r.phase = Phase::III;
  } else if (t == r.schedule->s4) {
    r.phase = Phase::IVStart;
  } else {
    r.phase = Phase::IV;
  }
  return r;
}

PayoffPoint EquilibriumPlan::reward_target(Player k) const {
  PayoffPoint r = th_.reward_target(k);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += offsets_[i];
  return r;
}

std::vector<int> EquilibriumPlan::support(Player i, Player k) const {
  const auto& c = certs_.at(k - 1);
  if (i == k) return {c.best_response_action};
  std::vector<int> out;
  const auto& x = c.punisher_profile.at(i - 1);
  for (int a = 0; a < static_cast<int>(x.size()); ++a) {
    if (x[a] > 1e-9) out.push_back(a);
  }
  return out;
}

int EquilibriumPlan::draw(Player i, Player k, double u) const {
  const auto s = support(i, k);
  if (s.size() == 1) return s.front();
  const auto& x = certs_.at(k - 1).punisher_profile.at(i - 1);
  double mass = 0.0;
  for (int a : s) mass += x[a];
  double acc = 0.0;
  for (int a : s) {
    acc += x[a] / mass;
    if (u < acc) return a;
  }
  return s.back();
}

const PayoffPoint& EquilibriumPlan::punishment_payoff(Player k) const {
  return punish_payoff_.at(k - 1);
}

TargetPath& EquilibriumPlan::reward_path(Player k) {
  auto& p = reward_[k];
  if (!p) p = std::make_unique<TargetPath>(game_, reward_target(k), delta_);
  return *p;
}

TargetPath& EquilibriumPlan::compensated_path(const DeviationId& d, const PayoffPoint& target) {
  auto& p = compensated_[{d, target}];
  if (!p) {
    if (!hull_weights(game_, target)) {
      throw GameError("compensated reward target leaves the feasible set");
    }
    p = std::make_unique<TargetPath>(game_, target, delta_);
  }
  return *p;
}

PlayerAgent::PlayerAgent(EquilibriumPlan& plan, Player self, std::uint64_t seed,
                         Accounting accounting)
    : plan_(&plan), self_(self), accounting_(accounting), proto_(plan.protocol(), self, seed) {
  const auto& lp = plan.game().local_payoff(self);
  const auto best = std::max_element(lp.table.begin(), lp.table.end()) - lp.table.begin();
  // Decode the own digit of the maximizing scope tuple (last player fastest).
  std::size_t idx = static_cast<std::size_t>(best);
  for (auto q = lp.scope.rbegin(); q != lp.scope.rend(); ++q) {
    const auto radix = static_cast<std::size_t>(plan.game().actions(*q));
    if (*q == self) fallback_action_ = static_cast<int>(idx % radix);
    idx /= radix;
  }
}

Regime PlayerAgent::regime(long t) const { return plan_->regime(proto_.known(), t); }

Phase PlayerAgent::phase(long t) const {
  if (fallback_) return Phase::Fallback;
  const Regime r = regime(t);
  if (r.phase == Phase::I && proto_.in_phase_two(t)) return Phase::II;
  return r.phase;
}

int PlayerAgent::prescribed(long t, Player j, const Regime& r) {
  switch (r.phase) {
    case Phase::III:
      return j == r.target() ? plan_->minmax(r.target()).best_response_action : -1;
    case Phase::IVStart:
      return 0;
    case Phase::IV: {
      const auto& s = *r.schedule;
      if (t >= s.s5) {
        if (const auto& w = compensated_target(s)) {
          return plan_->compensated_path(s.cause, *w).profile(t - s.s5 + 1)[j - 1];
        }
      }
      return plan_->reward_path(r.target()).profile(t - s.s4)[j - 1];
    }
    default:
      return plan_->main_path().profile(t)[j - 1];
  }
}

int PlayerAgent::choose_action(long t, double u) {
  if (fallback_) return fallback_action_;
  const Regime r = regime(t);
  const int a = prescribed(t, self_, r);
  if (a >= 0) return a;
  return plan_->draw(self_, r.target(), u);
}

bool PlayerAgent::conforms(long t, Player j, int action) {
  if (fallback_) return true;
  const Regime r = regime(t);
  const int a = prescribed(t, j, r);
  if (a >= 0) return a == action;
  const auto s = plan_->support(j, r.target());
  return std::find(s.begin(), s.end(), action) != s.end();
}

ProtocolMessage PlayerAgent::compose(long t) {
  ProtocolMessage m = proto_.compose(t);
  if (fallback_) {
    ProtocolMessage empty;
    empty.auth_key = m.auth_key;
    return empty;
  }
  const Regime r = regime(t);
  if (r.phase == Phase::IVStart) {
    const auto& s = *r.schedule;
    auto& mine = reports_[s.s3];
    for (Player j : plan_->graph().neighbors(self_)) {
      ActionReport rep{j, s.s3, {}};
      for (long tau = s.s3; tau < s.s4; ++tau) {
        auto it = observed_.find(tau);
        rep.actions.push_back(it == observed_.end() ? -1 : it->second.at(j));
      }
      mine.try_emplace(j, rep);
      m.reports.push_back(std::move(rep));
    }
  }
  for (auto& rep : relay_reports_) m.reports.push_back(std::move(rep));
  relay_reports_.clear();
  return m;
}

void PlayerAgent::receive(long t, const std::map<Player, ProtocolMessage>& inbox) {
  proto_.receive(t, inbox);
  for (const auto& [j, m] : inbox) {
    for (const auto& rep : m.reports) {
      if (rep.player < 1 || rep.player > plan_->players()) continue;
      if (reports_[rep.from].try_emplace(rep.player, rep).second) relay_reports_.push_back(rep);
    }
  }
}

void PlayerAgent::observe(long t, const std::map<Player, int>& actions) {
  observed_[t] = actions;
  std::vector<Player> off;
  for (const auto& [j, a] : actions) {
    if (!conforms(t, j, a)) off.push_back(j);
  }
  if (off.size() > 1) {
    fallback_ = true;
  } else if (off.size() == 1) {
    proto_.witness({off.front(), t});
  }
}

std::map<Player, ActionReport> PlayerAgent::reports(long from) const {
  auto it = reports_.find(from);
  return it == reports_.end() ? std::map<Player, ActionReport>{} : it->second;
}

const std::optional<PayoffPoint>& PlayerAgent::compensated_target(const PunishmentSchedule& s) {
  auto [it, fresh] = comp_targets_.try_emplace(s.cause);
  if (!fresh || accounting_ == Accounting::Expected) return it->second;
  const auto& game = plan_->game();
  const int n = plan_->players();
  const Player k = s.cause.deviator;
  const double d = plan_->delta();
  const auto& expect = plan_->punishment_payoff(k);
  auto& reps = reports_[s.s3];
  for (Player p = 1; p <= n; ++p) {
    if (reps.count(p)) continue;
    if (auto o = observed_.find(s.s3); o != observed_.end() && o->second.count(p)) {
      ActionReport own{p, s.s3, {}};
      for (long tau = s.s3; tau < s.s4; ++tau) own.actions.push_back(observed_.at(tau).at(p));
      reps.emplace(p, own);
      continue;
    }
    ++missing_reports_;
    return it->second;
  }
  PayoffPoint comp(n, 0.0);
  bool any = false;
  double w = 1.0;
  for (long tau = s.s3; tau < s.s4; ++tau, w *= d) {
    ActionProfile a(n);
    for (Player p = 1; p <= n; ++p) {
      const auto& acts = reps.at(p).actions;
      const auto idx = static_cast<std::size_t>(tau - s.s3);
      if (idx >= acts.size() || acts[idx] < 0 || acts[idx] >= game.actions(p)) {
        ++missing_reports_;
        return it->second;
      }
      a[p - 1] = acts[idx];
    }
    const auto u = game.payoffs(a);
    for (Player i = 1; i <= n; ++i) {
      if (i == k) continue;
      const double diff = expect[i - 1] - u[i - 1];
      if (diff != 0.0) any = true;
      comp[i - 1] += w * diff;
    }
  }
  if (!any) return it->second;
  const double scale = (1.0 - d) / std::pow(d, static_cast<double>(s.s5 - s.s3));
  PayoffPoint target = plan_->reward_path(k).continuation(s.s5 - s.s4);
  for (int i = 0; i < n; ++i) target[i] += scale * comp[i];
  it->second = std::move(target);
  return it->second;
}

std::optional<PayoffPoint> PlayerAgent::continuation(long t) {
  if (fallback_) return std::nullopt;
  const Regime r = regime(t);
  switch (r.phase) {
    case Phase::I:
      return plan_->main_path().continuation(t);
    case Phase::IV: {
      const auto& s = *r.schedule;
      if (t >= s.s5) {
        if (const auto& w = compensated_target(s)) {
          return plan_->compensated_path(s.cause, *w).continuation(t - s.s5 + 1);
        }
      }
      return plan_->reward_path(r.target()).continuation(t - s.s4);
    }
    default:
      return std::nullopt;
  }
}

}  // namespace netfolk
