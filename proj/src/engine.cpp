#include "netfolk/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>

#include "netfolk/seed.hpp"

namespace netfolk {

using nlohmann::json;

namespace {

double uniform(std::uint64_t seed, Player p, long t) {
  const std::uint64_t x = splitmix64(stream_seed(seed, 1000003ULL * p) ^ static_cast<std::uint64_t>(t));
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

PayoffPoint expected_stage_payoffs(const StageGame& game, const ActionProfile& a,
                                   const std::vector<const std::vector<double>*>& mix) {
  const int n = game.players();
  MixedProfile x(n);
  for (int i = 0; i < n; ++i) {
    if (mix[i]) {
      x[i] = *mix[i];
    } else {
      x[i].assign(game.actions(i + 1), 0.0);
      x[i][a[i]] = 1.0;
    }
  }
  PayoffPoint u(n);
  for (Player i = 1; i <= n; ++i) u[i - 1] = game.expected_payoff(i, x);
  return u;
}

}  // namespace

GameRun run_game(EquilibriumPlan& plan, const GameRunOptions& options) {
  const Network& g = plan.graph();
  const ProtocolContext& ctx = plan.protocol();
  const StageGame& game = plan.game();
  const int n = plan.players();
  const double delta = plan.delta();

  long horizon = options.horizon;
  if (horizon == 0) {
    if (options.deviations.empty()) throw GameError("horizon required without deviations");
    long last = 0;
    int tmax = 0;
    for (const auto& d : options.deviations) last = std::max(last, d.stage);
    for (Player k = 1; k <= n; ++k) tmax = std::max(tmax, plan.T(k));
    horizon = last + 2 * plan.L() + tmax + 1;
  }
  std::map<std::pair<long, Player>, int> forced;
  for (const auto& d : options.deviations) {
    if (d.player < 1 || d.player > n || d.action < 0 || d.action >= game.actions(d.player)) {
      throw GameError("invalid scripted deviation");
    }
    forced[{d.stage, d.player}] = d.action;
  }
  std::optional<DeviationId> first;

  GameRun run;
  run.horizon = horizon;
  std::vector<PlayerAgent> agents;
  agents.reserve(n);
  for (Player p = 1; p <= n; ++p) {
    agents.emplace_back(plan, p, stream_seed(options.seed, p), options.accounting);
  }
  std::mt19937_64 adversary_rng(stream_seed(options.seed, 0));
  const auto& trace = options.trace;
  const PlayerLookup lookup = [&](Player p) -> const ProtocolPlayer& {
    return agents[p - 1].protocol();
  };
  std::vector<Phase> phase(n, Phase::I);
  std::vector<ProtocolMessage> out(n);
  double weight = 1.0;  // delta^(t-1)
  run.total.assign(n, 0.0);

  for (long t = 1; t <= horizon; ++t, weight *= delta) {
    for (Player p = 1; p <= n; ++p) {
      const Phase now = agents[p - 1].phase(t);
      if (now != phase[p - 1]) {
        run.transitions.push_back({t, p, phase[p - 1], now});
        if (trace.events()) {
          trace.line(json{{"stage", t},
                          {"player", p},
                          {"from_phase", phase_name(phase[p - 1])},
                          {"to_phase", phase_name(now)}}
                         .dump());
        }
        phase[p - 1] = now;
      }
    }

    // Actions.
    ActionProfile a(n);
    std::vector<const std::vector<double>*> mix(n, nullptr);
    StageMutation mut;
    for (Player p = 1; p <= n; ++p) {
      auto& ag = agents[p - 1];
      const Regime r = ag.regime(t);
      const bool mixing = !ag.fallback() && r.phase == Phase::III && p != r.target() &&
                          plan.mixes(p, r.target());
      a[p - 1] = ag.choose_action(t, uniform(options.seed, p, t));
      if (mixing && options.draws) {
        if (auto forced_draw = options.draws(p, t)) a[p - 1] = *forced_draw;
      }
      if (auto it = forced.find({t, p}); it != forced.end()) {
        if (it->second != a[p - 1]) {
          mut.mutated.insert(p);
          if (!first) first = DeviationId{p, t};
        }
        a[p - 1] = it->second;
      } else if (mixing) {
        mix[p - 1] = &plan.minmax(r.target()).punisher_profile[p - 1];
      }
    }

    // Messages.
    for (Player p = 1; p <= n; ++p) out[p - 1] = agents[p - 1].compose(t);
    apply_script(options.lies, t, ctx, lookup, out, mut, adversary_rng);
    if (mut.mutated.size() > 1) run.unilateral = false;
    for (Player p = 1; p <= n; ++p) {
      agents[p - 1].record_sent(t, out[p - 1]);
      if (trace.full()) {
        std::vector<Player> audience;
        for (Player q : g.neighbors(p)) {
          if (mut.delivers(p, q)) audience.push_back(q);
        }
        trace.line(message_json(t, p, audience, out[p - 1]));
      }
    }
    for (Player p = 1; p <= n; ++p) {
      std::map<Player, ProtocolMessage> inbox;
      for (Player j : g.neighbors(p)) {
        if (mut.delivers(j, p)) inbox.emplace(j, out[j - 1]);
      }
      agents[p - 1].receive(t, inbox);
    }

    // Monitoring.
    for (Player p = 1; p <= n; ++p) {
      std::map<Player, int> seen{{p, a[p - 1]}};
      for (Player j : g.neighbors(p)) seen[j] = a[j - 1];
      agents[p - 1].observe(t, seen);
    }
    for (auto& ag : agents) ag.end_stage(t);

    // Payoffs.
    PayoffPoint u;
    const bool expected = options.accounting == Accounting::Expected &&
                          std::any_of(mix.begin(), mix.end(), [](auto* m) { return m; });
    u = expected ? expected_stage_payoffs(game, a, mix) : game.payoffs(a);
    for (int i = 0; i < n; ++i) run.total[i] += (1.0 - delta) * weight * u[i];
    if (trace.full()) {
      trace.line(json{{"stage", t}, {"actions", a}, {"payoffs", u}}.dump());
    }
    run.actions.push_back(a);
    run.payoffs.push_back(u);

    int knowers = 0;
    for (auto& ag : agents) {
      auto& pr = ag.protocol();
      for (const auto& e : pr.events()) {
        if (e.kind == ProtocolEvent::Kind::LieDetected) ++run.lies_detected;
        if (trace.events() && e.kind != ProtocolEvent::Kind::Discarded) {
          trace.line(event_json(ag.self(), e));
        }
      }
      pr.clear_events();
      if (first && pr.knows(*first)) ++knowers;
      if (ag.fallback()) run.fallback = true;
    }
    run.knowers.push_back(knowers);
  }

  run.tail_closed = true;
  for (Player p = 1; p <= n; ++p) {
    auto& ag = agents[p - 1];
    run.missing_reports += ag.missing_reports();
    const auto w = ag.continuation(horizon + 1);
    if (!w) {
      run.tail_closed = false;
      continue;
    }
    run.total[p - 1] += weight * (*w)[p - 1];
  }
  return run;
}

namespace {

struct Window {
  std::string name;
  long stage;
  bool with_context;
};

double analytic_bound(const EquilibriumPlan& plan, Player p, const std::string& window,
                      Player punished, double delta) {
  const auto& th = plan.thresholds();
  const auto& game = plan.game();
  const int i = p - 1;
  GainTerms terms;
  terms.vbar = game.max_payoff(p) - plan.minmax_values()[i];
  terms.v = plan.v()[i] - plan.minmax_values()[i];
  terms.vprime = th.v_prime[i];
  terms.rho = th.rho;
  terms.T = th.T[i];
  terms.L = th.L;
  if (window.rfind("III", 0) == 0) {
    if (p == punished) return std::numeric_limits<double>::infinity();
    return phase3_gain(terms, th.w_of(p, punished), delta);
  }
  if (window.rfind("IV", 0) == 0) return phase4_gain(terms, delta);
  return phase1_gain(terms, delta);
}

}  // namespace

AuditReport deviation_gain_audit(EquilibriumPlan& plan, Player context, double margin,
                                 std::uint64_t seed) {
  const int n = plan.players();
  const StageGame& game = plan.game();
  const double delta = plan.delta();
  AuditReport report;
  AuditCase worst;

  GameRunOptions base;
  base.seed = seed;
  base.accounting = Accounting::Expected;

  // Conforming runs: none, and the context deviation alone.
  GameRunOptions quiet = base;
  quiet.horizon = 3;
  const GameRun path = run_game(plan, quiet);

  const int on_path = plan.main_path().profile(1)[context - 1];
  const ActionDeviation ctx_dev{context, 1, (on_path + 1) % game.actions(context)};
  GameRunOptions with_ctx = base;
  with_ctx.deviations = {ctx_dev};
  const GameRun punished = run_game(plan, with_ctx);
  const auto s = plan.schedule({context, 1});

  const std::vector<Window> windows = {
      {"I", 1, false},           {"I", 2, false},           {"III-first", s.s3, true},
      {"III-last", s.s4 - 1, true}, {"IV-start", s.s4, true}, {"IV", s.s4 + 1, true},
      {"IV-comp", s.s5, true}};

  for (const auto& w : windows) {
    const GameRun& conf = w.with_context ? punished : path;
    if (!conf.tail_closed) throw GameError("conforming run has no closed tail");
    for (Player p = 1; p <= n; ++p) {
      if (w.with_context && p == context && w.stage == 1) continue;
      const int played = conf.actions.at(w.stage - 1)[p - 1];
      std::vector<int> allowed{played};
      if (w.name.rfind("III", 0) == 0) allowed = plan.support(p, context);
      for (int act = 0; act < game.actions(p); ++act) {
        if (std::find(allowed.begin(), allowed.end(), act) != allowed.end()) continue;
        GameRunOptions o = base;
        if (w.with_context) o.deviations.push_back(ctx_dev);
        o.deviations.push_back({p, w.stage, act});
        const GameRun dev = run_game(plan, o);
        if (!dev.tail_closed) throw GameError("deviation run has no closed tail");
        AuditCase c;
        c.player = p;
        c.stage = w.stage;
        c.action = act;
        c.window = w.name;
        c.gain = (dev.total[p - 1] - conf.total[p - 1]) /
                 ((1.0 - delta) * std::pow(delta, static_cast<double>(w.stage - 1)));
        c.bound = analytic_bound(plan, p, w.name, context, delta);
        ++report.cases;
        if (c.gain > c.bound + 1e-9) ++report.bound_exceeded;
        if (c.gain >= -margin) {
          ++report.profitable;
          if (report.witnesses.size() < 8) report.witnesses.push_back(c);
        }
        if (c.gain > report.worst_gain) {
          report.worst_gain = c.gain;
          worst = c;
        }
      }
    }
  }
  if (report.cases > 0) report.witnesses.push_back(worst);
  return report;
}

}  // namespace netfolk
