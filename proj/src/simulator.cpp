#include "netfolk/simulator.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <memory>
#include <set>

#include "netfolk/seed.hpp"

namespace netfolk {

using nlohmann::json;

void TraceWriter::line(const std::string& text) const {
  if (out_) *out_ << text << '\n';
}

namespace {

json triplets_json(const std::vector<AccusationTriplet>& v) {
  json a = json::array();
  for (const auto& t : v) a.push_back({t.accused, t.stage, t.key});
  return a;
}

}  // namespace

std::string message_json(long t, Player sender, const std::vector<Player>& audience,
                         const ProtocolMessage& m) {
  json slots = json::array();
  for (const auto& d : m.deviation_slots) slots.push_back({d.deviator, d.period});
  json j = {{"stage", t},
            {"sender", sender},
            {"audience", audience},
            {"deviation_slot", slots},
            {"key", m.auth_key},
            {"neighbor_triplets", triplets_json(m.neighbor_triplets)},
            {"relay_triplets", triplets_json(m.relay_triplets)}};
  if (!m.reports.empty()) {
    json r = json::array();
    for (const auto& a : m.reports) r.push_back({a.player, a.from, a.actions});
    j["reports"] = r;
  }
  return j.dump();
}

std::string event_json(Player player, const ProtocolEvent& e) {
  switch (e.kind) {
    case ProtocolEvent::Kind::LieDetected:
      return json{{"stage", e.stage}, {"player", player}, {"detected_lie", e.about}}.dump();
    case ProtocolEvent::Kind::Learned:
      return json{{"stage", e.stage},
                  {"player", player},
                  {"learned", {e.id.deviator, e.id.period}},
                  {"block", e.block}}
          .dump();
    case ProtocolEvent::Kind::Discarded:
      break;
  }
  return {};
}

void VerifierReport::merge(const VerifierReport& other) {
  runs += other.runs;
  violations += other.violations;
  out_of_hypothesis += other.out_of_hypothesis;
  for (const auto& w : other.witnesses) {
    if (witnesses.size() < 5) witnesses.push_back(w);
  }
}

ProtocolRun run_protocol(const ProtocolContext& ctx, const AdversaryScript& script,
                         const ProtocolRunOptions& options) {
  const Network& g = ctx.graph;
  const int n = g.size();
  if (options.mode == RunMode::Unilateral && !is_two_connected(g)) {
    const auto cut = articulation_points(g);
    throw ProtocolError("network is not 2-connected" +
                        (cut.empty() ? std::string()
                                     : ": articulation vertex " + std::to_string(cut.front())));
  }
  ProtocolRun run;
  run.truth = script.deviation;
  run.n_prime = ctx.n_prime;
  run.L = ctx.L;
  long horizon = options.horizon;
  std::optional<BlockPartition> part;
  if (script.deviation) part = BlockPartition(script.deviation->period, ctx.n_prime);
  if (horizon == 0) {
    if (script.deviation) {
      horizon = script.deviation->period + ctx.L;
    } else if (script.announcement) {
      horizon = script.announcement->stage - 1 + ctx.L;
    } else {
      throw ProtocolError("horizon required when nothing is scripted");
    }
  }
  run.horizon = horizon;
  run.learned_stage.assign(n, std::nullopt);

  std::vector<ProtocolPlayer> players;
  players.reserve(n);
  for (Player p = 1; p <= n; ++p) players.emplace_back(ctx, p, stream_seed(options.seed, p));
  std::mt19937_64 adversary_rng(stream_seed(options.seed, 0));
  const auto& trace = options.trace;
  const PlayerLookup lookup = [&](Player p) -> const ProtocolPlayer& { return players[p - 1]; };

  auto knower_count = [&]() {
    if (!script.deviation) return 0;
    int c = 0;
    for (const auto& pl : players) c += pl.knows(*script.deviation);
    return c;
  };

  std::vector<ProtocolMessage> out(n);
  for (long t = 1; t <= horizon; ++t) {
    for (Player p = 1; p <= n; ++p) out[p - 1] = players[p - 1].compose(t);
    StageMutation mut;
    apply_script(script, t, ctx, lookup, out, mut, adversary_rng);
    if (options.adaptive) {
      if (auto lie = options.adaptive(t, players)) {
        apply_lie(*lie, t, ctx, lookup, out, mut, adversary_rng);
      }
    }
    if (script.deviation && script.deviation->period == t) {
      mut.mutated.insert(script.deviation->deviator);
    }
    if (mut.mutated.size() > 1) run.unilateral = false;
    run.forged_matches += mut.forged_matches;

    for (Player p = 1; p <= n; ++p) {
      players[p - 1].record_sent(t, out[p - 1]);
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
        if (!mut.delivers(j, p)) continue;
        inbox.emplace(j, out[j - 1]);
      }
      players[p - 1].receive(t, inbox);
    }
    if (script.deviation && script.deviation->period == t) {
      const Player k = script.deviation->deviator;
      players[k - 1].witness(*script.deviation);
      for (Player q : g.neighbors(k)) players[q - 1].witness(*script.deviation);
    }
    for (auto& pl : players) pl.end_stage(t);

    for (auto& pl : players) {
      for (const auto& e : pl.events()) {
        if (e.kind == ProtocolEvent::Kind::LieDetected) {
          ++run.lies_detected;
          if (trace.events()) trace.line(event_json(pl.self(), e));
        } else if (e.kind == ProtocolEvent::Kind::Learned) {
          LearnRecord r{pl.self(), e.id, e.stage, e.block};
          if (script.deviation && e.id == *script.deviation) {
            run.learned.push_back(r);
            run.learned_stage[pl.self() - 1] = e.stage;
          } else {
            run.false_learned.push_back(r);
          }
          if (trace.events()) trace.line(event_json(pl.self(), e));
        }
      }
      pl.clear_events();
    }
    const int count = knower_count();
    run.knowers.push_back(count);
    if (part && (t == part->t0() || part->is_block_end(t))) run.block_knowers.push_back(count);
  }
  for (const auto& pl : players) run.relay_overflow += pl.relay_overflow();
  return run;
}

VerifierReport verify_no_false_learning(const std::vector<ProtocolRun>& runs, const Network& g,
                             const std::vector<AdversaryScript>& scripts) {
  VerifierReport r;
  r.name = "no_false_learning";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    ++r.runs;
    bool bad = !run.false_learned.empty();
    std::string why;
    if (bad) {
      const auto& f = run.false_learned.front();
      why = "run " + std::to_string(i) + ": player " + std::to_string(f.player) + " learned (" +
            std::to_string(f.id.deviator) + "," + std::to_string(f.id.period) + ") at stage " +
            std::to_string(f.stage);
    }
    if (i < scripts.size() && scripts[i].announcement) {
      const auto& a = *scripts[i].announcement;
      const auto resp = false_announcement_response(g, a.announcer, a.accused);
      for (const auto& f : run.false_learned) {
        if (resp.uninformed.count(f.player)) {
          bad = true;
          why = "run " + std::to_string(i) + ": uninformed neighbor " + std::to_string(f.player) +
                " of the announcer learned the announcement";
        }
      }
    }
    if (!bad) continue;
    if (run.unilateral) {
      ++r.violations;
      if (r.witnesses.size() < 5) r.witnesses.push_back(why);
    } else {
      ++r.out_of_hypothesis;
    }
  }
  return r;
}

VerifierReport verify_block_progress(const std::vector<ProtocolRun>& runs, int players) {
  VerifierReport r;
  r.name = "block_progress";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    if (!run.truth) continue;
    ++r.runs;
    for (std::size_t b = 1; b < run.block_knowers.size(); ++b) {
      const int before = run.block_knowers[b - 1];
      if (before < players && run.block_knowers[b] <= before) {
        if (run.unilateral) {
          ++r.violations;
          if (r.witnesses.size() < 5) {
            r.witnesses.push_back("run " + std::to_string(i) + ": no new knower in block " +
                                  std::to_string(b) + " (" + std::to_string(before) + " know)");
          }
        } else {
          ++r.out_of_hypothesis;
        }
        break;
      }
    }
  }
  return r;
}

VerifierReport verify_deadline(const std::vector<ProtocolRun>& runs, int players) {
  VerifierReport r;
  r.name = "deadline";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    if (!run.truth) continue;
    ++r.runs;
    const long deadline = run.truth->period + run.L;
    for (int p = 0; p < players; ++p) {
      const auto& s = run.learned_stage[p];
      if (!s || *s > deadline) {
        if (run.unilateral) {
          ++r.violations;
          if (r.witnesses.size() < 5) {
            r.witnesses.push_back("run " + std::to_string(i) + ": player " +
                                  std::to_string(p + 1) + " did not know by stage " +
                                  std::to_string(deadline));
          }
        } else {
          ++r.out_of_hypothesis;
        }
        break;
      }
    }
  }
  return r;
}

AdaptiveAdversary greedy_adversary(const ProtocolContext& ctx, const DeviationId& deviation) {
  const BlockPartition part(deviation.period, ctx.n_prime);
  struct Plan {
    int block = -1;
    Player first = 0;
    Player second = 0;
  };
  auto plan = std::make_shared<Plan>();
  const Network g = ctx.graph;
  const int n_prime = ctx.n_prime;
  return [=](long t, const std::vector<ProtocolPlayer>& players) -> std::optional<Lie> {
    if (!part.covers(t)) return std::nullopt;
    const int b = part.block_of(t);
    if (plan->block != b) {
      plan->block = b;
      // Score knowers by the non-knowers for which they are the only
      // informed neighbor, then by non-knower neighbors.
      std::vector<std::pair<std::pair<int, int>, Player>> score;
      for (Player j = 1; j <= g.size(); ++j) {
        if (!players[j - 1].knows(deviation)) continue;
        int sole = 0, frontier = 0;
        for (Player f : g.neighbors(j)) {
          if (players[f - 1].knows(deviation)) continue;
          ++frontier;
          int informed = 0;
          for (Player h : g.neighbors(f)) informed += players[h - 1].knows(deviation);
          sole += informed == 1;
        }
        if (frontier > 0) score.push_back({{-sole, -frontier}, j});
      }
      std::sort(score.begin(), score.end());
      plan->first = score.empty() ? 0 : score[0].second;
      plan->second = score.size() > 1 ? score[1].second : plan->first;
    }
    const long offset = t - part.block_start(b);
    const Player liar = offset < n_prime - 1 ? plan->first : plan->second;
    if (liar == 0) return std::nullopt;
    Lie lie;
    lie.liar = liar;
    lie.directives.push_back({LieDirective::Kind::DropClaims, {}, 0, 0});
    lie.directives.push_back({LieDirective::Kind::DropRelays, {}, 0, 0});
    return lie;
  };
}

std::vector<AdversaryScript> exhaustive_single_liar(const ProtocolContext& ctx,
                                                    const DeviationId& deviation) {
  const Network& g = ctx.graph;
  const BlockPartition part(deviation.period, ctx.n_prime);
  using K = LieDirective::Kind;
  auto directives_for = [&](Player p, long t) {
    std::vector<LieDirective> out;
    out.push_back({K::DropClaims, {}, 0, 0});
    out.push_back({K::DropRelays, {}, 0, 0});
    out.push_back({K::WithholdAccusations, {}, 0, 0});
    for (Player q : g.neighbors(p)) {
      out.push_back({K::Omit, {}, q, 0});
      for (long tau = std::max(1L, part.block_start(part.block_of(t))); tau < t; ++tau) {
        out.push_back({K::FalseAccuse, {}, q, tau});
      }
    }
    for (Player k = 1; k <= g.size(); ++k) {
      out.push_back({K::FakeClaim, {k, deviation.period}, 0, 0});
      if (t >= 2) out.push_back({K::FakeClaim, {k, t - 1}, 0, 0});
      if (k != p && !g.adjacent(k, p) && t >= 2) out.push_back({K::ForgeAccusation, {}, k, t - 1});
    }
    return out;
  };
  std::vector<AdversaryScript> out;
  for (long t = part.first_stage(); t <= part.last_stage(); ++t) {
    for (Player p = 1; p <= g.size(); ++p) {
      for (const auto& d : directives_for(p, t)) {
        AdversaryScript s;
        s.deviation = deviation;
        s.liars[t].push_back({p, {d}});
        out.push_back(std::move(s));
      }
    }
  }
  // Persistent liars: the same player lies at every stage of the partition.
  for (Player p = 1; p <= g.size(); ++p) {
    std::vector<std::vector<LieDirective>> kinds = {
        {{K::DropClaims, {}, 0, 0}},
        {{K::DropRelays, {}, 0, 0}},
        {{K::WithholdAccusations, {}, 0, 0}},
        {{K::DropClaims, {}, 0, 0}, {K::DropRelays, {}, 0, 0}}};
    for (Player k = 1; k <= g.size(); ++k) kinds.push_back({{K::FakeClaim, {k, deviation.period}, 0, 0}});
    for (Player q : g.neighbors(p)) kinds.push_back({{K::Omit, {}, q, 0}});
    for (const auto& ds : kinds) {
      AdversaryScript s;
      s.deviation = deviation;
      for (long t = part.first_stage(); t <= part.last_stage(); ++t) s.liars[t].push_back({p, ds});
      out.push_back(std::move(s));
    }
    for (Player q : g.neighbors(p)) {
      // Accuse q at every stage with its previous-stage key.
      AdversaryScript s;
      s.deviation = deviation;
      for (long t = part.first_stage() + 1; t <= part.last_stage(); ++t) {
        s.liars[t].push_back({p, {{K::FalseAccuse, {}, q, t - 1}}});
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace netfolk
