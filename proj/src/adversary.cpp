#include "netfolk/adversary.hpp"

#include <algorithm>
#include <set>

namespace netfolk {

std::vector<Player> AdversaryScript::mutated_at(long t) const {
  std::set<Player> out;
  if (deviation && deviation->period == t) out.insert(deviation->deviator);
  if (auto it = liars.find(t); it != liars.end()) {
    for (const auto& lie : it->second) out.insert(lie.liar);
  }
  if (announcement && t >= announcement->stage) out.insert(announcement->announcer);
  return {out.begin(), out.end()};
}

bool AdversaryScript::unilateral() const {
  std::set<long> stages;
  for (const auto& [t, lies] : liars) stages.insert(t);
  if (deviation) stages.insert(deviation->period);
  for (long t : stages) {
    if (mutated_at(t).size() > 1) return false;
  }
  if (announcement) {
    // The announcer lies at every stage from its start on.
    for (const auto& [t, lies] : liars) {
      if (t >= announcement->stage && mutated_at(t).size() > 1) return false;
    }
    if (deviation && deviation->period >= announcement->stage &&
        deviation->deviator != announcement->announcer) {
      return false;
    }
  }
  return true;
}

ProtocolMessage apply_lie(const ProtocolMessage& honest, const LieDirective& d,
                          const ProtocolPlayer& state, const Network& g, long t,
                          std::mt19937_64& rng) {
  ProtocolMessage m = honest;
  using K = LieDirective::Kind;
  switch (d.kind) {
    case K::DropClaims:
      m.deviation_slots.clear();
      break;
    case K::FakeClaim:
      m.deviation_slots = {d.claim};
      break;
    case K::FalseAccuse: {
      if (!g.adjacent(state.self(), d.target)) break;
      auto key = state.key_of(d.target, d.stage);
      if (!key) break;
      AccusationTriplet tr{d.target, d.stage, *key};
      auto it = std::find_if(m.neighbor_triplets.begin(), m.neighbor_triplets.end(),
                             [&](const auto& x) { return x.accused == d.target; });
      if (it != m.neighbor_triplets.end()) {
        *it = tr;
      } else {
        m.neighbor_triplets.push_back(tr);
      }
      break;
    }
    case K::ForgeAccusation: {
      if (d.target == state.self() || g.adjacent(state.self(), d.target)) break;
      m.relay_triplets.push_back({d.target, d.stage, rng()});
      break;
    }
    case K::DropRelays:
      m.relay_triplets.clear();
      m.reports.clear();
      break;
    case K::WithholdAccusations:
      for (auto& tr : m.neighbor_triplets) tr.key = rng();
      break;
    case K::Omit:
      break;  // handled at delivery
  }
  (void)t;
  return m;
}

void apply_lie(const Lie& lie, long t, const ProtocolContext& ctx, const PlayerLookup& state,
               std::vector<ProtocolMessage>& out, StageMutation& mutation, std::mt19937_64& rng) {
  const Network& g = ctx.graph;
  mutation.mutated.insert(lie.liar);
  auto& m = out[lie.liar - 1];
  for (const auto& d : lie.directives) {
    if (d.kind == LieDirective::Kind::Omit) {
      if (g.adjacent(lie.liar, d.target)) mutation.omitted[lie.liar].insert(d.target);
      continue;
    }
    m = apply_lie(m, d, state(lie.liar), g, t, rng);
    if (d.kind == LieDirective::Kind::ForgeAccusation && !m.relay_triplets.empty() &&
        d.stage < t && d.stage >= t - 2 * (2L * ctx.n_prime - 3)) {
      const auto& forged = m.relay_triplets.back();
      if (forged.accused == d.target && state(d.target).own_key(d.stage) == forged.key) {
        ++mutation.forged_matches;
      }
    }
  }
}

void apply_script(const AdversaryScript& script, long t, const ProtocolContext& ctx,
                  const PlayerLookup& state, std::vector<ProtocolMessage>& out,
                  StageMutation& mutation, std::mt19937_64& rng) {
  if (const auto& a = script.announcement; a && t >= a->stage) {
    const DeviationId claim{a->accused, a->stage - 1};
    if (BlockPartition(claim.period, ctx.n_prime).covers(t)) {
      mutation.mutated.insert(a->announcer);
      auto& m = out[a->announcer - 1];
      m.deviation_slots = {claim};
      if (a->drop_relays) m.relay_triplets.clear();
    }
  }
  if (auto it = script.liars.find(t); it != script.liars.end()) {
    for (const auto& lie : it->second) apply_lie(lie, t, ctx, state, out, mutation, rng);
  }
}

AdversaryScript random_schedule(const Network& g, const DeviationId& deviation, long from,
                                long to, double rate, int n_prime, std::mt19937_64& rng) {
  AdversaryScript s;
  s.deviation = deviation;
  std::bernoulli_distribution lie(rate);
  std::uniform_int_distribution<Player> any(1, g.size());
  const long span = static_cast<long>(n_prime - 3) * (2L * n_prime - 3);
  const long block = 2L * n_prime - 3;
  for (long t = from; t <= to; ++t) {
    if (t == deviation.period || !lie(rng)) continue;
    Lie l;
    l.liar = any(rng);
    const int count = 1 + static_cast<int>(rng() % 3);
    for (int c = 0; c < count; ++c) {
      LieDirective d;
      d.kind = static_cast<LieDirective::Kind>(rng() % 7);
      const auto& nb = g.neighbors(l.liar);
      switch (d.kind) {
        case LieDirective::Kind::FakeClaim: {
          d.claim.deviator = any(rng);
          if (rng() % 2) {
            d.claim.period = deviation.period;
          } else {
            const long lo = std::max(0L, t - span);
            d.claim.period = lo + static_cast<long>(rng() % static_cast<unsigned long>(t - lo));
          }
          break;
        }
        case LieDirective::Kind::FalseAccuse:
        case LieDirective::Kind::Omit:
          d.target = nb[rng() % nb.size()];
          d.stage = std::max(1L, t - 1 - static_cast<long>(rng() % block));
          break;
        case LieDirective::Kind::ForgeAccusation:
          d.target = any(rng);
          d.stage = std::max(1L, t - 1 - static_cast<long>(rng() % block));
          break;
        default:
          break;
      }
      l.directives.push_back(d);
    }
    s.liars[t].push_back(std::move(l));
  }
  return s;
}

}  // namespace netfolk
