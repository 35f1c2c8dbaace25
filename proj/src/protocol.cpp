#include "netfolk/protocol.hpp"

#include <algorithm>

namespace netfolk {

bool ProtocolMessage::claims(const DeviationId& d) const {
  return std::find(deviation_slots.begin(), deviation_slots.end(), d) !=
         deviation_slots.end();
}

long protocol_length(int n_prime) {
  if (n_prime <= 3) {
    throw ProtocolError("degenerate network: n' = " + std::to_string(n_prime) +
                        " leaves no protocol blocks");
  }
  return 1 + static_cast<long>(n_prime - 3) * (2L * n_prime - 3);
}

BlockPartition::BlockPartition(long t0, int n_prime) : t0_(t0), n_prime_(n_prime) {
  protocol_length(n_prime);
  if (t0 < 0) throw ProtocolError("deviation stage must be nonnegative");
}

int BlockPartition::block_of(long t) const {
  if (t < first_stage()) return 0;
  if (t > last_stage()) return blocks() + 1;
  return static_cast<int>((t - t0_ - 1) / block_length()) + 1;
}

BlockPartition block_partition(long t0, int n_prime) { return {t0, n_prime}; }

ProtocolContext::ProtocolContext(const Network& g, ProtocolConfig cfg)
    : graph(g), config(cfg) {
  n_prime = cfg.n_prime > 0 ? cfg.n_prime : longest_cycle_length(g);
  L = protocol_length(n_prime);
  dist = all_distances(g);
}

AnnouncementResponse false_announcement_response(const Network& g, Player announcer,
                                                 Player accused) {
  if (!g.adjacent(announcer, accused)) {
    throw ProtocolError("players " + std::to_string(announcer) + " and " +
                        std::to_string(accused) + " are not adjacent");
  }
  AnnouncementResponse r;
  for (Player p : g.neighbors(announcer)) {
    if (p == accused) continue;
    if (g.adjacent(p, accused)) {
      r.lie_detected.insert(p);
    } else {
      r.uninformed.insert(p);
    }
  }
  return r;
}

ProtocolPlayer::ProtocolPlayer(const ProtocolContext& ctx, Player self, std::uint64_t seed)
    : ctx_(&ctx), self_(self), rng_(seed) {
  if (!ctx.graph.contains(self)) throw ProtocolError("player out of range");
}

namespace {

void believe_witnesses(const Network& g, Player self, const DeviationId& d,
                       std::set<Player>& out) {
  if (g.adjacent(self, d.deviator)) out.insert(d.deviator);
  for (Player p : g.neighbors(d.deviator)) {
    if (p != self && g.adjacent(self, p)) out.insert(p);
  }
}

}  // namespace

void ProtocolPlayer::witness(const DeviationId& d) {
  witnessed_.insert(d);
  auto& inst = instances_[d];
  if (inst.knows) return;
  inst.partition = BlockPartition(d.period, ctx_->n_prime);
  inst.knows = true;
  inst.learned_at_block = 0;
  inst.claims.clear();
  believe_witnesses(ctx_->graph, self_, d, inst.believed_knowledge);
  events_.push_back({ProtocolEvent::Kind::Learned, d.period, d, 0, 0});
}

bool ProtocolPlayer::in_phase_two(long t) const {
  for (const auto& [id, inst] : instances_) {
    if (inst.partition.covers(t)) return true;
  }
  auto it = lies_.find(t - 1);
  return it != lies_.end() && !it->second.empty();
}

ProtocolMessage ProtocolPlayer::compose(long t) {
  ProtocolMessage m;
  m.auth_key = rng_();
  own_keys_[t] = m.auth_key;
  for (const auto& [id, inst] : instances_) {
    if (inst.knows && inst.partition.covers(t) &&
        *inst.learned_at_block < inst.partition.block_of(t)) {
      m.deviation_slots.push_back(id);
    }
  }
  if (t >= 2 && in_phase_two(t)) {
    const auto lies = lies_.find(t - 1);
    const auto keys = ledger_.find(t - 1);
    for (Player j : ctx_->graph.neighbors(self_)) {
      AccusationTriplet tr{j, t - 1, 0};
      const bool caught = lies != lies_.end() && lies->second.count(j);
      if (caught && keys != ledger_.end() && keys->second.count(j)) {
        tr.key = keys->second.at(j);
      } else {
        tr.key = rng_();
      }
      m.neighbor_triplets.push_back(tr);
    }
  }
  std::map<Player, long> per_accused;
  for (const auto& p : pending_) {
    if (p.due != t) continue;
    if (++per_accused[p.triplet.accused] > ctx_->L) {
      ++relay_overflow_;
      continue;
    }
    m.relay_triplets.push_back(p.triplet);
  }
  return m;
}

void ProtocolPlayer::record_sent(long t, const ProtocolMessage& sent) {
  std::vector<AccusationTriplet> out = sent.relay_triplets;
  std::sort(out.begin(), out.end());
  std::vector<Pending> keep;
  for (auto& p : pending_) {
    if (p.due != t) {
      keep.push_back(p);
    } else if (!p.retried && !std::binary_search(out.begin(), out.end(), p.triplet)) {
      keep.push_back({p.triplet, t + 1, true});
    }
  }
  pending_ = std::move(keep);
}

bool ProtocolPlayer::refuted(const DeviationId& d, long t) const {
  if (d.period >= t) return false;
  if (d.deviator == self_ || ctx_->graph.adjacent(self_, d.deviator)) {
    return !witnessed_.count(d);
  }
  return false;
}

bool ProtocolPlayer::detect_lie(Player j, const ProtocolMessage& m, long t) const {
  const long span = static_cast<long>(ctx_->n_prime - 3) * (2L * ctx_->n_prime - 3);
  for (const auto& c : m.deviation_slots) {
    if (c.deviator < 1 || c.deviator > ctx_->graph.size()) return true;
    if (t <= c.period || t > c.period + span) return true;
    if (refuted(c, t)) return true;
    const BlockPartition part(c.period, ctx_->n_prime);
    const int b = part.block_of(t);
    if (b + ctx_->config.distance_offset < ctx_->dist[j][c.deviator]) return true;
    for (const auto& [id, inst] : instances_) {
      if (inst.knows && id.period == c.period && id.deviator != c.deviator) return true;
    }
  }
  for (const auto& [id, inst] : instances_) {
    if (inst.knows && inst.partition.covers(t) && inst.believed_knowledge.count(j) &&
        !m.claims(id)) {
      return true;
    }
  }
  return false;
}

void ProtocolPlayer::receive(long t, const std::map<Player, ProtocolMessage>& inbox) {
  const auto& g = ctx_->graph;
  auto& keys = ledger_[t];
  for (const auto& [j, m] : inbox) {
    if (!g.adjacent(self_, j)) {
      throw ProtocolError("player " + std::to_string(self_) + " received a message from " +
                          std::to_string(j) + ", not a neighbor");
    }
    keys[j] = m.auth_key;
  }
  for (Player j : g.neighbors(self_)) {
    if (!inbox.count(j)) {
      lies_[t].insert(j);
      events_.push_back({ProtocolEvent::Kind::LieDetected, t, {}, j, 0});
    }
  }
  for (const auto& [j, m] : inbox) {
    const bool lie = detect_lie(j, m, t);
    if (lie) {
      lies_[t].insert(j);
      events_.push_back({ProtocolEvent::Kind::LieDetected, t, {}, j, 0});
    } else {
      for (const auto& c : m.deviation_slots) {
        if (c.deviator == self_) continue;
        auto [it, fresh] = instances_.try_emplace(c);
        auto& inst = it->second;
        if (fresh) inst.partition = BlockPartition(c.period, ctx_->n_prime);
        inst.believed_knowledge.insert(j);
        if (!inst.knows) inst.claims[j].push_back(t);
      }
    }
    auto take = [&](const AccusationTriplet& tr) {
      if (tr.accused == self_ || tr.accused < 1 || tr.accused > g.size()) return;
      if (g.adjacent(self_, tr.accused)) {
        auto st = ledger_.find(tr.stage);
        if (st == ledger_.end()) return;
        auto k = st->second.find(tr.accused);
        if (k == st->second.end() || k->second != tr.key) return;
        // Authenticated: pass it on so the accused's other neighbors hear it too.
        if (accusations_.try_emplace({tr.accused, tr.stage}, t).second &&
            seen_.insert(tr).second) {
          pending_.push_back({tr, t + 1, false});
        }
        return;
      }
      if (seen_.insert(tr).second) pending_.push_back({tr, t + 1, false});
    };
    for (const auto& tr : m.neighbor_triplets) take(tr);
    for (const auto& tr : m.relay_triplets) take(tr);
  }
}

void ProtocolPlayer::end_stage(long t) {
  std::vector<DeviationId> drop;
  for (auto& [id, inst] : instances_) {
    if (!inst.partition.is_block_end(t)) continue;
    const int b = inst.partition.block_of(t);
    if (!inst.knows) {
      for (const auto& [j, stages] : inst.claims) {
        const Player who = j;
        const bool ok = decodes(stages, ctx_->n_prime, ctx_->config.decode,
                                [&](long tau) -> std::optional<long> {
                                  auto a = accusations_.find({who, tau});
                                  if (a == accusations_.end()) return std::nullopt;
                                  return a->second;
                                });
        if (ok) {
          inst.knows = true;
          inst.learned_at_block = b;
          believe_witnesses(ctx_->graph, self_, id, inst.believed_knowledge);
          events_.push_back({ProtocolEvent::Kind::Learned, t, id, 0, b});
          break;
        }
      }
    }
    inst.claims.clear();
    if (!inst.knows && b == inst.partition.blocks()) drop.push_back(id);
  }
  for (const auto& id : drop) {
    instances_.erase(id);
    events_.push_back({ProtocolEvent::Kind::Discarded, t, id, 0, 0});
  }
  prune(t);
}

void ProtocolPlayer::prune(long t) {
  if (t % (2L * ctx_->n_prime - 3) != 0) return;
  const long keep = t - 3 * (2L * ctx_->n_prime - 3) - 2;
  ledger_.erase(ledger_.begin(), ledger_.lower_bound(keep));
  own_keys_.erase(own_keys_.begin(), own_keys_.lower_bound(keep));
  lies_.erase(lies_.begin(), lies_.lower_bound(keep));
  for (auto it = accusations_.begin(); it != accusations_.end();) {
    it = it->first.second < keep ? accusations_.erase(it) : std::next(it);
  }
  const long seen_keep = t - 2L * ctx_->graph.size() - 2 * ctx_->n_prime - 4;
  for (auto it = seen_.begin(); it != seen_.end();) {
    it = it->stage < seen_keep ? seen_.erase(it) : std::next(it);
  }
}

bool ProtocolPlayer::knows(const DeviationId& d) const {
  auto it = instances_.find(d);
  return it != instances_.end() && it->second.knows;
}

std::vector<DeviationId> ProtocolPlayer::known() const {
  std::vector<DeviationId> out;
  for (const auto& [id, inst] : instances_) {
    if (inst.knows) out.push_back(id);
  }
  return out;
}

std::optional<AuthKey> ProtocolPlayer::key_of(Player j, long t) const {
  auto st = ledger_.find(t);
  if (st == ledger_.end()) return std::nullopt;
  auto k = st->second.find(j);
  if (k == st->second.end()) return std::nullopt;
  return k->second;
}

AuthKey ProtocolPlayer::own_key(long t) const {
  auto it = own_keys_.find(t);
  if (it == own_keys_.end()) throw ProtocolError("own key no longer retained");
  return it->second;
}

std::set<Player> ProtocolPlayer::lies_detected_at(long t) const {
  auto it = lies_.find(t);
  return it == lies_.end() ? std::set<Player>{} : it->second;
}

}  // namespace netfolk
