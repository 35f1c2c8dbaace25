#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <random>
#include <vector>

#include "netfolk/protocol.hpp"

namespace netfolk {

/// One alteration a liar applies to its honest message.
struct LieDirective {
  enum class Kind {
    DropClaims,           // send the empty claim
    FakeClaim,            // claim `claim` instead of the honest slots
    FalseAccuse,          // accuse neighbor `target` with its true stage-`stage` key
    ForgeAccusation,      // accuse non-neighbor `target` with a fabricated key
    DropRelays,           // forward nothing (triplets and action reports)
    WithholdAccusations,  // replace every neighbor triplet by a decoy
    Omit,                 // send nothing to neighbor `target`
  };
  Kind kind = Kind::DropClaims;
  DeviationId claim;
  Player target = 0;
  long stage = 0;
};

struct Lie {
  Player liar = 0;
  std::vector<LieDirective> directives;
};

/// Neighbor `announcer` claims that `accused` deviated at `stage - 1` and
/// keeps claiming it for the whole partition.
struct FalseAnnouncement {
  Player announcer = 0;
  Player accused = 0;
  long stage = 0;
  bool drop_relays = true;
};

struct AdversaryScript {
  std::optional<DeviationId> deviation;
  std::map<long, std::vector<Lie>> liars;
  std::optional<FalseAnnouncement> announcement;

  /// Players whose outputs are altered at stage t (deviator, liars,
  /// announcer).
  [[nodiscard]] std::vector<Player> mutated_at(long t) const;
  /// True when every stage alters at most one player.
  [[nodiscard]] bool unilateral() const;
};

/// Applies `lie` to the liar's honest stage-t message. `state` supplies the
/// liar's own observations (neighbor keys); `rng` draws fabricated keys.
ProtocolMessage apply_lie(const ProtocolMessage& honest, const LieDirective& d,
                          const ProtocolPlayer& state, const Network& g, long t,
                          std::mt19937_64& rng);

/// Outputs altered at one stage.
struct StageMutation {
  std::set<Player> mutated;
  std::map<Player, std::set<Player>> omitted;  // sender -> skipped neighbors
  long forged_matches = 0;  // fabricated keys that hit the true key

  [[nodiscard]] bool delivers(Player from, Player to) const {
    auto it = omitted.find(from);
    return it == omitted.end() || !it->second.count(to);
  }
};

using PlayerLookup = std::function<const ProtocolPlayer&(Player)>;

/// Applies one lie to the composed stage-t messages (`out[p-1]` is p's).
void apply_lie(const Lie& lie, long t, const ProtocolContext& ctx, const PlayerLookup& state,
               std::vector<ProtocolMessage>& out, StageMutation& mutation, std::mt19937_64& rng);
/// Applies the script's announcement and scripted lies for stage t.
void apply_script(const AdversaryScript& script, long t, const ProtocolContext& ctx,
                  const PlayerLookup& state, std::vector<ProtocolMessage>& out,
                  StageMutation& mutation, std::mt19937_64& rng);

/// Uniformly random single-liar schedule over [from, to]: each stage lies
/// with probability `rate`, picking a random player and directive.
AdversaryScript random_schedule(const Network& g, const DeviationId& deviation, long from,
                                long to, double rate, int n_prime, std::mt19937_64& rng);

}  // namespace netfolk
