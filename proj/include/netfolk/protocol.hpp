#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "netfolk/graph.hpp"

namespace netfolk {

class ProtocolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A deviation in action: player `deviator` deviated at stage `period`.
struct DeviationId {
  Player deviator = 0;
  long period = 0;
  auto operator<=>(const DeviationId&) const = default;
};

/// 64-bit token standing in for a uniform draw on [0,1].
using AuthKey = std::uint64_t;

struct AccusationTriplet {
  Player accused = 0;
  long stage = 0;
  AuthKey key = 0;
  auto operator<=>(const AccusationTriplet&) const = default;
};

/// Pure actions `player` was seen playing at stages from, from+1, ...
struct ActionReport {
  Player player = 0;
  long from = 0;
  std::vector<int> actions;
  bool operator==(const ActionReport&) const = default;
};

/// One broadcast. An empty `deviation_slots` is the empty claim. Several
/// slots multiplex concurrent protocol instances.
struct ProtocolMessage {
  std::vector<DeviationId> deviation_slots;
  AuthKey auth_key = 0;
  /// At most one triplet per neighbor of the sender, about that neighbor.
  std::vector<AccusationTriplet> neighbor_triplets;
  /// Triplets about players outside the sender's closed neighborhood.
  std::vector<AccusationTriplet> relay_triplets;
  /// Punishment-phase action sequences flooded at the start of the reward.
  std::vector<ActionReport> reports;

  [[nodiscard]] bool bare() const {
    return deviation_slots.empty() && neighbor_triplets.empty() && relay_triplets.empty() &&
           reports.empty();
  }
  [[nodiscard]] bool claims(const DeviationId& d) const;
  bool operator==(const ProtocolMessage&) const = default;
};

/// L = 1 + (n'-3)(2n'-3); throws ProtocolError when n' <= 3.
long protocol_length(int n_prime);

class BlockPartition {
 public:
  BlockPartition() = default;
  BlockPartition(long t0, int n_prime);

  [[nodiscard]] long t0() const { return t0_; }
  [[nodiscard]] int n_prime() const { return n_prime_; }
  [[nodiscard]] int blocks() const { return n_prime_ - 3; }
  [[nodiscard]] long block_length() const { return 2L * n_prime_ - 3; }
  [[nodiscard]] long first_stage() const { return t0_ + 1; }
  [[nodiscard]] long last_stage() const { return t0_ + blocks() * block_length(); }
  [[nodiscard]] bool covers(long t) const { return t >= first_stage() && t <= last_stage(); }
  /// Block index of stage t: 0 before the partition, blocks()+1 after it.
  [[nodiscard]] int block_of(long t) const;
  [[nodiscard]] long block_start(int b) const { return t0_ + 1 + (b - 1) * block_length(); }
  [[nodiscard]] long block_end(int b) const { return t0_ + b * block_length(); }
  [[nodiscard]] bool is_block_end(long t) const {
    return covers(t) && (t - t0_) % block_length() == 0;
  }

 private:
  long t0_ = 0;
  int n_prime_ = 4;
};

BlockPartition block_partition(long t0, int n_prime);

enum class DecodeMode {
  AnySubsequence,     // any n'-1 claiming stages within the block
  ConsecutiveStages,  // n'-1 claims at consecutive stages
};

struct ProtocolConfig {
  int n_prime = 0;  // 0: compute the longest cycle of the network
  DecodeMode decode = DecodeMode::AnySubsequence;
  /// A claim at block b about k is implausible when b - b0 + offset < d(j,k).
  int distance_offset = 0;
};

/// Immutable data shared by every player of one network.
struct ProtocolContext {
  ProtocolContext(const Network& g, ProtocolConfig config);

  Network graph;
  ProtocolConfig config;
  int n_prime;
  long L;
  std::vector<std::vector<int>> dist;
};

/// Behavioural tags after j falsely announces a deviation of its neighbor i.
struct AnnouncementResponse {
  std::set<Player> lie_detected;  // common neighbors of i and j
  std::set<Player> uninformed;    // other neighbors of j, excluding i
};
AnnouncementResponse false_announcement_response(const Network& g, Player announcer,
                                                 Player accused);

/// True iff some window of the claim stages escapes the accusations.
/// `claims` are the sorted stages at which the neighbor repeated the claim
/// within one block; `accused_by(tau)` returns the earliest stage at which
/// an accusation carrying the neighbor's true stage-tau key arrived.
template <typename AccusedBy>
bool decodes(const std::vector<long>& claims, int n_prime, DecodeMode mode,
             AccusedBy accused_by) {
  const std::size_t need = static_cast<std::size_t>(n_prime) - 1;
  if (claims.size() < need) return false;
  for (std::size_t idx = 0; idx + need <= claims.size(); ++idx) {
    const long first = claims[idx];
    const long last = claims[idx + need - 1];
    if (mode == DecodeMode::ConsecutiveStages &&
        last - first != static_cast<long>(need) - 1) {
      continue;
    }
    const std::optional<long> hit = accused_by(first);
    if (!hit || *hit > last) return true;
  }
  return false;
}

struct InstanceState {
  BlockPartition partition;
  bool knows = false;
  std::optional<int> learned_at_block;  // 0: witnessed the deviation directly
  /// Stages of the current block at which each neighbor claimed the id.
  std::map<Player, std::vector<long>> claims;
  /// Neighbors deemed to know the id.
  std::set<Player> believed_knowledge;
};

struct ProtocolEvent {
  enum class Kind { Learned, LieDetected, Discarded };
  Kind kind;
  long stage;
  DeviationId id;  // Learned / Discarded
  Player about;    // LieDetected: the neighbor caught lying
  int block = 0;
};

/// Protocol memory and honest behaviour of one player.
class ProtocolPlayer {
 public:
  ProtocolPlayer(const ProtocolContext& ctx, Player self, std::uint64_t seed);

  [[nodiscard]] Player self() const { return self_; }

  /// The player observed (or committed) a deviation in action at d.period;
  /// it knows the deviation from that stage on.
  void witness(const DeviationId& d);

  /// Honest stage-t message. Draws the stage-t key and any decoys.
  ProtocolMessage compose(long t);
  /// What actually left the player at stage t (possibly altered by a liar).
  void record_sent(long t, const ProtocolMessage& sent);
  /// Stage-t messages from every neighbor, keyed by sender.
  void receive(long t, const std::map<Player, ProtocolMessage>& inbox);
  /// Block-end decoding and instance housekeeping after stage t.
  void end_stage(long t);

  [[nodiscard]] bool knows(const DeviationId& d) const;
  [[nodiscard]] std::vector<DeviationId> known() const;
  [[nodiscard]] const std::map<DeviationId, InstanceState>& instances() const {
    return instances_;
  }
  /// Neighbor key observed at stage t, if still retained.
  [[nodiscard]] std::optional<AuthKey> key_of(Player j, long t) const;
  [[nodiscard]] AuthKey own_key(long t) const;
  /// Lies by neighbors detected on stage-t messages.
  [[nodiscard]] std::set<Player> lies_detected_at(long t) const;
  [[nodiscard]] bool in_phase_two(long t) const;

  [[nodiscard]] const std::vector<ProtocolEvent>& events() const { return events_; }
  void clear_events() { events_.clear(); }
  [[nodiscard]] long relay_overflow() const { return relay_overflow_; }

  /// Detection rules applied to neighbor j's stage-t message.
  [[nodiscard]] bool detect_lie(Player j, const ProtocolMessage& m, long t) const;
  /// Own observations contradict the claim.
  [[nodiscard]] bool refuted(const DeviationId& d, long t) const;

 private:
  struct Pending {
    AccusationTriplet triplet;
    long due;      // stage at which it should be forwarded
    bool retried;  // already moved to the auto-correction stage
  };

  void prune(long t);

  const ProtocolContext* ctx_;
  Player self_;
  std::mt19937_64 rng_;
  std::map<DeviationId, InstanceState> instances_;
  std::set<DeviationId> witnessed_;
  std::map<long, AuthKey> own_keys_;
  std::map<long, std::map<Player, AuthKey>> ledger_;  // stage -> neighbor -> key
  std::map<std::pair<Player, long>, long> accusations_;  // (neighbor, stage) -> arrival
  std::map<long, std::set<Player>> lies_;                 // stage -> liars detected
  std::vector<Pending> pending_;
  struct TripletHash {
    std::size_t operator()(const AccusationTriplet& a) const {
      return std::hash<std::uint64_t>{}(a.key ^ (static_cast<std::uint64_t>(a.stage) << 20) ^
                                        static_cast<std::uint64_t>(a.accused));
    }
  };
  std::unordered_set<AccusationTriplet, TripletHash> seen_;
  std::vector<ProtocolEvent> events_;
  long relay_overflow_ = 0;
};

}  // namespace netfolk
