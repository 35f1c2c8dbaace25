#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "netfolk/adversary.hpp"
#include "netfolk/protocol.hpp"

namespace netfolk {

enum class RunMode { Unilateral, Stress };
enum class TraceLevel { None, Events, Full };

/// Line-delimited JSON trace sink. Writes nothing when `out` is null.
class TraceWriter {
 public:
  TraceWriter() = default;
  TraceWriter(std::ostream* out, TraceLevel level) : out_(out), level_(level) {}

  [[nodiscard]] bool events() const { return out_ && level_ != TraceLevel::None; }
  [[nodiscard]] bool full() const { return out_ && level_ == TraceLevel::Full; }
  void line(const std::string& json) const;

 private:
  std::ostream* out_ = nullptr;
  TraceLevel level_ = TraceLevel::None;
};

std::string message_json(long t, Player sender, const std::vector<Player>& audience,
                         const ProtocolMessage& m);

/// Knowledge or lie-detection event of `player`; empty for other kinds.
std::string event_json(Player player, const ProtocolEvent& e);

struct LearnRecord {
  Player player;
  DeviationId id;
  long stage;
  int block;
};

struct ProtocolRun {
  std::optional<DeviationId> truth;
  int n_prime = 0;
  long L = 0;
  long horizon = 0;
  bool unilateral = true;
  /// knowers[t - 1]: players knowing the true deviation after stage t.
  std::vector<int> knowers;
  /// Knower count after each block of the true deviation's partition;
  /// entry 0 is the count right after the deviation stage.
  std::vector<int> block_knowers;
  std::vector<LearnRecord> learned;        // every learning of the true id
  std::vector<LearnRecord> false_learned;  // every learning of another id
  std::vector<std::optional<long>> learned_stage;  // per player (index p-1)
  long lies_detected = 0;
  long forged_matches = 0;
  long relay_overflow = 0;
};

/// Chooses the stage-t lie after observing every player's state; used for
/// worst-case searches. Its lies are applied in addition to the script.
using AdaptiveAdversary =
    std::function<std::optional<Lie>(long t, const std::vector<ProtocolPlayer>& players)>;

struct ProtocolRunOptions {
  long horizon = 0;  // 0: through the end of the true (or announced) partition
  std::uint64_t seed = 1;
  RunMode mode = RunMode::Unilateral;
  TraceWriter trace;
  AdaptiveAdversary adaptive;
};

/// Runs the communication protocol alone on network `ctx.graph`.
ProtocolRun run_protocol(const ProtocolContext& ctx, const AdversaryScript& script,
                         const ProtocolRunOptions& options);

struct VerifierReport {
  std::string name;
  long runs = 0;
  long violations = 0;
  long out_of_hypothesis = 0;  // stress runs that failed
  std::vector<std::string> witnesses;  // first few violation descriptions

  [[nodiscard]] bool passed() const { return violations == 0; }
  void merge(const VerifierReport& other);
};

/// No player learns a deviation other than the scripted one; with a false
/// announcement, no neighbor of the announcer outside the accused's
/// neighborhood learns it.
VerifierReport verify_no_false_learning(const std::vector<ProtocolRun>& runs, const Network& g,
                             const std::vector<AdversaryScript>& scripts);
/// The knower set strictly grows every block until it is everyone.
VerifierReport verify_block_progress(const std::vector<ProtocolRun>& runs, int players);
/// Everyone knows the true deviation by t0 + L.
VerifierReport verify_deadline(const std::vector<ProtocolRun>& runs, int players);

/// Greedy liar against the true deviation: in every block it silences the
/// knower that is the sole informed neighbor of the most non-knowers for
/// n'-1 stages, then the runner-up for the rest of the block.
AdaptiveAdversary greedy_adversary(const ProtocolContext& ctx, const DeviationId& deviation);

/// Every schedule with exactly one lie (one stage, one player, one
/// directive) within the partition, plus one persistent liar per player
/// and directive.
std::vector<AdversaryScript> exhaustive_single_liar(const ProtocolContext& ctx,
                                                    const DeviationId& deviation);

}  // namespace netfolk
