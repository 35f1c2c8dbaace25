#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "netfolk/engine.hpp"

namespace netfolk {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One economy plus everything needed to play it.
struct RunConfig {
  std::string name;
  Network graph;
  StageGame game;
  PayoffPoint v;
  std::optional<double> delta;  // empty: (1 + delta_bar) / 2
  long horizon = 0;
  std::uint64_t seed = 1;
  RunMode mode = RunMode::Unilateral;
  Accounting accounting = Accounting::Realized;
  ProtocolConfig protocol;
  std::vector<ActionDeviation> deviations;  // action < 0: flip the prescribed action
  AdversaryScript lies;
};

/// Graph: {"fixture": name, "n": k} or {"n": k, "edges": [[i, j], ...]}.
Network parse_graph(const nlohmann::json& j);
/// Game: {"fixture": "dilemma"|"pennies", ...} or explicit
/// {"actions": [...], "payoffs": [[u_1..u_n], ...]} (dense) or
/// {"actions": [...], "local": [{"scope": [...], "table": [...]}], "hull": [...]}.
StageGame parse_game(const nlohmann::json& j, const Network& g);
AdversaryScript parse_lies(const nlohmann::json& j);
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Builds the plan, resolving the automatic discount factor.
EquilibriumPlan make_plan(const RunConfig& c);
/// Scripted deviations with flipped actions resolved against the main path.
std::vector<ActionDeviation> resolve_deviations(EquilibriumPlan& plan, const RunConfig& c);

struct Campaign {
  std::vector<RunConfig> fixtures;
  std::uint64_t first_seed = 1;
  long seeds = 100;
  double lie_rate = 0.5;
  bool greedy = true;
  bool exhaustive = false;
  std::vector<std::string> verifiers;  // no_false_learning, block_progress, deadline, audit
  unsigned threads = 0;                // 0: hardware concurrency
};

Campaign parse_campaign(const nlohmann::json& j);

struct CampaignReport {
  std::vector<std::pair<std::string, VerifierReport>> entries;  // (fixture, report)
  [[nodiscard]] bool passed() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

CampaignReport run_campaign(const Campaign& c);

}  // namespace netfolk
