#include "netfolk/config.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <map>
#include <nlohmann/json.hpp>
#include <thread>

#include "netfolk/fixtures.hpp"
#include "netfolk/seed.hpp"

namespace netfolk {

using nlohmann::json;

namespace {

const std::map<std::string, LieDirective::Kind> kDirectives = {
    {"drop_claims", LieDirective::Kind::DropClaims},
    {"fake_claim", LieDirective::Kind::FakeClaim},
    {"false_accuse", LieDirective::Kind::FalseAccuse},
    {"forge_accusation", LieDirective::Kind::ForgeAccusation},
    {"drop_relays", LieDirective::Kind::DropRelays},
    {"withhold_accusations", LieDirective::Kind::WithholdAccusations},
    {"omit", LieDirective::Kind::Omit},
};

template <typename T>
T get(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

DeviationId parse_id(const json& j) {
  return {j.at("player").get<Player>(), j.at("period").get<long>()};
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Network parse_graph(const json& j) {
  if (j.contains("edges")) {
    std::vector<std::pair<Player, Player>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<Player>(), e.at(1).get<Player>());
    return Network(j.at("n").get<int>(), edges);
  }
  const auto name = j.at("fixture").get<std::string>();
  if (name == "path") return fixtures::path(j.at("n"));
  if (name == "cycle") return fixtures::cycle(j.at("n"));
  if (name == "complete") return fixtures::complete(j.at("n"));
  if (name == "wheel") return fixtures::wheel(j.at("n"));
  if (name == "petersen") return fixtures::petersen();
  if (name == "theta") return fixtures::theta(j.at("paths").get<std::vector<int>>());
  if (name == "two_triangles") return fixtures::two_triangles();
  if (name == "two_cycles") return fixtures::two_cycles();
  throw ConfigError("unknown graph fixture " + name);
}

StageGame parse_game(const json& j, const Network& g) {
  if (j.contains("fixture")) {
    const auto name = j.at("fixture").get<std::string>();
    if (name == "dilemma") {
      const double b = get(j, "benefit", 2.0), c = get(j, "cost", 1.0);
      return get(j, "dense", false) ? fixtures::network_dilemma_dense(g, b, c)
                                    : fixtures::network_dilemma(g, b, c);
    }
    if (name == "pennies") return fixtures::pennies_ring(g.size());
    throw ConfigError("unknown game fixture " + name);
  }
  auto actions = j.at("actions").get<std::vector<int>>();
  if (j.contains("payoffs")) {
    return StageGame::dense(std::move(actions), j.at("payoffs").get<std::vector<PayoffPoint>>());
  }
  std::vector<LocalPayoff> local;
  for (const auto& l : j.at("local")) {
    local.push_back({l.at("scope").get<std::vector<Player>>(), l.at("table").get<std::vector<double>>()});
  }
  return StageGame::local(std::move(actions), std::move(local),
                          get(j, "hull", std::vector<ActionProfile>{}));
}

AdversaryScript parse_lies(const json& j) {
  AdversaryScript s;
  for (const auto& l : get(j, "liars", json::array())) {
    Lie lie;
    lie.liar = l.at("player");
    for (const auto& d : l.at("directives")) {
      LieDirective dir;
      const auto kind = d.at("kind").get<std::string>();
      auto it = kDirectives.find(kind);
      if (it == kDirectives.end()) throw ConfigError("unknown lie directive " + kind);
      dir.kind = it->second;
      if (d.contains("claim")) dir.claim = parse_id(d.at("claim"));
      dir.target = get(d, "target", Player{0});
      dir.stage = get(d, "stage", 0L);
      lie.directives.push_back(dir);
    }
    s.liars[l.at("stage").get<long>()].push_back(std::move(lie));
  }
  if (j.contains("announcement")) {
    const auto& a = j.at("announcement");
    s.announcement = FalseAnnouncement{a.at("announcer"), a.at("accused"), a.at("stage"),
                                       get(a, "drop_relays", true)};
  }
  return s;
}

RunConfig parse_run_config(const json& j) {
  try {
    RunConfig c;
    c.graph = parse_graph(j.at("graph"));
    c.game = parse_game(j.at("game"), c.graph);
    c.name = get(j, "name", std::string("run"));
    if (j.contains("v")) {
      c.v = j.at("v").get<PayoffPoint>();
    } else if (get(j.at("game"), "fixture", std::string()) == "dilemma") {
      c.v = fixtures::dilemma_target(c.game, get(j, "eps", 0.1));
    } else {
      throw ConfigError("target payoff v missing");
    }
    if (j.contains("delta") && !j.at("delta").is_string()) c.delta = j.at("delta").get<double>();
    c.horizon = get(j, "horizon", 0L);
    c.seed = get(j, "seed", std::uint64_t{1});
    const auto mode = get(j, "mode", std::string("unilateral"));
    if (mode != "unilateral" && mode != "stress") throw ConfigError("unknown mode " + mode);
    c.mode = mode == "stress" ? RunMode::Stress : RunMode::Unilateral;
    c.accounting = get(j, "accounting", std::string("realized")) == "expected"
                       ? Accounting::Expected
                       : Accounting::Realized;
    c.protocol.n_prime = get(j, "n_prime", 0);
    c.protocol.decode = get(j, "decode", std::string("any")) == "consecutive"
                            ? DecodeMode::ConsecutiveStages
                            : DecodeMode::AnySubsequence;
    if (j.contains("adversary")) {
      const auto& a = j.at("adversary");
      c.lies = parse_lies(a);
      for (const auto& d : get(a, "deviations", json::array())) {
        c.deviations.push_back({d.at("player"), d.at("stage"), get(d, "action", -1)});
      }
      if (a.contains("deviation")) {
        const auto& d = a.at("deviation");
        c.deviations.push_back({d.at("player"), d.at("stage"), get(d, "action", -1)});
      }
    }
    if (c.game.players() != c.graph.size()) throw ConfigError("game and graph sizes differ");
    if (static_cast<int>(c.v.size()) != c.graph.size()) throw ConfigError("v has the wrong length");
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

EquilibriumPlan make_plan(const RunConfig& c) {
  const bool stress = c.mode == RunMode::Stress;
  double delta = 0.0;
  if (c.delta) {
    delta = *c.delta;
  } else {
    EquilibriumPlan probe(c.graph, c.game, c.v, 0.999, c.protocol, stress);
    delta = (1.0 + probe.thresholds().delta_bar) / 2.0;
  }
  return EquilibriumPlan(c.graph, c.game, c.v, delta, c.protocol, stress);
}

std::vector<ActionDeviation> resolve_deviations(EquilibriumPlan& plan, const RunConfig& c) {
  auto out = c.deviations;
  for (auto& d : out) {
    if (d.player < 1 || d.player > plan.players() || d.stage < 1) {
      throw ConfigError("invalid deviation");
    }
    if (d.action < 0) {
      d.action = (plan.main_path().profile(d.stage)[d.player - 1] + 1) %
                 plan.game().actions(d.player);
    }
  }
  return out;
}

Campaign parse_campaign(const json& j) {
  try {
    Campaign c;
    for (const auto& f : j.at("fixtures")) c.fixtures.push_back(parse_run_config(f));
    if (c.fixtures.empty()) throw ConfigError("empty campaign");
    c.first_seed = get(j, "first_seed", std::uint64_t{1});
    c.seeds = get(j, "seeds", 100L);
    c.lie_rate = get(j, "lie_rate", 0.5);
    c.greedy = get(j, "greedy", true);
    c.exhaustive = get(j, "exhaustive", false);
    c.verifiers = get(j, "verifiers",
                      std::vector<std::string>{"no_false_learning", "block_progress", "deadline", "audit"});
    c.threads = get(j, "threads", 0u);
    for (const auto& v : c.verifiers) {
      if (v != "no_false_learning" && v != "block_progress" && v != "deadline" && v != "audit") {
        throw ConfigError("unknown verifier " + v);
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed campaign: ") + e.what());
  }
}

bool CampaignReport::passed() const {
  return !entries.empty() &&
         std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.second.passed(); });
}

json CampaignReport::to_json() const {
  json out = json::array();
  for (const auto& [fixture, r] : entries) {
    out.push_back({{"fixture", fixture},
                   {"verifier", r.name},
                   {"pass", r.passed()},
                   {"runs", r.runs},
                   {"violations", r.violations},
                   {"out_of_hypothesis", r.out_of_hypothesis},
                   {"witnesses", r.witnesses}});
  }
  return {{"pass", passed()}, {"reports", out}};
}

namespace {

struct Batch {
  std::vector<ProtocolRun> runs;
  std::vector<AdversaryScript> scripts;
};

Batch random_batch(const RunConfig& f, const ProtocolContext& ctx, const Campaign& c,
                   long from, long to) {
  Batch b;
  for (long i = from; i < to; ++i) {
    const std::uint64_t seed = c.first_seed + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(stream_seed(seed, 17));
    const DeviationId d{static_cast<Player>(1 + rng() % f.graph.size()),
                        static_cast<long>(1 + rng() % 5)};
    auto script = random_schedule(f.graph, d, d.period + 1, d.period + ctx.L, c.lie_rate,
                                  ctx.n_prime, rng);
    ProtocolRunOptions o;
    o.seed = seed;
    o.mode = f.mode;
    b.runs.push_back(run_protocol(ctx, script, o));
    b.scripts.push_back(std::move(script));
  }
  return b;
}

VerifierReport audit_report(const RunConfig& f) {
  auto plan = make_plan(f);
  const Player context = f.deviations.empty() ? 1 : f.deviations.front().player;
  const auto a = deviation_gain_audit(plan, context, 1e-6, f.seed);
  VerifierReport r;
  r.name = "audit";
  r.runs = a.cases;
  r.violations = a.profitable;
  for (const auto& w : a.witnesses) {
    r.witnesses.push_back(w.window + " player " + std::to_string(w.player) + " stage " +
                          std::to_string(w.stage) + " action " + std::to_string(w.action) +
                          " gain " + std::to_string(w.gain) + " bound " + std::to_string(w.bound));
  }
  return r;
}

}  // namespace

CampaignReport run_campaign(const Campaign& c) {
  if (c.fixtures.empty()) throw ConfigError("empty campaign");
  auto wants = [&](const char* v) {
    return std::find(c.verifiers.begin(), c.verifiers.end(), v) != c.verifiers.end();
  };
  // Validate everything first.
  std::vector<std::unique_ptr<ProtocolContext>> contexts;
  for (const auto& f : c.fixtures) {
    if (f.mode == RunMode::Unilateral) make_plan(f);
    contexts.push_back(std::make_unique<ProtocolContext>(f.graph, f.protocol));
  }

  CampaignReport report;
  const unsigned threads =
      c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t fi = 0; fi < c.fixtures.size(); ++fi) {
    const auto& f = c.fixtures[fi];
    const auto& ctx = *contexts[fi];
    std::vector<std::future<Batch>> jobs;
    const long chunk = (c.seeds + threads - 1) / threads;
    for (long from = 0; from < c.seeds; from += chunk) {
      jobs.push_back(std::async(std::launch::async, random_batch, std::cref(f), std::cref(ctx),
                                std::cref(c), from, std::min(c.seeds, from + chunk)));
    }
    Batch all;
    for (auto& j : jobs) {
      auto b = j.get();
      std::move(b.runs.begin(), b.runs.end(), std::back_inserter(all.runs));
      std::move(b.scripts.begin(), b.scripts.end(), std::back_inserter(all.scripts));
    }
    for (Player k = 1; c.greedy && k <= f.graph.size(); ++k) {
      AdversaryScript s;
      s.deviation = DeviationId{k, 1};
      ProtocolRunOptions o;
      o.seed = c.first_seed;
      o.mode = f.mode;
      o.adaptive = greedy_adversary(ctx, *s.deviation);
      all.runs.push_back(run_protocol(ctx, s, o));
      all.scripts.push_back(std::move(s));
    }
    if (c.exhaustive) {
      for (auto& s : exhaustive_single_liar(ctx, {1, 1})) {
        ProtocolRunOptions o;
        o.seed = c.first_seed;
        o.mode = f.mode;
        all.runs.push_back(run_protocol(ctx, s, o));
        all.scripts.push_back(std::move(s));
      }
    }

    std::vector<VerifierReport> reports;
    if (wants("no_false_learning")) reports.push_back(verify_no_false_learning(all.runs, f.graph, all.scripts));
    if (wants("block_progress")) reports.push_back(verify_block_progress(all.runs, f.graph.size()));
    if (wants("deadline")) reports.push_back(verify_deadline(all.runs, f.graph.size()));
    if (wants("audit") && f.mode == RunMode::Unilateral) reports.push_back(audit_report(f));
    for (auto& r : reports) {
      if (f.mode == RunMode::Stress) {
        r.out_of_hypothesis += r.violations;
        r.violations = 0;
      }
      report.entries.emplace_back(f.name, std::move(r));
    }
  }
  return report;
}

}  // namespace netfolk
