#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>

#include "netfolk/config.hpp"

using namespace netfolk;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kHypothesis = 3 };

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string mode;
  std::string trace = "events";
};

std::optional<std::uint64_t> seed_of(const Flags& f) {
  if (f.seed) return f.seed;
  if (const char* env = std::getenv("NETFOLK_SEED")) return std::stoull(env);
  return std::nullopt;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

void apply_flags(RunConfig& c, const Flags& f) {
  if (auto s = seed_of(f)) c.seed = *s;
  if (f.mode == "stress") c.mode = RunMode::Stress;
  if (f.mode == "unilateral") c.mode = RunMode::Unilateral;
}

int cmd_check(const Flags& f) {
  auto c = parse_run_config(read_json(f.config));
  apply_flags(c, f);
  const auto& g = c.graph;
  std::cout << "players " << g.size() << ", edges " << g.edge_count() << "\n";
  if (!is_two_connected(g) && c.mode == RunMode::Unilateral) {
    const auto cut = articulation_points(g);
    std::cout << "FAIL network is not 2-connected";
    if (!cut.empty()) std::cout << " (articulation vertex " << cut.front() << ")";
    std::cout << "\n";
    return kHypothesis;
  }
  if (!interior_nonempty(c.game)) {
    std::cout << "FAIL feasible individually rational set has empty interior\n";
    return kHypothesis;
  }
  const auto certs = minmax_all(c.game);
  std::cout << "minmax";
  for (const auto& m : certs) std::cout << " " << m.value;
  std::cout << "\n";
  const int n_prime = c.protocol.n_prime ? c.protocol.n_prime : longest_cycle_length(g);
  std::cout << "n' " << n_prime << "\n";
  if (n_prime <= 3) {
    std::cout << "warning: degenerate protocol (n' = " << n_prime
              << "), no message schedule exists\n";
    return kOk;
  }
  auto plan = make_plan(c);
  const auto& th = plan.thresholds();
  std::cout << "L " << plan.L() << "\n"
            << "lambda " << th.lambda << "\nrho " << th.rho << "\nT";
  for (int t : th.T) std::cout << " " << t;
  std::cout << "\nv'";
  for (double x : th.v_prime) std::cout << " " << x;
  std::cout << "\ndelta_bar " << std::setprecision(10) << th.delta_bar << "\ndelta "
            << plan.delta() << "\n";
  if (plan.delta() <= th.delta_bar) {
    std::cout << "FAIL delta " << plan.delta() << " not above delta_bar\n";
    return kHypothesis;
  }
  std::cout << "ok\n";
  return kOk;
}

int cmd_run(const Flags& f) {
  const auto raw = read_json(f.config);
  auto c = parse_run_config(raw);
  apply_flags(c, f);
  auto plan = make_plan(c);
  std::filesystem::create_directories(f.out);
  std::ofstream trace(std::filesystem::path(f.out) / "trace.jsonl");
  const TraceLevel level = f.trace == "full" ? TraceLevel::Full : TraceLevel::Events;
  trace << json{{"seed", c.seed}, {"config_hash", fnv1a(raw.dump())}}.dump() << "\n";

  GameRunOptions o;
  o.seed = c.seed;
  o.mode = c.mode;
  o.accounting = c.accounting;
  o.deviations = resolve_deviations(plan, c);
  o.lies = c.lies;
  o.horizon = c.horizon ? c.horizon : (o.deviations.empty() ? 100 : 0);
  o.trace = TraceWriter(&trace, level);
  const auto run = run_game(plan, o);

  std::ofstream csv(std::filesystem::path(f.out) / "stages.csv");
  csv << "stage,knowers";
  for (Player p = 1; p <= plan.players(); ++p) csv << ",payoff_" << p;
  csv << "\n" << std::setprecision(12);
  for (long t = 1; t <= run.horizon; ++t) {
    csv << t << "," << run.knowers[t - 1];
    for (double u : run.payoffs[t - 1]) csv << "," << u;
    csv << "\n";
  }

  std::cout << "horizon " << run.horizon << ", L " << plan.L() << ", delta " << plan.delta()
            << "\n";
  if (!o.deviations.empty()) {
    std::cout << "knowledge timeline:";
    int last = -1;
    for (long t = 1; t <= run.horizon; ++t) {
      if (run.knowers[t - 1] != last) {
        last = run.knowers[t - 1];
        std::cout << " " << t << ":" << last;
      }
    }
    std::cout << "\n";
  }
  std::cout << "lies detected " << run.lies_detected << (run.fallback ? ", fallback reached" : "")
            << "\npayoff (v):";
  for (int i = 0; i < plan.players(); ++i) {
    std::cout << " " << run.total[i] << " (" << c.v[i] << ")";
  }
  std::cout << (run.tail_closed ? "" : "\ntail not closed: totals cover the horizon only")
            << "\n";
  return kOk;
}

int cmd_verify(const Flags& f) {
  auto c = parse_campaign(read_json(f.config));
  if (auto s = seed_of(f)) c.first_seed = *s;
  for (auto& fx : c.fixtures) apply_flags(fx, f);
  const auto report = run_campaign(c);
  std::filesystem::create_directories(f.out);
  std::ofstream(std::filesystem::path(f.out) / "report.json") << report.to_json().dump(2) << "\n";
  for (const auto& [fixture, r] : report.entries) {
    std::cout << (r.passed() ? "PASS " : "FAIL ") << fixture << " " << r.name << " runs "
              << r.runs << " violations " << r.violations;
    if (r.out_of_hypothesis) std::cout << " out-of-hypothesis " << r.out_of_hypothesis;
    std::cout << "\n";
    for (const auto& w : r.witnesses) std::cout << "  " << w << "\n";
  }
  return report.passed() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Folk-theorem strategies with network communication"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "run seed (default: NETFOLK_SEED, then config)");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--mode", flags.mode)->check(CLI::IsMember({"unilateral", "stress"}));
    sub->add_option("--trace", flags.trace)->check(CLI::IsMember({"full", "events"}));
  };
  auto* check = app.add_subcommand("check", "validate the hypotheses and print certificates");
  auto* run = app.add_subcommand("run", "simulate one config");
  auto* verify = app.add_subcommand("verify", "run a verification campaign");
  for (auto* s : {check, run, verify}) add_common(s);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(flags);
    if (run->parsed()) return cmd_run(flags);
    return cmd_verify(flags);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kHypothesis;
  }
}
