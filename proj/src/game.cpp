#include "netfolk/game.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "netfolk/lp.hpp"

namespace netfolk {

namespace {

constexpr std::size_t kMaxEnumeratedHull = 1u << 16;

std::size_t product_size(const std::vector<int>& counts, std::size_t cap) {
  std::size_t total = 1;
  for (int c : counts) {
    if (c < 1) throw GameError("action count must be positive");
    if (total > cap / static_cast<std::size_t>(c)) return cap + 1;
    total *= static_cast<std::size_t>(c);
  }
  return total;
}

// Advances a mixed-radix counter (last digit fastest); false on wrap.
bool next_tuple(std::vector<int>& digits, const std::vector<int>& radix) {
  for (int p = static_cast<int>(digits.size()) - 1; p >= 0; --p) {
    if (++digits[p] < radix[p]) return true;
    digits[p] = 0;
  }
  return false;
}

double inf_norm_diff(const PayoffPoint& a, const PayoffPoint& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

std::vector<ActionProfile> enumerate_profiles(const std::vector<int>& action_counts,
                                              std::size_t cap) {
  if (product_size(action_counts, cap) > cap) {
    throw GameError("profile space exceeds " + std::to_string(cap) + " profiles");
  }
  std::vector<ActionProfile> out;
  ActionProfile a(action_counts.size(), 0);
  do {
    out.push_back(a);
  } while (next_tuple(a, action_counts));
  return out;
}

StageGame StageGame::dense(std::vector<int> action_counts,
                           const std::vector<PayoffPoint>& payoffs) {
  const int n = static_cast<int>(action_counts.size());
  if (n < 1) throw GameError("game needs at least one player");
  for (int p = 0; p < n; ++p) {
    if (action_counts[p] < 2) {
      throw GameError("player " + std::to_string(p + 1) + " needs at least 2 actions");
    }
  }
  const std::size_t total = product_size(action_counts, kMaxEnumeratedHull);
  if (total > kMaxEnumeratedHull) throw GameError("dense payoff tensor too large");
  if (payoffs.size() != total) {
    throw GameError("payoff tensor has " + std::to_string(payoffs.size()) +
                    " entries, expected " + std::to_string(total));
  }
  std::vector<Player> everyone(n);
  std::iota(everyone.begin(), everyone.end(), 1);
  std::vector<LocalPayoff> local(n);
  for (int p = 0; p < n; ++p) {
    local[p].scope = everyone;
    local[p].table.resize(total);
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (static_cast<int>(payoffs[idx].size()) != n) {
      throw GameError("payoff vector " + std::to_string(idx) + " has wrong dimension");
    }
    for (int p = 0; p < n; ++p) {
      if (!std::isfinite(payoffs[idx][p])) throw GameError("non-finite payoff");
      local[p].table[idx] = payoffs[idx][p];
    }
  }
  StageGame g;
  g.actions_ = std::move(action_counts);
  g.local_ = std::move(local);
  g.finish({});
  return g;
}

StageGame StageGame::local(std::vector<int> action_counts, std::vector<LocalPayoff> payoffs,
                           std::vector<ActionProfile> hull_profiles) {
  const int n = static_cast<int>(action_counts.size());
  if (static_cast<int>(payoffs.size()) != n) {
    throw GameError("need one local payoff table per player");
  }
  for (int p = 0; p < n; ++p) {
    if (action_counts[p] < 2) {
      throw GameError("player " + std::to_string(p + 1) + " needs at least 2 actions");
    }
  }
  for (int p = 0; p < n; ++p) {
    auto& lp = payoffs[p];
    std::sort(lp.scope.begin(), lp.scope.end());
    lp.scope.erase(std::unique(lp.scope.begin(), lp.scope.end()), lp.scope.end());
    if (!std::binary_search(lp.scope.begin(), lp.scope.end(), p + 1)) {
      throw GameError("scope of player " + std::to_string(p + 1) + " must include itself");
    }
    std::size_t size = 1;
    for (Player q : lp.scope) {
      if (q < 1 || q > n) throw GameError("scope entry out of range");
      size *= static_cast<std::size_t>(action_counts[q - 1]);
    }
    if (lp.table.size() != size) {
      throw GameError("local table of player " + std::to_string(p + 1) + " has " +
                      std::to_string(lp.table.size()) + " entries, expected " +
                      std::to_string(size));
    }
  }
  for (const auto& a : hull_profiles) {
    if (static_cast<int>(a.size()) != n) throw GameError("hull profile has wrong length");
    for (int p = 0; p < n; ++p) {
      if (a[p] < 0 || a[p] >= action_counts[p]) throw GameError("hull profile out of range");
    }
  }
  StageGame g;
  g.actions_ = std::move(action_counts);
  g.local_ = std::move(payoffs);
  g.finish(std::move(hull_profiles));
  return g;
}

void StageGame::finish(std::vector<ActionProfile> hull_profiles) {
  if (hull_profiles.empty()) {
    hull_exhaustive_ = true;
    if (product_size(actions_, kMaxEnumeratedHull) > kMaxEnumeratedHull) {
      throw GameError("profile space too large to enumerate; supply hull profiles");
    }
    hull_profiles = enumerate_profiles(actions_, kMaxEnumeratedHull);
  } else {
    hull_exhaustive_ = product_size(actions_, kMaxEnumeratedHull) == hull_profiles.size();
  }
  std::vector<PayoffPoint> points;
  points.reserve(hull_profiles.size());
  for (const auto& a : hull_profiles) points.push_back(payoffs(a));
  hull_profiles_ = std::make_shared<const std::vector<ActionProfile>>(std::move(hull_profiles));
  hull_points_ = std::make_shared<const std::vector<PayoffPoint>>(std::move(points));
}

std::size_t StageGame::local_index(Player i, const ActionProfile& a) const {
  const auto& lp = local_[i - 1];
  std::size_t idx = 0;
  for (Player q : lp.scope) {
    idx = idx * static_cast<std::size_t>(actions_[q - 1]) + static_cast<std::size_t>(a[q - 1]);
  }
  return idx;
}

double StageGame::payoff(Player i, const ActionProfile& a) const {
  return local_.at(i - 1).table[local_index(i, a)];
}

PayoffPoint StageGame::payoffs(const ActionProfile& a) const {
  if (static_cast<int>(a.size()) != players()) throw GameError("profile has wrong length");
  PayoffPoint u(players());
  for (Player i = 1; i <= players(); ++i) u[i - 1] = payoff(i, a);
  return u;
}

double StageGame::expected_payoff(Player i, const MixedProfile& x) const {
  const auto& lp = local_.at(i - 1);
  const std::size_t k = lp.scope.size();
  std::vector<int> radix(k), digits(k, 0);
  for (std::size_t s = 0; s < k; ++s) radix[s] = actions_[lp.scope[s] - 1];
  double total = 0.0;
  std::size_t idx = 0;
  do {
    double prob = 1.0;
    for (std::size_t s = 0; s < k && prob != 0.0; ++s) {
      prob *= x.at(lp.scope[s] - 1).at(digits[s]);
    }
    if (prob != 0.0) total += prob * lp.table[idx];
    ++idx;
  } while (next_tuple(digits, radix));
  return total;
}

double StageGame::max_payoff(Player i) const {
  const auto& t = local_.at(i - 1).table;
  return *std::max_element(t.begin(), t.end());
}

double StageGame::max_abs_payoff() const {
  double m = 0.0;
  for (const auto& lp : local_) {
    for (double v : lp.table) m = std::max(m, std::abs(v));
  }
  return m;
}

StageGame StageGame::shifted(const std::vector<double>& offsets) const {
  if (static_cast<int>(offsets.size()) != players()) throw GameError("offset dimension mismatch");
  StageGame g = *this;
  for (int p = 0; p < players(); ++p) {
    for (double& v : g.local_[p].table) v -= offsets[p];
  }
  g.finish(g.hull_exhaustive_ ? std::vector<ActionProfile>{} : *hull_profiles_);
  return g;
}

// ---------------------------------------------------------------- minmax

namespace {

struct OpponentMatrix {
  std::vector<Player> opponents;             // scope of k minus k
  std::vector<std::vector<int>> joint;       // joint opponent actions
  std::vector<std::vector<double>> payoff;   // payoff[a_k][j]
};

OpponentMatrix build_matrix(const StageGame& game, Player k) {
  OpponentMatrix m;
  for (Player q : game.scope(k)) {
    if (q != k) m.opponents.push_back(q);
  }
  std::vector<int> radix;
  for (Player q : m.opponents) radix.push_back(game.actions(q));
  std::vector<int> digits(radix.size(), 0);
  do {
    m.joint.push_back(digits);
  } while (!radix.empty() && next_tuple(digits, radix));
  m.payoff.assign(game.actions(k), std::vector<double>(m.joint.size()));
  ActionProfile a(game.players(), 0);
  for (std::size_t j = 0; j < m.joint.size(); ++j) {
    for (std::size_t o = 0; o < m.opponents.size(); ++o) a[m.opponents[o] - 1] = m.joint[j][o];
    for (int ak = 0; ak < game.actions(k); ++ak) {
      a[k - 1] = ak;
      m.payoff[ak][j] = game.payoff(k, a);
    }
  }
  return m;
}

// max over own actions of expected payoff when opponents mix independently.
double best_response_value(const OpponentMatrix& m,
                           const std::vector<std::vector<double>>& mixes, int* arg = nullptr) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < m.payoff.size(); ++a) {
    double v = 0.0;
    for (std::size_t j = 0; j < m.joint.size(); ++j) {
      double p = 1.0;
      for (std::size_t o = 0; o < m.opponents.size(); ++o) p *= mixes[o][m.joint[j][o]];
      v += p * m.payoff[a][j];
    }
    if (v > best + 1e-12) {
      best = v;
      if (arg) *arg = static_cast<int>(a);
    }
  }
  return best;
}

// min over a column distribution y of max_a sum_j C[a][j] y_j.
std::pair<double, std::vector<double>> solve_matrix_minmax(
    const std::vector<std::vector<double>>& c) {
  const int rows = static_cast<int>(c.size());
  const int cols = static_cast<int>(c.front().size());
  lp::Program prog(cols + 1);
  prog.free_vars[cols] = true;
  prog.objective[cols] = -1.0;
  for (int a = 0; a < rows; ++a) {
    std::vector<double> coeffs(c[a]);
    coeffs.push_back(-1.0);
    prog.add(std::move(coeffs), lp::Sense::LessEq, 0.0);
  }
  std::vector<double> ones(cols, 1.0);
  ones.push_back(0.0);
  prog.add(std::move(ones), lp::Sense::Equal, 1.0);
  auto sol = lp::solve(prog);
  if (!sol.optimal()) throw GameError("minmax linear program failed");
  std::vector<double> y(sol.x.begin(), sol.x.begin() + cols);
  for (double& v : y) v = std::max(0.0, v);
  const double s = std::accumulate(y.begin(), y.end(), 0.0);
  for (double& v : y) v /= s;
  return {sol.x[cols], y};
}

}  // namespace

MinmaxCertificate minmax(const StageGame& game, Player k) {
  if (k < 1 || k > game.players()) {
    throw GameError("invalid player index " + std::to_string(k));
  }
  const auto m = build_matrix(game, k);
  const std::size_t no = m.opponents.size();

  std::vector<std::vector<double>> best_mix;
  double best_value = std::numeric_limits<double>::infinity();
  double lower = 0.0;

  if (no == 0) {
    best_value = lower = best_response_value(m, {});
  } else {
    auto [lb, y] = solve_matrix_minmax(m.payoff);
    lower = lb;
    if (no == 1) {
      best_mix = {y};
      best_value = best_response_value(m, best_mix);
    } else {
      // Multi-start alternating minimization over one opponent at a time.
      std::vector<std::vector<std::vector<double>>> starts;
      std::vector<std::size_t> order(m.joint.size());
      std::iota(order.begin(), order.end(), 0);
      std::vector<double> pure_val(m.joint.size());
      for (std::size_t j = 0; j < m.joint.size(); ++j) {
        double mx = -std::numeric_limits<double>::infinity();
        for (const auto& row : m.payoff) mx = std::max(mx, row[j]);
        pure_val[j] = mx;
      }
      std::stable_sort(order.begin(), order.end(),
                       [&](auto a, auto b) { return pure_val[a] < pure_val[b]; });
      for (std::size_t s = 0; s < std::min<std::size_t>(16, order.size()); ++s) {
        std::vector<std::vector<double>> mix(no);
        for (std::size_t o = 0; o < no; ++o) {
          mix[o].assign(game.actions(m.opponents[o]), 0.0);
          mix[o][m.joint[order[s]][o]] = 1.0;
        }
        starts.push_back(std::move(mix));
      }
      std::mt19937_64 rng(0x9e3779b97f4a7c15ULL + static_cast<unsigned>(k));
      std::uniform_real_distribution<double> unif(0.05, 1.0);
      for (int r = 0; r < 9; ++r) {
        std::vector<std::vector<double>> mix(no);
        for (std::size_t o = 0; o < no; ++o) {
          const int na = game.actions(m.opponents[o]);
          mix[o].resize(na);
          double s = 0;
          for (auto& v : mix[o]) s += (v = (r == 0 ? 1.0 : unif(rng)));
          for (auto& v : mix[o]) v /= s;
        }
        starts.push_back(std::move(mix));
      }
      for (auto& mix : starts) {
        double current = best_response_value(m, mix);
        for (int round = 0; round < 200; ++round) {
          for (std::size_t o = 0; o < no; ++o) {
            const int na = game.actions(m.opponents[o]);
            std::vector<std::vector<double>> c(m.payoff.size(), std::vector<double>(na, 0.0));
            for (std::size_t j = 0; j < m.joint.size(); ++j) {
              double p = 1.0;
              for (std::size_t q = 0; q < no; ++q) {
                if (q != o) p *= mix[q][m.joint[j][q]];
              }
              if (p == 0.0) continue;
              for (std::size_t a = 0; a < m.payoff.size(); ++a) {
                c[a][m.joint[j][o]] += p * m.payoff[a][j];
              }
            }
            mix[o] = solve_matrix_minmax(c).second;
          }
          const double next = best_response_value(m, mix);
          const bool stalled = next > current - 1e-13;
          current = std::min(current, next);
          if (stalled) break;
        }
        if (current < best_value) {
          best_value = current;
          best_mix = mix;
        }
        if (best_value - lower <= 1e-9) break;
      }
    }
  }

  MinmaxCertificate cert;
  cert.target = k;
  cert.lower_bound = lower;
  cert.punisher_profile.assign(game.players(), {});
  for (Player p = 1; p <= game.players(); ++p) {
    cert.punisher_profile[p - 1].assign(game.actions(p), 0.0);
    cert.punisher_profile[p - 1][0] = 1.0;
  }
  for (std::size_t o = 0; o < no; ++o) cert.punisher_profile[m.opponents[o] - 1] = best_mix[o];
  int arg = 0;
  cert.best_response_value = best_response_value(m, best_mix, &arg);
  cert.best_response_action = arg;
  cert.punisher_profile[k - 1].assign(game.actions(k), 0.0);
  cert.punisher_profile[k - 1][arg] = 1.0;
  cert.value = cert.best_response_value;
  cert.exact = no <= 1 || cert.value - lower <= 1e-7;
  return cert;
}

std::vector<MinmaxCertificate> minmax_all(const StageGame& game) {
  std::vector<MinmaxCertificate> out;
  for (Player k = 1; k <= game.players(); ++k) out.push_back(minmax(game, k));
  return out;
}

StageGame normalize(const StageGame& game) {
  std::vector<double> offsets;
  for (const auto& c : minmax_all(game)) offsets.push_back(c.value);
  return game.shifted(offsets);
}

// ---------------------------------------------------------------- hull

std::optional<std::vector<double>> hull_weights(const StageGame& game, const PayoffPoint& v,
                                                double tol) {
  const int n = game.players();
  if (static_cast<int>(v.size()) != n) throw GameError("payoff dimension mismatch");
  const auto& pts = game.hull_points();
  const int h = static_cast<int>(pts.size());
  lp::Program prog(h);
  prog.add(std::vector<double>(h, 1.0), lp::Sense::Equal, 1.0);
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(h);
    for (int c = 0; c < h; ++c) row[c] = pts[c][i];
    prog.add(std::move(row), lp::Sense::Equal, v[i]);
  }
  auto sol = lp::solve(prog);
  if (!sol.optimal()) return std::nullopt;
  auto w = sol.x;
  for (double& x : w) {
    if (x < 0) x = 0;
  }
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= s;
  PayoffPoint back(n, 0.0);
  for (int c = 0; c < h; ++c) {
    for (int i = 0; i < n; ++i) back[i] += w[c] * pts[c][i];
  }
  if (inf_norm_diff(back, v) > std::max(tol, 1e-9) * std::max(1.0, game.max_abs_payoff())) {
    return std::nullopt;
  }
  return w;
}

bool feasible_ir(const StageGame& game, const PayoffPoint& v) {
  if (static_cast<int>(v.size()) != game.players()) throw GameError("payoff dimension mismatch");
  for (double x : v) {
    if (!(x > 0.0)) return false;
  }
  return hull_weights(game, v).has_value();
}

bool interior_nonempty(const StageGame& game) {
  const int n = game.players();
  const auto& pts = game.hull_points();
  const int h = static_cast<int>(pts.size());
  // Largest t such that some hull point has every coordinate >= t.
  lp::Program prog(h + 1);
  prog.free_vars[h] = true;
  prog.objective[h] = 1.0;
  std::vector<double> sum(h + 1, 1.0);
  sum[h] = 0.0;
  prog.add(std::move(sum), lp::Sense::Equal, 1.0);
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(h + 1);
    for (int c = 0; c < h; ++c) row[c] = pts[c][i];
    row[h] = -1.0;
    prog.add(std::move(row), lp::Sense::GreaterEq, 0.0);
  }
  auto sol = lp::solve(prog);
  if (!sol.optimal() || sol.value <= 1e-9) return false;
  if (h < n + 1) return false;
  Eigen::MatrixXd diff(h - 1, n);
  for (int c = 1; c < h; ++c) {
    for (int i = 0; i < n; ++i) diff(c - 1, i) = pts[c][i] - pts[0][i];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(diff);
  lu.setThreshold(1e-10);
  return lu.rank() == n;
}

PayoffPoint discounted_payoff(const std::vector<PayoffPoint>& stage_payoffs, double delta,
                              const std::optional<PayoffPoint>& tail) {
  if (!(delta > 0.0 && delta < 1.0)) throw GameError("discount factor must lie in (0,1)");
  std::size_t n = tail ? tail->size() : (stage_payoffs.empty() ? 0 : stage_payoffs[0].size());
  PayoffPoint out(n, 0.0);
  double w = 1.0 - delta;
  for (const auto& u : stage_payoffs) {
    if (u.size() != n) throw GameError("stage payoff dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) out[i] += w * u[i];
    w *= delta;
  }
  if (tail) {
    const double d = w / (1.0 - delta);
    for (std::size_t i = 0; i < n; ++i) out[i] += d * (*tail)[i];
  }
  return out;
}

// ---------------------------------------------------------------- target paths

TargetPath::TargetPath(const StageGame& game, PayoffPoint target, double delta)
    : game_(game), target_(std::move(target)), delta_(delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw GameError("discount factor must lie in (0,1)");
  auto w = sparse_weights(target_);
  if (!w) throw GameError("target payoff is not feasible");
  support_size_ = w->size();
  weights_.push_back(std::move(*w));
}

std::optional<TargetPath::Weights> TargetPath::sparse_weights(const PayoffPoint& v) const {
  auto w = hull_weights(game_, v);
  if (!w) return std::nullopt;
  Weights out;
  double s = 0.0;
  for (std::size_t c = 0; c < w->size(); ++c) {
    if ((*w)[c] > 1e-14) {
      out.emplace_back(static_cast<int>(c), (*w)[c]);
      s += (*w)[c];
    }
  }
  for (auto& e : out) e.second /= s;
  return out;
}

PayoffPoint TargetPath::point_of(const Weights& w) const {
  PayoffPoint out(target_.size(), 0.0);
  for (auto [c, x] : w) {
    const auto& p = game_.hull_points()[c];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += x * p[i];
  }
  return out;
}

void TargetPath::extend_to(long t) {
  const auto& pts = game_.hull_points();
  while (static_cast<long>(chosen_.size()) < t) {
    const PayoffPoint w = point_of(weights_.back());
    std::vector<std::pair<double, std::size_t>> order;
    std::vector<PayoffPoint> rests(pts.size());
    for (std::size_t c = 0; c < pts.size(); ++c) {
      PayoffPoint rest(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        rest[i] = (w[i] - (1.0 - delta_) * pts[c][i]) / delta_;
      }
      order.emplace_back(inf_norm_diff(rest, target_), c);
      rests[c] = std::move(rest);
    }
    std::sort(order.begin(), order.end());
    std::optional<Weights> next;
    int pick = -1;
    for (const auto& [gap, c] : order) {
      if ((next = sparse_weights(rests[c]))) {
        pick = static_cast<int>(c);
        break;
      }
    }
    if (!next) {
      throw GameError("continuation left the feasible set at stage " +
                      std::to_string(chosen_.size() + 1));
    }
    chosen_.push_back(pick);
    weights_.push_back(std::move(*next));
  }
}

int TargetPath::profile_index(long t) {
  if (t < 1) throw GameError("stages are 1-based");
  extend_to(t);
  return chosen_[t - 1];
}

const ActionProfile& TargetPath::profile(long t) {
  return game_.hull_profiles()[profile_index(t)];
}

PayoffPoint TargetPath::continuation(long t) {
  if (t < 1) throw GameError("stages are 1-based");
  extend_to(t - 1);
  return point_of(weights_[t - 1]);
}

TargetSequence target_sequence(const StageGame& game, const PayoffPoint& v, double delta,
                             long horizon, double epsilon) {
  const double bound = std::max(0.5, 1.0 / std::max(2, game.players()));
  if (!(delta >= bound && delta < 1.0)) {
    throw GameError("discount factor " + std::to_string(delta) +
                    " violates the discount bound max(1/2, 1/n) = " + std::to_string(bound));
  }
  if (horizon < 1) throw GameError("horizon must be positive");
  if (!feasible_ir(game, v)) throw GameError("target payoff is not in V*");
  TargetPath path(game, v, delta);
  TargetSequence out;
  std::vector<PayoffPoint> stage;
  for (long t = 1; t <= horizon; ++t) {
    out.profiles.push_back(path.profile(t));
    stage.push_back(game.payoffs(out.profiles.back()));
    out.max_continuation_error =
        std::max(out.max_continuation_error, inf_norm_diff(path.continuation(t), v));
  }
  out.total_error = inf_norm_diff(discounted_payoff(stage, delta, path.continuation(horizon + 1)), v);
  out.within_epsilon = out.total_error <= epsilon && out.max_continuation_error <= epsilon;
  return out;
}

// ---------------------------------------------------------------- thresholds

namespace {

// sum_{s<T} d^s
double geometric(double d, int T) {
  double s = 0.0, p = 1.0;
  for (int i = 0; i < T; ++i) {
    s += p;
    p *= d;
  }
  return s;
}

template <typename F>
double smallest_negative_root(F gain, const std::string& what) {
  const double hi_start = 1.0 - 1e-12;
  if (!(gain(hi_start) < 0.0)) {
    throw GameError(what + " stays nonnegative as the discount factor tends to 1");
  }
  if (gain(1e-9) < 0.0) return 0.0;
  double lo = 1e-9, hi = hi_start;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gain(mid) < 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

double phase1_gain(const GainTerms& g, double delta) {
  return g.vbar - g.v - std::pow(delta, g.L + 1) * geometric(delta, g.T) * g.vprime;
}

double phase3_gain(const GainTerms& g, double w, double delta) {
  const double dl = std::pow(delta, g.L + 1);
  return g.vbar - w - dl * geometric(delta, g.T) * g.vprime - dl / (1.0 - delta) * g.rho;
}

double phase4_gain(const GainTerms& g, double delta) {
  return g.vbar - g.vprime - std::pow(delta, g.L + 1) * geometric(delta, g.T) * g.vprime;
}

PayoffPoint Thresholds::reward_target(Player k) const {
  PayoffPoint r = v_prime;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (static_cast<Player>(i + 1) != k) r[i] += rho;
  }
  return r;
}

Thresholds thresholds(const StageGame& game, const PayoffPoint& v, long L,
                      const std::vector<MinmaxCertificate>& minmax_certs) {
  const int n = game.players();
  if (static_cast<int>(v.size()) != n) throw GameError("payoff dimension mismatch");
  if (!interior_nonempty(game)) throw GameError("interior of V* is empty");
  if (!feasible_ir(game, v)) throw GameError("target payoff is not in V*");
  if (static_cast<int>(minmax_certs.size()) != n) throw GameError("need one minmax per player");

  const auto& pts = game.hull_points();
  const int h = static_cast<int>(pts.size());

  Thresholds th;
  th.L = L;
  bool found = false;
  for (int step = 1; step <= 9 && !found; ++step) {
    const double lambda = 0.1 * step;
    PayoffPoint vp(n);
    for (int i = 0; i < n; ++i) vp[i] = (1.0 - lambda) * v[i];
    if (!hull_weights(game, vp)) continue;
    double rho_max = std::numeric_limits<double>::infinity();
    for (Player k = 1; k <= n && rho_max > 0.0; ++k) {
      lp::Program prog(h + 1);
      prog.objective[h] = 1.0;
      std::vector<double> sum(h + 1, 1.0);
      sum[h] = 0.0;
      prog.add(std::move(sum), lp::Sense::Equal, 1.0);
      for (int i = 0; i < n; ++i) {
        std::vector<double> row(h + 1);
        for (int c = 0; c < h; ++c) row[c] = pts[c][i];
        row[h] = (i + 1 == k) ? 0.0 : -1.0;
        prog.add(std::move(row), lp::Sense::Equal, vp[i]);
      }
      auto sol = lp::solve(prog);
      rho_max = sol.optimal() ? std::min(rho_max, sol.value) : 0.0;
    }
    if (rho_max > 1e-9) {
      th.lambda = lambda;
      th.v_prime = vp;
      th.rho_max = rho_max;
      th.rho = 0.5 * rho_max;
      found = true;
    }
  }
  if (!found) {
    throw GameError("no v' = (1-lambda) v with a positive reward bonus for lambda in 0.1..0.9");
  }

  th.T.resize(n);
  for (int i = 0; i < n; ++i) {
    const double ratio = game.max_payoff(i + 1) / th.v_prime[i];
    th.T[i] = std::max(1, static_cast<int>(std::floor(ratio)));
    if (!(ratio < 1.0 + th.T[i])) ++th.T[i];
  }

  th.w.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (Player kp = 1; kp <= n; ++kp) {
    for (Player k = 1; k <= n; ++k) {
      th.w[static_cast<std::size_t>(kp - 1) * n + (k - 1)] =
          game.expected_payoff(k, minmax_certs[kp - 1].punisher_profile);
    }
  }

  double dbar = std::max(0.5, 1.0 / std::max(2, n));
  for (Player k = 1; k <= n; ++k) {
    GainTerms g{game.max_payoff(k), v[k - 1], th.v_prime[k - 1], th.rho, th.T[k - 1], L};
    const std::string who = " of player " + std::to_string(k);
    dbar = std::max(dbar, smallest_negative_root([&](double d) { return phase1_gain(g, d); },
                                                 "phase I deviation gain" + who));
    dbar = std::max(dbar, smallest_negative_root([&](double d) { return phase4_gain(g, d); },
                                                 "phase IV deviation gain" + who));
    for (Player kp = 1; kp <= n; ++kp) {
      if (kp == k) continue;
      const double w = th.w_of(k, kp);
      dbar = std::max(dbar, smallest_negative_root([&](double d) { return phase3_gain(g, w, d); },
                                                   "phase III deviation gain" + who));
    }
  }
  th.delta_bar = dbar;
  return th;
}

}  // namespace netfolk
