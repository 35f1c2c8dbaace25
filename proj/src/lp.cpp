#include "netfolk/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace netfolk::lp {

namespace {

class Tableau {
 public:
  // rows x (cols + 1); last column is the right-hand side.
  Tableau(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * (cols + 1), 0.0),
        basis_(rows, -1) {}

  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double at(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * (cols_ + 1) + c];
  }
  double& rhs(int r) { return at(r, cols_); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::vector<int>& basis() { return basis_; }

  void pivot(int pr, int pc) {
    const double p = at(pr, pc);
    for (int c = 0; c <= cols_; ++c) at(pr, c) /= p;
    for (int r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
    }
    basis_[pr] = pc;
  }

  // Maximizes cost . x over columns with allowed[c]; returns false when
  // unbounded.
  bool optimize(const std::vector<double>& cost, const std::vector<char>& allowed,
                double tol) {
    std::vector<double> reduced(cols_);
    for (int iter = 0; iter < 50000; ++iter) {
      // reduced_c = cost_c - sum_r cost_{basis_r} * a_{r,c}
      int enter = -1;
      for (int c = 0; c < cols_; ++c) {
        if (!allowed[c]) continue;
        double rc = cost[c];
        for (int r = 0; r < rows_; ++r) rc -= cost[basis_[r]] * at(r, c);
        if (rc > tol) {
          enter = c;  // Bland: lowest index
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a <= tol) continue;
        const double ratio = rhs(r) / a;
        if (ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && leave >= 0 && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration limit exceeded");
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> data_;
  std::vector<int> basis_;
};

}  // namespace

Solution solve(const Program& program, double tol) {
  const int n = program.num_vars;
  const int m = static_cast<int>(program.rows.size());

  // Column layout: split variables (x+ and, for free vars, x-), one slack per
  // inequality row, one artificial per row.
  std::vector<int> pos_col(n), neg_col(n, -1);
  int cols = 0;
  for (int j = 0; j < n; ++j) {
    pos_col[j] = cols++;
    if (program.free_vars[j]) neg_col[j] = cols++;
  }
  std::vector<int> slack_col(m, -1);
  for (int r = 0; r < m; ++r) {
    if (program.rows[r].sense != Sense::Equal) slack_col[r] = cols++;
  }
  const int first_artificial = cols;
  cols += m;

  Tableau t(m, cols);
  for (int r = 0; r < m; ++r) {
    const auto& row = program.rows[r];
    if (static_cast<int>(row.coeffs.size()) != n) {
      throw std::invalid_argument("constraint width does not match variable count");
    }
    const double sign = row.rhs < 0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      t.at(r, pos_col[j]) = sign * row.coeffs[j];
      if (neg_col[j] >= 0) t.at(r, neg_col[j]) = -sign * row.coeffs[j];
    }
    if (slack_col[r] >= 0) {
      t.at(r, slack_col[r]) = sign * (row.sense == Sense::LessEq ? 1.0 : -1.0);
    }
    t.at(r, first_artificial + r) = 1.0;
    t.rhs(r) = sign * row.rhs;
    t.basis()[r] = first_artificial + r;
  }

  // Phase 1: maximize -(sum of artificials).
  std::vector<double> phase1(cols, 0.0);
  for (int r = 0; r < m; ++r) phase1[first_artificial + r] = -1.0;
  std::vector<char> allowed(cols, 1);
  t.optimize(phase1, allowed, tol);
  double infeas = 0.0;
  for (int r = 0; r < m; ++r) {
    if (t.basis()[r] >= first_artificial) infeas += t.rhs(r);
  }
  Solution out;
  if (infeas > 1e-8) {
    out.status = Status::Infeasible;
    return out;
  }
  // Drive zero-valued artificials out of the basis where possible.
  for (int r = 0; r < m; ++r) {
    if (t.basis()[r] < first_artificial) continue;
    for (int c = 0; c < first_artificial; ++c) {
      if (std::abs(t.at(r, c)) > 1e-9) {
        t.pivot(r, c);
        break;
      }
    }
  }
  for (int c = first_artificial; c < cols; ++c) allowed[c] = 0;

  std::vector<double> phase2(cols, 0.0);
  for (int j = 0; j < n; ++j) {
    phase2[pos_col[j]] = program.objective[j];
    if (neg_col[j] >= 0) phase2[neg_col[j]] = -program.objective[j];
  }
  if (!t.optimize(phase2, allowed, tol)) {
    out.status = Status::Unbounded;
    return out;
  }

  std::vector<double> raw(cols, 0.0);
  for (int r = 0; r < m; ++r) raw[t.basis()[r]] = t.rhs(r);
  out.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    out.x[j] = raw[pos_col[j]] - (neg_col[j] >= 0 ? raw[neg_col[j]] : 0.0);
  }
  out.value = 0.0;
  for (int j = 0; j < n; ++j) out.value += program.objective[j] * out.x[j];
  out.status = Status::Optimal;
  return out;
}

}  // namespace netfolk::lp
