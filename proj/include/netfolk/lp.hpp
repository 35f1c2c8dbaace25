#pragma once

#include <vector>

namespace netfolk::lp {

enum class Sense { LessEq, Equal, GreaterEq };

struct Constraint {
  std::vector<double> coeffs;
  Sense sense = Sense::LessEq;
  double rhs = 0.0;
};

/// maximize objective . x  subject to rows, x_j >= 0 unless free_vars[j].
struct Program {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<Constraint> rows;
  std::vector<bool> free_vars;

  explicit Program(int n) : num_vars(n), objective(n, 0.0), free_vars(n, false) {}

  void add(std::vector<double> coeffs, Sense sense, double rhs) {
    rows.push_back({std::move(coeffs), sense, rhs});
  }
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  double value = 0.0;
  std::vector<double> x;
  [[nodiscard]] bool optimal() const { return status == Status::Optimal; }
};

/// Dense two-phase simplex with Bland's anti-cycling rule. Returns a basic
/// optimal solution, so at most rows.size() primal variables are nonzero.
Solution solve(const Program& program, double tol = 1e-10);

}  // namespace netfolk::lp
