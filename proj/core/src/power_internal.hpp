#pragma once

#include "comac/power.hpp"

#include <vector>

namespace comac::detail {

// Scaled per-symbol program shared by the solvers:
//   maximize sum_g ln(1/M + eta_g)  s.t.  sum_g A_{i,g} eta_g <= P,  eta >= 0,
// with A_{i,g} = omega_{i,g} / |h_{i,g}|^2. Its maximizer is the maximizer of
// the rate objective.
struct LevelProblem {
  int K = 0;
  int M = 0;
  int N = 0;
  double power = 0.0;
  std::vector<double> A;  // row-major K x N

  double a(int i, int g) const { return A[static_cast<std::size_t>(i) * N + g]; }
  bool node_used(int i) const;
};

/// Validates shapes and budgets; throws std::invalid_argument on a zero gain
/// among the chosen nodes (degenerate realization).
LevelProblem make_level_problem(const GainMatrix& gains, const AssignmentMatrix& omega, const SimParams& params);

/// Scales eta down if any node overspends, then fills every field of the
/// solution. `mu_scaled` are multipliers of the scaled program.
PowerSolution finish_solution(const LevelProblem& problem, const GainMatrix& gains, const AssignmentMatrix& omega,
                              const SimParams& params, std::vector<double> eta,
                              const std::vector<double>& mu_scaled, std::uint64_t iterations, double residual_tol);

}  // namespace comac::detail
