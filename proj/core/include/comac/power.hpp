#pragma once

#include "comac/numerics.hpp"
#include "comac/rates.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace comac {

/// Optimality residuals of a level/dual pair for the per-symbol program
///
///   maximize  sum_g 1/2 log2(N/M + N eta_g)
///   s.t.      sum_g G_{i,g} omega_{i,g} eta_g <= P   for every node i,  eta >= 0,
///
/// with G_{i,g} = 1/|h_{i,g}|^2.
struct KktReport {
  double feasibility = 0.0;    // max relative budget overrun (or negative level)
  double slackness = 0.0;      // max mu_i |used_i - P|, normalized by P max_j mu_j
  double stationarity = 0.0;   // relative spread of (1/M + eta_g) lambda_g over active carriers
  double max_power_gap = 0.0;  // |max_i used_i - P| (absolute)
  bool pass = false;
};

struct PowerSolution {
  std::vector<double> eta;  // level per sub-carrier
  std::vector<double> mu;   // multiplier per node, scaled to the reported rate
  PowerMatrix power;        // P_{i,g} = G_{i,g} eta_g omega_{i,g}
  double objective = 0.0;   // (M/(K N)) sum_g C+(N/M + N eta_g)
  double smooth_objective = 0.0;  // sum_g 1/2 log2(N/M + N eta_g), no clipping
  KktReport residuals;
  std::uint64_t iterations = 0;
};

/// Raised when the squeezing loop exhausts its sweep budget.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, KktReport residuals)
      : std::runtime_error(what), residuals_(residuals) {}
  const KktReport& residuals() const noexcept { return residuals_; }

private:
  KktReport residuals_;
};

struct SolverOptions {
  double power_tol = 1e-10;     // relative tolerance on every node budget
  double residual_tol = 1e-6;   // verify_kkt threshold reported in the solution
  std::uint64_t max_sweeps = 100000;
  int polish_every = 4;         // Newton polish attempt cadence, in sweeps
};

/// omega with ones at the top-M gains of every column (ties to lower index).
AssignmentMatrix build_assignment(const GainMatrix& gains, int M);

/// Average power rule: chosen node of rank i in column g gets
/// (K P / N) (g_(M) / g_(i)) / (M Gamma(K, M)); other nodes get zero.
PowerMatrix allocate_average(const GainMatrix& gains, const SimParams& params, const GammaEstimate& gamma);

/// Optimal per-symbol levels by sponge squeezing (dual coordinate squeezes
/// with a Newton finish). See power.cpp for the phases.
PowerSolution sponge_squeeze(const GainMatrix& gains, const AssignmentMatrix& omega, const SimParams& params,
                             const SolverOptions& options = {});

/// Independent reference solver for small instances (K <= 6, N <= 8): a
/// primal log-barrier Newton method on the levels.
PowerSolution oracle_solve(const GainMatrix& gains, const AssignmentMatrix& omega, const SimParams& params);

KktReport verify_kkt(const PowerSolution& solution, const GainMatrix& gains, const AssignmentMatrix& omega,
                     const SimParams& params, double tol);

/// sum_g G_{i,g} omega_{i,g} eta_g for every node.
std::vector<double> node_usage(const GainMatrix& gains, const AssignmentMatrix& omega,
                               std::span<const double> eta);

/// Levels reached when every node spends P/N on each of its sub-carriers:
/// eta_g = min_{chosen i} |h_{i,g}|^2 P / N. Always feasible.
std::vector<double> equal_split_levels(const GainMatrix& gains, const AssignmentMatrix& omega, double power);

/// (M/(K N)) sum_g C+(N/M + N eta_g).
double level_rate(std::span<const double> eta, int K, int M);

/// sum_g 1/2 log2(N/M + N eta_g).
double level_smooth_objective(std::span<const double> eta, int M);

/// P_{i,g} = G_{i,g} eta_g omega_{i,g}.
PowerMatrix levels_to_power(const GainMatrix& gains, const AssignmentMatrix& omega, std::span<const double> eta);

}  // namespace comac
