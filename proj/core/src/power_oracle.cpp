// Reference solver for small instances, deliberately unrelated to the dual
// squeezing: a primal log-barrier method with damped Newton steps on eta.

#include "comac/power.hpp"

#include "power_internal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace comac {

namespace {

constexpr int kMaxNodes = 6;
constexpr int kMaxCarriers = 8;
constexpr double kGapTarget = 1e-12;

struct Barrier {
  const detail::LevelProblem& p;
  std::vector<int> rows;  // nodes with at least one chosen carrier

  // Slack P - sum_g A_{i,g} eta_g for each constrained node.
  std::vector<double> slacks(const Eigen::VectorXd& eta) const {
    std::vector<double> s(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double used = 0.0;
      for (int g = 0; g < p.N; ++g) used += p.a(rows[r], g) * eta(g);
      s[r] = p.power - used;
    }
    return s;
  }

  bool interior(const Eigen::VectorXd& eta) const {
    if ((eta.array() <= 0.0).any()) return false;
    for (double s : slacks(eta)) {
      if (!(s > 0.0)) return false;
    }
    return true;
  }

  // t * (-sum ln(1/M + eta)) - sum ln(slack) - sum ln(eta)
  double value(const Eigen::VectorXd& eta, double t) const {
    double f = 0.0;
    for (int g = 0; g < p.N; ++g) f -= t * std::log(1.0 / p.M + eta(g)) + std::log(eta(g));
    for (double s : slacks(eta)) f -= std::log(s);
    return f;
  }
};

// Nonnegative least squares for sum_i mu_i A_{i,g} = 1/(1/M + eta_g) over the
// active carriers, with mu supported on the nodes that spend their budget.
// Sizes are tiny, so every support subset is tried.
std::vector<double> fit_multipliers(const detail::LevelProblem& p, const std::vector<double>& eta,
                                    const std::vector<double>& usage) {
  const double eta_max = *std::max_element(eta.begin(), eta.end());
  std::vector<int> active, tight;
  for (int g = 0; g < p.N; ++g) {
    if (eta[g] > 1e-9 * (1.0 / p.M + eta_max)) active.push_back(g);
  }
  for (int i = 0; i < p.K; ++i) {
    if (p.node_used(i) && usage[i] >= p.power * (1.0 - 1e-9)) tight.push_back(i);
  }
  std::vector<double> best(p.K, 0.0);
  if (active.empty() || tight.empty()) return best;

  Eigen::VectorXd rhs(active.size());
  for (std::size_t r = 0; r < active.size(); ++r) rhs(r) = 1.0 / (1.0 / p.M + eta[active[r]]);
  double best_residual = std::numeric_limits<double>::infinity();
  const unsigned subsets = 1u << tight.size();
  for (unsigned mask = 1; mask < subsets; ++mask) {
    std::vector<int> support;
    for (std::size_t k = 0; k < tight.size(); ++k) {
      if (mask & (1u << k)) support.push_back(tight[k]);
    }
    Eigen::MatrixXd X(active.size(), support.size());
    for (std::size_t r = 0; r < active.size(); ++r) {
      for (std::size_t c = 0; c < support.size(); ++c) X(r, c) = p.a(support[c], active[r]);
    }
    const Eigen::VectorXd x = X.completeOrthogonalDecomposition().solve(rhs);
    if ((x.array() < 0.0).any()) continue;
    const double residual = (X * x - rhs).norm();
    if (residual < best_residual * (1.0 - 1e-12)) {
      best_residual = residual;
      std::fill(best.begin(), best.end(), 0.0);
      for (std::size_t c = 0; c < support.size(); ++c) best[support[c]] = x(c);
    }
  }
  return best;
}

}  // namespace

PowerSolution oracle_solve(const GainMatrix& gains, const AssignmentMatrix& omega, const SimParams& params) {
  if (params.K > kMaxNodes || params.N > kMaxCarriers) {
    throw std::invalid_argument("oracle_solve: instance too large (K <= 6, N <= 8)");
  }
  const detail::LevelProblem p = detail::make_level_problem(gains, omega, params);
  Barrier barrier{p, {}};
  for (int i = 0; i < p.K; ++i) {
    if (p.node_used(i)) barrier.rows.push_back(i);
  }
  const int n = p.N;
  const double constraints = static_cast<double>(barrier.rows.size() + n);

  // Half of the equal-split point is strictly inside the feasible set.
  const auto even = equal_split_levels(gains, omega, params.power);
  Eigen::VectorXd eta(n);
  for (int g = 0; g < n; ++g) eta(g) = 0.5 * even[g];

  std::uint64_t steps = 0;
  double t = 1.0;
  std::vector<double> slack;
  while (true) {
    for (int it = 0; it < 200; ++it) {
      slack = barrier.slacks(eta);
      Eigen::VectorXd grad(n);
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
      for (int g = 0; g < n; ++g) {
        const double level = 1.0 / p.M + eta(g);
        grad(g) = -t / level - 1.0 / eta(g);
        hess(g, g) = t / (level * level) + 1.0 / (eta(g) * eta(g));
      }
      for (std::size_t r = 0; r < barrier.rows.size(); ++r) {
        const int i = barrier.rows[r];
        const double inv = 1.0 / slack[r];
        for (int g = 0; g < n; ++g) {
          const double ag = p.a(i, g);
          if (ag == 0.0) continue;
          grad(g) += ag * inv;
          for (int h = 0; h < n; ++h) hess(g, h) += ag * p.a(i, h) * inv * inv;
        }
      }
      const Eigen::VectorXd step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > 2e-15)) break;
      const double f0 = barrier.value(eta, t);
      double alpha = 1.0;
      Eigen::VectorXd next = eta + step;
      while (alpha > 1e-12 && (!barrier.interior(next) || barrier.value(next, t) > f0 - 0.25 * alpha * decrement)) {
        alpha *= 0.5;
        next = eta + alpha * step;
      }
      if (!(alpha > 1e-12)) break;
      eta = next;
      ++steps;
    }
    if (constraints / t < kGapTarget) break;
    t *= 8.0;
  }

  // The barrier point is strictly interior; scaling the levels until the
  // busiest node spends P exactly only raises the objective.
  std::vector<double> levels(eta.data(), eta.data() + n);
  const auto usage = node_usage(gains, omega, levels);
  const double peak = *std::max_element(usage.begin(), usage.end());
  if (peak > 0.0) {
    for (double& e : levels) e *= params.power / peak;
  }

  // Central-path multipliers 1/(t s_i) lose digits once the slacks reach
  // rounding level, so the multipliers are refit from stationarity instead.
  const auto mu = fit_multipliers(p, levels, node_usage(gains, omega, levels));
  return detail::finish_solution(p, gains, omega, params, std::move(levels), mu, steps, 1e-6);
}

}  // namespace comac
