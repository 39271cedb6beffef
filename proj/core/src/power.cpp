#include "comac/power.hpp"

#include "power_internal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace comac {

namespace detail {

bool LevelProblem::node_used(int i) const {
  for (int g = 0; g < N; ++g) {
    if (a(i, g) > 0.0) return true;
  }
  return false;
}

LevelProblem make_level_problem(const GainMatrix& gains, const AssignmentMatrix& omega, const SimParams& params) {
  params.validate();
  const auto K = static_cast<std::size_t>(params.K);
  const auto N = static_cast<std::size_t>(params.N);
  if (gains.rows() != K || gains.cols() != N) throw std::invalid_argument("power: gain matrix is not K x N");
  if (omega.rows() != K || omega.cols() != N) throw std::invalid_argument("power: assignment matrix is not K x N");
  validate_assignment(omega, params.M);

  LevelProblem problem;
  problem.K = params.K;
  problem.M = params.M;
  problem.N = params.N;
  problem.power = params.power;
  problem.A.assign(K * N, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t g = 0; g < N; ++g) {
      const double gain = gains(i, g);
      if (!(gain >= 0.0) || !std::isfinite(gain)) throw std::invalid_argument("power: gains must be finite and >= 0");
      if (!omega(i, g)) continue;
      if (gain == 0.0) throw std::invalid_argument("power: degenerate realization (zero gain on a chosen node)");
      problem.A[i * N + g] = 1.0 / gain;
    }
  }
  return problem;
}

PowerSolution finish_solution(const LevelProblem& problem, const GainMatrix& gains, const AssignmentMatrix& omega,
                              const SimParams& params, std::vector<double> eta,
                              const std::vector<double>& mu_scaled, std::uint64_t iterations, double residual_tol) {
  for (double& e : eta) e = std::max(0.0, e);
  const auto usage = node_usage(gains, omega, eta);
  const double peak = usage.empty() ? 0.0 : *std::max_element(usage.begin(), usage.end());
  if (peak > problem.power) {
    const double shrink = problem.power / peak;
    for (double& e : eta) e *= shrink;
  }

  PowerSolution solution;
  const double to_rate = static_cast<double>(problem.M) /
                         (static_cast<double>(problem.K) * problem.N) / (2.0 * std::numbers::ln2);
  solution.mu.resize(mu_scaled.size());
  for (std::size_t i = 0; i < mu_scaled.size(); ++i) solution.mu[i] = mu_scaled[i] * to_rate;
  solution.power = levels_to_power(gains, omega, eta);
  solution.objective = level_rate(eta, problem.K, problem.M);
  solution.smooth_objective = level_smooth_objective(eta, problem.M);
  solution.eta = std::move(eta);
  solution.iterations = iterations;
  solution.residuals = verify_kkt(solution, gains, omega, params, residual_tol);
  return solution;
}

}  // namespace detail

namespace {

using detail::LevelProblem;

// Dual of the scaled program. For multipliers mu the Lagrangian maximizer is
// eta_g = max(0, 1/lambda_g - 1/M) with lambda_g = sum_i mu_i A_{i,g}, and
// D(mu) = sum_g phi(lambda_g) + P sum_i mu_i.
double level_of(double lambda, int M) {
  if (lambda <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, 1.0 / lambda - 1.0 / M);
}

double phi(double lambda, int M) {
  if (lambda <= 0.0) return std::numeric_limits<double>::infinity();
  if (lambda >= M) return -std::log(static_cast<double>(M));
  return -std::log(lambda) - 1.0 + lambda / M;
}

class DualState {
public:
  explicit DualState(const LevelProblem& p) : p_(p), mu_(p.K, 0.0), lambda_(p.N, 0.0) {}

  const std::vector<double>& mu() const { return mu_; }
  const std::vector<double>& lambda() const { return lambda_; }

  void set_mu(std::vector<double> mu) {
    mu_ = std::move(mu);
    refresh();
  }

  void refresh() {
    std::fill(lambda_.begin(), lambda_.end(), 0.0);
    for (int i = 0; i < p_.K; ++i) {
      if (mu_[i] == 0.0) continue;
      for (int g = 0; g < p_.N; ++g) lambda_[g] += mu_[i] * p_.a(i, g);
    }
  }

  double dual_value() const { return dual_value_at(lambda_, mu_); }

  double dual_value_at(const std::vector<double>& lambda, const std::vector<double>& mu) const {
    double d = 0.0;
    for (int g = 0; g < p_.N; ++g) d += phi(lambda[g], p_.M);
    for (double m : mu) d += p_.power * m;
    return d;
  }

  std::vector<double> levels() const {
    std::vector<double> eta(p_.N);
    for (int g = 0; g < p_.N; ++g) eta[g] = level_of(lambda_[g], p_.M);
    return eta;
  }

  double usage(int i) const {
    double u = 0.0;
    for (int g = 0; g < p_.N; ++g) {
      const double a = p_.a(i, g);
      if (a > 0.0) u += a * level_of(lambda_[g], p_.M);
    }
    return u;
  }

  // Exact minimization of D over mu_i with the others fixed: the root of
  // usage_i(t) = P for t >= 0, or t = 0 if node i is slack at t = 0.
  void squeeze(int i) {
    const double old = mu_[i];
    std::vector<double>& base = scratch_;
    base.assign(p_.N, 0.0);
    bool used = false;
    for (int g = 0; g < p_.N; ++g) {
      const double a = p_.a(i, g);
      base[g] = std::max(0.0, lambda_[g] - old * a);
      used = used || a > 0.0;
    }
    if (!used) {
      apply(i, 0.0);
      return;
    }
    auto excess = [&](double t, double* derivative) {
      double u = 0.0;
      double du = 0.0;
      for (int g = 0; g < p_.N; ++g) {
        const double a = p_.a(i, g);
        if (a == 0.0) continue;
        const double lambda = base[g] + t * a;
        const double level = level_of(lambda, p_.M);
        u += a * level;
        if (lambda > 0.0 && lambda < p_.M) du -= a * a / (lambda * lambda);
      }
      if (derivative != nullptr) *derivative = du;
      return u - p_.power;
    };

    double f0 = excess(0.0, nullptr);
    if (f0 <= 0.0) {
      apply(i, 0.0);
      return;
    }
    // Start to the left of the root: the excess is convex and decreasing in t,
    // so Newton steps from there approach the root monotonically.
    double t = old > 0.0 ? old : 1.0;
    double d = 0.0;
    double f = excess(t, &d);
    if (f <= 0.0 && std::isfinite(f0)) {
      t = 0.0;
      f = excess(t, &d);
    }
    while (f <= 0.0 && t > 1e-300) {
      t *= 0.5;
      f = excess(t, &d);
    }
    for (int it = 0; it < 200 && f > 0.0; ++it) {
      if (!(d < 0.0)) break;
      const double next = t - f / d;
      if (!(next > t)) break;
      t = next;
      f = excess(t, &d);
      if (f <= p_.power * 1e-15) break;
    }
    apply(i, t);
  }

  void apply(int i, double t) {
    const double delta = t - mu_[i];
    if (delta == 0.0) return;
    for (int g = 0; g < p_.N; ++g) lambda_[g] = std::max(0.0, lambda_[g] + delta * p_.a(i, g));
    mu_[i] = t;
  }

private:
  const LevelProblem& p_;
  std::vector<double> mu_;
  std::vector<double> lambda_;
  std::vector<double> scratch_;
};

struct Status {
  bool converged = false;
  double worst_excess = 0.0;
};

Status check(const DualState& state, const LevelProblem& p, double tol) {
  Status s{true, 0.0};
  for (int i = 0; i < p.K; ++i) {
    const double u = state.usage(i);
    const double over = (u - p.power) / p.power;
    const double gap = state.mu()[i] > 0.0 ? std::fabs(over) : std::max(0.0, over);
    s.worst_excess = std::max(s.worst_excess, std::isfinite(gap) ? gap : std::numeric_limits<double>::infinity());
    if (!(gap <= tol)) s.converged = false;
  }
  return s;
}

// Damped Newton iterations on the tight set T: solve usage_T(mu) = P with
// Jacobian -J, J_{ij} = sum_{active g} A_{i,g} A_{j,g} / lambda_g^2. A step is
// kept only if the dual objective does not increase.
bool polish(DualState& state, const LevelProblem& p) {
  bool improved = false;
  for (int round = 0; round < 8; ++round) {
    std::vector<int> tight;
    std::vector<double> usage(p.K);
    for (int i = 0; i < p.K; ++i) {
      usage[i] = state.usage(i);
      if (state.mu()[i] > 0.0 || usage[i] > p.power) tight.push_back(i);
    }
    if (tight.empty()) return improved;
    const auto& lambda = state.lambda();
    const int n = static_cast<int>(tight.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd r(n);
    for (int a = 0; a < n; ++a) {
      r(a) = usage[tight[a]] - p.power;
      if (!std::isfinite(r(a))) return improved;
    }
    for (int g = 0; g < p.N; ++g) {
      if (!(lambda[g] > 0.0 && lambda[g] < p.M)) continue;
      const double w = 1.0 / (lambda[g] * lambda[g]);
      for (int a = 0; a < n; ++a) {
        const double ia = p.a(tight[a], g);
        if (ia == 0.0) continue;
        for (int b = 0; b < n; ++b) J(a, b) += w * ia * p.a(tight[b], g);
      }
    }
    const double d0 = state.dual_value();
    const std::vector<double> mu0 = state.mu();
    bool accepted = false;
    for (double damping : {1e-12, 1e-8, 1e-4, 1e-1}) {
      Eigen::MatrixXd H = J;
      for (int a = 0; a < n; ++a) H(a, a) += damping * std::max(J(a, a), 1e-300);
      const Eigen::VectorXd step = H.ldlt().solve(r);
      if (!step.allFinite()) continue;
      for (double alpha = 1.0; alpha > 1e-6; alpha *= 0.5) {
        std::vector<double> trial = mu0;
        for (int a = 0; a < n; ++a) trial[tight[a]] = std::max(0.0, mu0[tight[a]] + alpha * step(a));
        state.set_mu(trial);
        const double d1 = state.dual_value();
        if (d1 <= d0 + 1e-15 * std::fabs(d0)) {
          accepted = true;
          break;
        }
      }
      if (accepted) break;
    }
    if (!accepted) {
      state.set_mu(mu0);
      return improved;
    }
    improved = true;
  }
  return improved;
}

}  // namespace

AssignmentMatrix build_assignment(const GainMatrix& gains, int M) {
  const std::size_t K = gains.rows();
  if (M < 1 || static_cast<std::size_t>(M) > K) throw std::invalid_argument("build_assignment: need 1 <= M <= K");
  AssignmentMatrix omega(K, gains.cols(), 0);
  for (std::size_t g = 0; g < gains.cols(); ++g) {
    const auto column = gains.column(g);
    const auto order = order_indexes(column);
    for (int r = 0; r < M; ++r) omega(order[r], g) = 1;
  }
  return omega;
}

PowerMatrix allocate_average(const GainMatrix& gains, const SimParams& params, const GammaEstimate& gamma) {
  params.validate();
  const auto K = static_cast<std::size_t>(params.K);
  const auto N = static_cast<std::size_t>(params.N);
  if (gains.rows() != K || gains.cols() != N) throw std::invalid_argument("allocate_average: gain matrix is not K x N");
  if (gamma.K != params.K || gamma.M != params.M) {
    throw std::invalid_argument("allocate_average: Gamma estimate does not match (K, M)");
  }
  if (!(gamma.value > 0.0)) throw std::invalid_argument("allocate_average: Gamma must be positive");
  const int M = params.M;
  PowerMatrix power(K, N, 0.0);
  const double scale = static_cast<double>(params.K) * params.power / static_cast<double>(N);
  for (std::size_t g = 0; g < N; ++g) {
    const auto column = gains.column(g);
    const auto order = order_indexes(column);
    const double weakest = column[order[M - 1]];
    if (weakest == 0.0) throw std::invalid_argument("allocate_average: degenerate realization (zero chosen gain)");
    for (int r = 0; r < M; ++r) {
      const int i = order[r];
      power(i, g) = scale * (weakest / column[i]) / (M * gamma.value);
    }
  }
  return power;
}

PowerSolution sponge_squeeze(const GainMatrix& gains, const AssignmentMatrix& omega, const SimParams& params,
                             const SolverOptions& options) {
  if (!(options.power_tol > 0.0) || !(options.residual_tol > 0.0)) {
    throw std::invalid_argument("sponge_squeeze: tolerances must be positive");
  }
  const LevelProblem p = detail::make_level_problem(gains, omega, params);
  DualState state(p);

  // Initialization: every sponge absorbs evenly, i.e. each node spends P/N per
  // carrier. Multipliers are seeded so that the chosen nodes of a carrier share
  // the multiplier sum reproducing that even level.
  {
    const auto eta0 = equal_split_levels(gains, omega, params.power);
    std::vector<double> mu0(p.K, 0.0);
    for (int i = 0; i < p.K; ++i) {
      double sum = 0.0;
      int count = 0;
      for (int g = 0; g < p.N; ++g) {
        const double a = p.a(i, g);
        if (a == 0.0) continue;
        const double target = 1.0 / (1.0 / p.M + eta0[g]);
        sum += target / (p.M * a);
        ++count;
      }
      mu0[i] = count > 0 ? sum / count : 0.0;
    }
    state.set_mu(std::move(mu0));
  }

  // Squeezing: Gauss-Seidel sweeps, each node pressed until its own budget is
  // exactly spent (or released if it cannot spend it), with periodic Newton
  // polishing on the tight set.
  std::uint64_t sweeps = 0;
  const int cadence = std::max(1, options.polish_every);
  while (true) {
    const Status status = check(state, p, options.power_tol);
    if (status.converged) break;
    if (sweeps >= options.max_sweeps) {
      auto partial = detail::finish_solution(p, gains, omega, params, state.levels(), state.mu(), sweeps,
                                             options.residual_tol);
      throw ConvergenceError("sponge_squeeze: sweep budget exhausted", partial.residuals);
    }
    for (int i = 0; i < p.K; ++i) state.squeeze(i);
    ++sweeps;
    state.refresh();
    if (sweeps % cadence == 0) polish(state, p);
  }
  return detail::finish_solution(p, gains, omega, params, state.levels(), state.mu(), sweeps, options.residual_tol);
}

KktReport verify_kkt(const PowerSolution& solution, const GainMatrix& gains, const AssignmentMatrix& omega,
                     const SimParams& params, double tol) {
  const auto K = static_cast<std::size_t>(params.K);
  const auto N = static_cast<std::size_t>(params.N);
  if (solution.eta.size() != N || solution.mu.size() != K || gains.rows() != K || gains.cols() != N ||
      omega.rows() != K || omega.cols() != N) {
    throw std::invalid_argument("verify_kkt: shapes do not match K x N");
  }
  const double P = params.power;
  const double M = params.M;
  KktReport report;

  double eta_max = 0.0;
  for (double e : solution.eta) eta_max = std::max(eta_max, std::fabs(e));
  for (double e : solution.eta) report.feasibility = std::max(report.feasibility, -e / (1.0 / M + eta_max));

  const auto usage = node_usage(gains, omega, solution.eta);
  double peak = 0.0;
  double mu_max = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    report.feasibility = std::max(report.feasibility, (usage[i] - P) / P);
    peak = std::max(peak, usage[i]);
    mu_max = std::max(mu_max, solution.mu[i]);
  }
  report.max_power_gap = std::fabs(peak - P);

  if (mu_max > 0.0) {
    for (std::size_t i = 0; i < K; ++i) {
      report.slackness = std::max(report.slackness, solution.mu[i] * std::fabs(usage[i] - P) / (P * mu_max));
    }
  }

  // s_g = (1/M + eta_g) sum_i mu_i G_{i,g} omega_{i,g} must be common on
  // active carriers; inactive carriers need lambda_g / M >= that common value.
  std::vector<double> lambda(N, 0.0);
  for (std::size_t g = 0; g < N; ++g) {
    for (std::size_t i = 0; i < K; ++i) {
      if (omega(i, g) && gains(i, g) > 0.0) lambda[g] += solution.mu[i] / gains(i, g);
    }
  }
  const double threshold = 1e-9 * (1.0 / M + eta_max);
  double s_min = std::numeric_limits<double>::infinity();
  double s_max = 0.0;
  double s_sum = 0.0;
  int active = 0;
  for (std::size_t g = 0; g < N; ++g) {
    if (solution.eta[g] > threshold) {
      const double s = (1.0 / M + solution.eta[g]) * lambda[g];
      s_min = std::min(s_min, s);
      s_max = std::max(s_max, s);
      s_sum += s;
      ++active;
    }
  }
  if (active == 0 || !(s_sum > 0.0)) {
    report.stationarity = 1.0;
  } else {
    const double common = s_sum / active;
    report.stationarity = (s_max - s_min) / common;
    for (std::size_t g = 0; g < N; ++g) {
      if (solution.eta[g] > threshold) continue;
      report.stationarity = std::max(report.stationarity, (common - lambda[g] / M) / common);
    }
  }

  report.pass = report.feasibility <= tol && report.slackness <= tol && report.stationarity <= tol &&
                report.max_power_gap <= tol * P;
  return report;
}

std::vector<double> node_usage(const GainMatrix& gains, const AssignmentMatrix& omega, std::span<const double> eta) {
  if (gains.rows() != omega.rows() || gains.cols() != omega.cols() || eta.size() != gains.cols()) {
    throw std::invalid_argument("node_usage: shape mismatch");
  }
  std::vector<double> usage(gains.rows(), 0.0);
  for (std::size_t i = 0; i < gains.rows(); ++i) {
    for (std::size_t g = 0; g < gains.cols(); ++g) {
      if (omega(i, g) && eta[g] != 0.0) usage[i] += eta[g] / gains(i, g);
    }
  }
  return usage;
}

std::vector<double> equal_split_levels(const GainMatrix& gains, const AssignmentMatrix& omega, double power) {
  if (gains.rows() != omega.rows() || gains.cols() != omega.cols()) {
    throw std::invalid_argument("equal_split_levels: shape mismatch");
  }
  const double N = static_cast<double>(gains.cols());
  std::vector<double> eta(gains.cols(), std::numeric_limits<double>::infinity());
  for (std::size_t g = 0; g < gains.cols(); ++g) {
    for (std::size_t i = 0; i < gains.rows(); ++i) {
      if (omega(i, g)) eta[g] = std::min(eta[g], gains(i, g) * power / N);
    }
    if (!std::isfinite(eta[g])) throw std::invalid_argument("equal_split_levels: carrier with no chosen node");
  }
  return eta;
}

double level_rate(std::span<const double> eta, int K, int M) {
  const double N = static_cast<double>(eta.size());
  if (eta.empty()) return 0.0;
  double total = 0.0;
  for (double e : eta) total += cplus(N / M + N * e);
  return static_cast<double>(M) / (K * N) * total;
}

double level_smooth_objective(std::span<const double> eta, int M) {
  const double N = static_cast<double>(eta.size());
  double total = 0.0;
  for (double e : eta) total += 0.5 * std::log2(N / M + N * e);
  return total;
}

PowerMatrix levels_to_power(const GainMatrix& gains, const AssignmentMatrix& omega, std::span<const double> eta) {
  if (gains.rows() != omega.rows() || gains.cols() != omega.cols() || eta.size() != gains.cols()) {
    throw std::invalid_argument("levels_to_power: shape mismatch");
  }
  PowerMatrix power(gains.rows(), gains.cols(), 0.0);
  for (std::size_t i = 0; i < gains.rows(); ++i) {
    for (std::size_t g = 0; g < gains.cols(); ++g) {
      if (omega(i, g) && eta[g] != 0.0) power(i, g) = eta[g] / gains(i, g);
    }
  }
  return power;
}

}  // namespace comac
