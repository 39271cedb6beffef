#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace comac::oracle {

namespace {

MonteCarlo summarize(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  long double sum = 0.0L;
  for (double x : xs) sum += x;
  const double mean = static_cast<double>(sum / n);
  long double ss = 0.0L;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = xs.size() > 1 ? static_cast<double>(ss / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

MonteCarlo gamma_direct(int K, int M, std::uint64_t trials, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> g(K), samples;
  samples.reserve(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (double& x : g) x = exp1(rng);
    std::sort(g.begin(), g.end(), [](double a, double b) { return a > b; });
    double s = 0.0;
    for (int j = 0; j < M; ++j) s += g[M - 1] / g[j];
    samples.push_back(s / M);
  }
  return summarize(samples);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

double expected_cplus_exponential(double offset, double scale) {
  auto integrand = [&](double x) {
    const double arg = offset + scale * x;
    return (arg > 1.0 ? 0.5 * std::log2(arg) : 0.0) * std::exp(-x);
  };
  // Split at the clipping kink and truncate where e^{-x} is negligible.
  const double kink = scale > 0.0 ? std::max(0.0, (1.0 - offset) / scale) : 0.0;
  const double end = std::max(80.0, kink + 80.0);
  if (kink > 0.0) return integrate(integrand, 0.0, kink) + integrate(integrand, kink, end);
  return integrate(integrand, 0.0, end);
}

MonteCarlo opportunistic_direct(int K, int M, double power, double gamma, std::uint64_t trials, std::uint32_t seed) {
  if (K % M != 0) throw std::invalid_argument("opportunistic_direct: M must divide K");
  std::mt19937 rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> g(K), samples;
  samples.reserve(trials);
  const double B = static_cast<double>(K / M);
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (double& x : g) x = exp1(rng);
    std::sort(g.begin(), g.end(), [](double a, double b) { return a > b; });
    const double arg = 1.0 / M + g[M - 1] * K * power / (M * gamma);
    samples.push_back(arg > 1.0 ? 0.5 * std::log2(arg) / B : 0.0);
  }
  return summarize(samples);
}

std::pair<double, double> two_carrier_levels(const GainMatrix& gains, const AssignmentMatrix& omega, double power,
                                             int M) {
  if (gains.cols() != 2) throw std::invalid_argument("two_carrier_levels: exactly two sub-carriers");
  const std::size_t K = gains.rows();
  auto cost = [&](std::size_t i, int g) { return omega(i, g) ? 1.0 / gains(i, g) : 0.0; };
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < K; ++i) {
    if (cost(i, 0) > 0.0) hi = std::min(hi, power / cost(i, 0));
  }
  auto second = [&](double e1) {
    double e2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < K; ++i) {
      if (cost(i, 1) > 0.0) e2 = std::min(e2, (power - cost(i, 0) * e1) / cost(i, 1));
    }
    return std::max(0.0, e2);
  };
  auto value = [&](double e1) { return std::log(1.0 / M + e1) + std::log(1.0 / M + second(e1)); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = value(c), fd = value(d);
  for (int it = 0; it < 300 && b - a > 1e-14 * std::max(1.0, hi); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = value(d);
    }
  }
  const double e1 = 0.5 * (a + b);
  return {e1, second(e1)};
}

}  // namespace comac::oracle
