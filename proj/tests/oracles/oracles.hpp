#pragma once

// Independent reference computations for the tests. Nothing here calls the
// estimators under test; randomness comes from a separate engine family.

#include "comac/numerics.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace comac::oracle {

struct MonteCarlo {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Gamma(K, M) by explicit per-trial ratio sums on std::mt19937 draws.
MonteCarlo gamma_direct(int K, int M, std::uint64_t trials, std::uint32_t seed);

/// Adaptive Simpson integration of f on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

/// E[C+(offset + scale X)] for X unit-mean exponential, by quadrature.
double expected_cplus_exponential(double offset, double scale);

/// Straightforward opportunistic rate (1/B) C+(1/M + g_(M) K P / (M gamma))
/// on independent draws.
MonteCarlo opportunistic_direct(int K, int M, double power, double gamma, std::uint64_t trials, std::uint32_t seed);

/// Levels maximizing sum_g ln(1/M + eta_g) for two sub-carriers by golden
/// section over eta_1 (eta_2 set to the largest feasible value).
std::pair<double, double> two_carrier_levels(const GainMatrix& gains, const AssignmentMatrix& omega, double power,
                                             int M);

}  // namespace comac::oracle
