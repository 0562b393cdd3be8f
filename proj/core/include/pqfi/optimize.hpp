#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "pqfi/dist.hpp"

namespace pqfi {

/// Maximise the variance of a pmf on {m..M} with prescribed mean N.
struct OptimizationProblem {
  std::int64_t m = 0;
  std::int64_t M = 1;
  double N = 0.0;
};

struct Optimum {
  std::vector<std::int64_t> support_points;
  std::vector<double> weights;
  double variance = 0.0;
  /// variance - bhatia_davis_bound(m, M, N); zero at the optimum.
  double bound_gap = 0.0;
};

/// Exact solution by vertex enumeration.
///
/// The feasible set is a polytope cut by two equality constraints, so every
/// vertex carries at most two non-zero weights. All pairs i <= N <= j are
/// solved in closed form and the best one returned. Throws Infeasible when N
/// lies outside [m, M] and InvalidParameter when m >= M.
Optimum maximize_variance(const OptimizationProblem& prob);

struct BruteForceOptions {
  /// Grid steps along the free weight of each three-point support.
  int grid = 100;
  /// Random full-support distributions, tilted to the target mean.
  int random_samples = 2000;
  std::uint64_t seed = 0x5eed;
};

/// Independent search over three-point grids and random full-support pmfs.
/// Intended for small instances only: throws InstanceTooLarge when M - m > 30.
double brute_force_variance(const OptimizationProblem& prob, const BruteForceOptions& opt = {});

struct ScalingFit {
  double exponent = 0.0;   ///< slope of ln H against ln N
  double intercept = 0.0;  ///< ln H at ln N = 0
  double r_squared = 0.0;
  double n_min = 0.0;
  double n_max = 0.0;
  int points = 0;
};

/// Builds a distribution from one swept parameter value.
using SpecTemplate = std::function<DistributionSpec(double)>;

/// Least-squares fit of ln H against ln N over a sweep, with (N, H) from closed
/// forms. Needs at least 8 points spanning two decades in N (DegenerateSweep);
/// a member with divergent variance raises DivergentMember.
ScalingFit fit_scaling_exponent(const SpecTemplate& family, std::span<const double> sweep);

/// Template that maps a target mean photon number onto the named family:
/// geometric, negbin (with the given eta), logarithmic, borel, coherent,
/// squeezed or zeta. Throws InvalidParameter for other names.
SpecTemplate mean_template(std::string_view family, double eta = 1.0);

/// `count` points log-spaced over [lo, hi], endpoints included.
std::vector<double> log_spaced(double lo, double hi, int count);

/// Root of 2 mu + ln(1 - mu) on (0.5, 0.999) by bisection, to within tol.
double logarithmic_critical_mu(double tol);

/// Smallest integer M >= ceil(N) with qfi_mandm_fixed_n(0, M, N) >= target_qfi.
std::int64_t crossover_m(double N, double target_qfi);

}  // namespace pqfi
