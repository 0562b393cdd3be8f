#include "pqfi/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "pqfi/error.hpp"
#include "pqfi/qfi.hpp"

namespace pqfi {

namespace {

void validate(const OptimizationProblem& prob) {
  if (prob.m < 0 || prob.m >= prob.M) {
    throw Error(Errc::InvalidParameter, "optimize: requires 0 <= m < M");
  }
  if (!std::isfinite(prob.N) || prob.N < static_cast<double>(prob.m) ||
      prob.N > static_cast<double>(prob.M)) {
    throw Error(Errc::Infeasible, "optimize: mean must lie in [m, M]");
  }
}

// Variance of a pmf on {m, m+1, ...} about a known mean.
double centered_variance(std::int64_t m, const std::vector<double>& w, double N) {
  double v = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double d = static_cast<double>(m + static_cast<std::int64_t>(k)) - N;
    v += w[k] * d * d;
  }
  return v;
}

}  // namespace

Optimum maximize_variance(const OptimizationProblem& prob) {
  validate(prob);
  const double N = prob.N;

  Optimum best;
  best.variance = -1.0;

  // One-point vertex: only when N is itself a support point.
  if (N == std::floor(N)) {
    best.support_points = {static_cast<std::int64_t>(N)};
    best.weights = {1.0};
    best.variance = 0.0;
  }

  for (std::int64_t i = prob.m; static_cast<double>(i) <= N; ++i) {
    for (std::int64_t j = prob.M; static_cast<double>(j) >= N && j > i; --j) {
      const double lo = static_cast<double>(i);
      const double hi = static_cast<double>(j);
      const double variance = (hi - N) * (N - lo);
      if (variance > best.variance) {
        const double w_hi = (N - lo) / (hi - lo);
        best.support_points = {i, j};
        best.weights = {1.0 - w_hi, w_hi};
        best.variance = variance;
      }
    }
  }

  best.bound_gap = best.variance - bhatia_davis_bound(prob.m, prob.M, N);
  return best;
}

double brute_force_variance(const OptimizationProblem& prob, const BruteForceOptions& opt) {
  validate(prob);
  if (prob.M - prob.m > 30) {
    throw Error(Errc::InstanceTooLarge, "brute force: requires M - m <= 30");
  }
  if (opt.grid < 100) throw Error(Errc::InvalidParameter, "brute force: grid must be >= 100");

  const double N = prob.N;
  const std::int64_t m = prob.m;
  const std::size_t width = static_cast<std::size_t>(prob.M - prob.m + 1);
  double best = 0.0;

  // Three-point supports i < j < k: fix w_j on the grid, solve w_i and w_k
  // from normalisation and the mean.
  for (std::int64_t i = m; i <= prob.M; ++i) {
    for (std::int64_t j = i + 1; j <= prob.M; ++j) {
      for (std::int64_t k = j + 1; k <= prob.M; ++k) {
        const double a = static_cast<double>(i);
        const double b = static_cast<double>(j);
        const double c = static_cast<double>(k);
        for (int g = 0; g <= opt.grid; ++g) {
          const double wj = static_cast<double>(g) / opt.grid;
          // w_i + w_k = 1 - wj ; a w_i + c w_k = N - b wj
          const double rest = 1.0 - wj;
          const double wk = (N - b * wj - a * rest) / (c - a);
          const double wi = rest - wk;
          if (wi < 0.0 || wk < 0.0) continue;
          const double v = wi * (a - N) * (a - N) + wj * (b - N) * (b - N) +
                           wk * (c - N) * (c - N);
          best = std::max(best, v);
        }
      }
    }
  }

  // Random positive pmfs on the whole range, exponentially tilted so that
  // their mean is exactly N (bisection on the tilt).
  std::mt19937_64 rng(opt.seed);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> base(width), w(width);
  auto tilted_mean = [&](double lambda) {
    double z = 0.0, s = 0.0;
    const double top = lambda > 0.0 ? lambda * static_cast<double>(width - 1) : 0.0;
    for (std::size_t n = 0; n < width; ++n) {
      w[n] = base[n] * std::exp(lambda * static_cast<double>(n) - top);
      z += w[n];
      s += static_cast<double>(n) * w[n];
    }
    for (double& x : w) x /= z;
    return static_cast<double>(m) + s / z;
  };
  if (N > static_cast<double>(prob.m) && N < static_cast<double>(prob.M)) {
    for (int sample = 0; sample < opt.random_samples; ++sample) {
      for (double& x : base) x = expo(rng);
      double lo = -50.0, hi = 50.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (tilted_mean(mid) < N ? lo : hi) = mid;
      }
      const double got = tilted_mean(0.5 * (lo + hi));
      if (std::fabs(got - N) > 1e-9 * std::max(1.0, N)) continue;
      best = std::max(best, centered_variance(m, w, N));
    }
  }
  return best;
}

ScalingFit fit_scaling_exponent(const SpecTemplate& family, std::span<const double> sweep) {
  if (sweep.size() < 8) {
    throw Error(Errc::DegenerateSweep, "scaling fit: needs at least 8 sweep points");
  }
  std::vector<double> xs, ys;
  xs.reserve(sweep.size());
  ys.reserve(sweep.size());
  for (double value : sweep) {
    const DistributionSpec spec = family(value);
    const MomentResult mom = moments_closed_form(spec);
    if (mom.status == MomentStatus::Diverges) {
      throw Error(Errc::DivergentMember, "scaling fit: " + spec.describe() + " has divergent variance");
    }
    const double H = 4.0 * mom.variance;
    if (!(mom.mean > 0.0) || !(H > 0.0)) {
      throw Error(Errc::DegenerateSweep, "scaling fit: non-positive N or H at " + spec.describe());
    }
    xs.push_back(std::log(mom.mean));
    ys.push_back(std::log(H));
  }
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  if (*xmax - *xmin < 2.0 * std::log(10.0) * (1.0 - 1e-9)) {
    throw Error(Errc::DegenerateSweep, "scaling fit: N must span at least two decades");
  }

  const double n = static_cast<double>(xs.size());
  const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - xbar;
    const double dy = ys[k] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  ScalingFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = ybar - fit.exponent * xbar;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  fit.n_min = std::exp(*xmin);
  fit.n_max = std::exp(*xmax);
  fit.points = static_cast<int>(xs.size());
  return fit;
}

namespace {

// Bisection for an increasing function f on [lo, hi] with f(lo) < target < f(hi).
template <class F>
double invert_increasing(F f, double target, double lo, double hi) {
  for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SpecTemplate mean_template(std::string_view family, double eta) {
  const std::string name(family);
  auto need = [&name](double N, double lowest) {
    if (!std::isfinite(N) || !(N > lowest)) {
      throw Error(Errc::InvalidParameter, name + ": target mean out of range");
    }
  };
  if (name == "geometric") {
    return [need](double N) {
      need(N, 0.0);
      return DistributionSpec(family::Geometric{1.0 / (N + 1.0)});
    };
  }
  if (name == "negbin") {
    if (!(eta > 0.0)) throw Error(Errc::InvalidParameter, "negbin: eta must be positive");
    return [need, eta](double N) {
      need(N, 0.0);
      return DistributionSpec(family::NegativeBinomial{N / (N + eta), eta});
    };
  }
  if (name == "borel") {
    return [need](double N) {
      if (N == 1.0) return DistributionSpec(family::Borel{0.0});
      need(N, 1.0);
      return DistributionSpec(family::Borel{1.0 - 1.0 / N});
    };
  }
  if (name == "coherent") {
    return [need](double N) {
      need(N, 0.0);
      return DistributionSpec(family::Coherent{N});
    };
  }
  if (name == "squeezed") {
    return [need](double N) {
      need(N, 0.0);
      return DistributionSpec(family::SqueezedVacuum{std::asinh(std::sqrt(N))});
    };
  }
  if (name == "logarithmic") {
    // Mean increases from 1 (mu -> 0) without bound (mu -> 1).
    return [need](double N) {
      need(N, 1.0);
      const auto mean = [](double mu) { return -mu / ((1.0 - mu) * std::log1p(-mu)); };
      const double mu = invert_increasing(mean, N, 1e-300, std::nextafter(1.0, 0.0));
      return DistributionSpec(family::Logarithmic{mu});
    };
  }
  if (name == "zeta") {
    // Mean zeta(s-1)/zeta(s) decreases from +inf (s -> 2) to 1 (s -> inf).
    return [need](double N) {
      need(N, 1.0);
      const auto neg_mean = [](double s) {
        return -std::riemann_zeta(s - 1.0) / std::riemann_zeta(s);
      };
      const double s = invert_increasing(neg_mean, -N, 2.0 + 1e-12, 60.0);
      return DistributionSpec(family::Zeta{s});
    };
  }
  throw Error(Errc::InvalidParameter, "no mean parameterisation for family '" + name + "'");
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw Error(Errc::InvalidParameter, "log_spaced: requires 0 < lo < hi and count >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

double logarithmic_critical_mu(double tol) {
  if (!(tol > 0.0)) throw Error(Errc::InvalidParameter, "critical mu: tol must be positive");
  const auto f = [](double mu) { return 2.0 * mu + std::log1p(-mu); };
  double lo = 0.5;    // f > 0
  double hi = 0.999;  // f < 0
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::int64_t crossover_m(double N, double target_qfi) {
  if (!std::isfinite(N) || !(N > 0.0)) {
    throw Error(Errc::InvalidParameter, "crossover: N must be positive");
  }
  if (!std::isfinite(target_qfi) || !(target_qfi > 0.0)) {
    throw Error(Errc::InvalidParameter, "crossover: target QFI must be positive and finite");
  }
  const auto lowest = static_cast<std::int64_t>(std::ceil(N));
  // 4N(M-N) >= target  <=>  M >= N + target/(4N); correct for rounding below.
  auto M = std::max(lowest, static_cast<std::int64_t>(std::ceil(N + target_qfi / (4.0 * N))));
  M = std::max<std::int64_t>(M, 1);
  while (qfi_mandm_fixed_n(0, M, N) < target_qfi) ++M;
  while (M - 1 >= std::max<std::int64_t>(lowest, 1) && qfi_mandm_fixed_n(0, M - 1, N) >= target_qfi) --M;
  return M;
}

}  // namespace pqfi
