#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pqfi/error.hpp"
#include "pqfi/optimize.hpp"
#include "pqfi/qfi.hpp"

using namespace pqfi;

namespace {

template <class Fn>
Errc code_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected pqfi::Error";
  return Errc::ParseError;
}

}  // namespace

TEST(MaximizeVariance, ZeroAndMWorkingPoint) {
  const Optimum opt = maximize_variance({0, 25, 7.46});
  ASSERT_EQ(opt.support_points, (std::vector<std::int64_t>{0, 25}));
  EXPECT_NEAR(opt.weights[0], 0.7016, 1e-12);
  EXPECT_NEAR(opt.weights[1], 0.2984, 1e-12);
  EXPECT_NEAR(opt.variance, 130.8484, 1e-10);
  EXPECT_NEAR(4.0 * opt.variance, 523.39, 0.01);
  EXPECT_NEAR(opt.bound_gap, 0.0, 1e-9);
}

TEST(MaximizeVariance, BalancedCase) {
  const Optimum opt = maximize_variance({0, 10, 5.0});
  ASSERT_EQ(opt.support_points, (std::vector<std::int64_t>{0, 10}));
  EXPECT_DOUBLE_EQ(opt.weights[0], 0.5);
  EXPECT_DOUBLE_EQ(opt.weights[1], 0.5);
  EXPECT_DOUBLE_EQ(opt.variance, 25.0);
}

TEST(MaximizeVariance, ShiftedSupport) {
  const Optimum opt = maximize_variance({3, 9, 4.0});
  EXPECT_DOUBLE_EQ(opt.variance, 5.0);
  ASSERT_EQ(opt.support_points, (std::vector<std::int64_t>{3, 9}));
  // Brute-force oracle agrees.
  EXPECT_NEAR(brute_force_variance({3, 9, 4.0}), 5.0, 1e-12);
}

TEST(MaximizeVariance, DegenerateMeanIsOnePoint) {
  for (const OptimizationProblem prob : {OptimizationProblem{2, 9, 2.0}, OptimizationProblem{2, 9, 9.0}}) {
    const Optimum opt = maximize_variance(prob);
    ASSERT_EQ(opt.support_points.size(), 1u);
    EXPECT_EQ(static_cast<double>(opt.support_points[0]), prob.N);
    EXPECT_EQ(opt.variance, 0.0);
  }
}

TEST(MaximizeVariance, Errors) {
  EXPECT_EQ(code_of([] { maximize_variance({0, 10, 11.0}); }), Errc::Infeasible);
  EXPECT_EQ(code_of([] { maximize_variance({4, 10, 3.0}); }), Errc::Infeasible);
  EXPECT_EQ(code_of([] { maximize_variance({10, 10, 10.0}); }), Errc::InvalidParameter);
}

TEST(MaximizeVariance, InvariantsOnRandomProblems) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::int64_t> pick(0, 150);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const std::int64_t m = pick(rng);
    const std::int64_t M = m + 1 + pick(rng) % 50;
    const double N = static_cast<double>(m) + unit(rng) * static_cast<double>(M - m);
    const Optimum opt = maximize_variance({m, M, N});
    double wsum = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < opt.weights.size(); ++i) {
      ASSERT_GE(opt.weights[i], 0.0);
      wsum += opt.weights[i];
      mean += opt.weights[i] * static_cast<double>(opt.support_points[i]);
    }
    ASSERT_NEAR(wsum, 1.0, 1e-12);
    ASSERT_NEAR(mean, N, 1e-10 * std::max(1.0, N));
    ASSERT_EQ(opt.support_points, (std::vector<std::int64_t>{m, M}));
    ASSERT_NEAR(opt.bound_gap, 0.0, 1e-9 * std::max(1.0, opt.variance));
  }
}

TEST(BruteForce, Examples) {
  const double a = brute_force_variance({0, 5, 2.5});
  EXPECT_LE(a, 6.25 * (1 + 1e-12));
  EXPECT_GT(a, 6.25 * (1 - 1e-9));
  const double b = brute_force_variance({0, 8, 3.0});
  EXPECT_LE(b, 15.0 * (1 + 1e-12));
  EXPECT_GT(b, 15.0 * (1 - 1e-9));
  const double c = brute_force_variance({1, 4, 2.0});
  EXPECT_LE(c, 2.0 * (1 + 1e-12));
  EXPECT_GT(c, 2.0 * (1 - 1e-9));
}

TEST(BruteForce, NeverBeatsVertexEnumeration) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::int64_t> pick(0, 20);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BruteForceOptions opt;
  opt.random_samples = 300;
  for (int k = 0; k < 20; ++k) {
    const std::int64_t m = pick(rng);
    const std::int64_t M = m + 1 + pick(rng) % 10;
    const double N = static_cast<double>(m) + unit(rng) * static_cast<double>(M - m);
    const double exact = maximize_variance({m, M, N}).variance;
    ASSERT_LE(brute_force_variance({m, M, N}, opt), exact * (1 + 1e-12) + 1e-12);
  }
}

TEST(BruteForce, Limits) {
  EXPECT_EQ(code_of([] { brute_force_variance({0, 31, 3.0}); }), Errc::InstanceTooLarge);
  BruteForceOptions coarse;
  coarse.grid = 50;
  EXPECT_EQ(code_of([&] { brute_force_variance({0, 5, 3.0}, coarse); }), Errc::InvalidParameter);
}

TEST(ScalingFit, HeisenbergAndSubHeisenberg) {
  const auto sweep = log_spaced(1e2, 1e4, 25);
  const ScalingFit geo = fit_scaling_exponent(mean_template("geometric"), sweep);
  EXPECT_NEAR(geo.exponent, 2.0, 0.02);
  EXPECT_GT(geo.r_squared, 0.9999);
  EXPECT_EQ(geo.points, 25);
  EXPECT_NEAR(geo.n_min, 1e2, 1e-9);
  EXPECT_NEAR(geo.n_max, 1e4, 1e-6);

  EXPECT_NEAR(fit_scaling_exponent(mean_template("squeezed"), sweep).exponent, 2.0, 0.02);
  EXPECT_NEAR(fit_scaling_exponent(mean_template("borel"), sweep).exponent, 3.0, 0.02);
  // Logarithmic H grows like N^2 ln N: the finite-range slope sits a little above 2.
  const double lg = fit_scaling_exponent(mean_template("logarithmic"), sweep).exponent;
  EXPECT_GT(lg, 2.0);
  EXPECT_LT(lg, 2.25);
  EXPECT_NEAR(fit_scaling_exponent(mean_template("coherent"), sweep).exponent, 1.0, 1e-9);
}

TEST(ScalingFit, NegativeBinomialSignSwitch) {
  // With eta fixed below 1, mu eta < 1 throughout and the slope tends to 2.
  const auto sweep = log_spaced(1e2, 1e4, 20);
  EXPECT_NEAR(fit_scaling_exponent(mean_template("negbin", 0.5), sweep).exponent, 2.0, 0.02);
  for (double mu : {0.2, 0.5, 0.9}) {
    const double boundary = 1.0 / mu;
    EXPECT_GT(negative_binomial_variance_excess(mu, boundary * 0.99), 0.0);
    EXPECT_LT(negative_binomial_variance_excess(mu, boundary * 1.01), 0.0);
  }
}

TEST(ScalingFit, Errors) {
  EXPECT_EQ(code_of([] { fit_scaling_exponent(mean_template("geometric"), log_spaced(1e2, 1e3, 10)); }),
            Errc::DegenerateSweep);
  EXPECT_EQ(code_of([] { fit_scaling_exponent(mean_template("geometric"), log_spaced(1e2, 1e4, 5)); }),
            Errc::DegenerateSweep);
  // Zeta with a large mean lives at s < 3, where the variance diverges.
  EXPECT_EQ(code_of([] { fit_scaling_exponent(mean_template("zeta"), log_spaced(1e2, 1e4, 10)); }),
            Errc::DivergentMember);
  EXPECT_EQ(code_of([] { mean_template("ssw"); }), Errc::InvalidParameter);
}

TEST(MeanTemplate, HitsTargetMean) {
  for (const char* name : {"geometric", "negbin", "borel", "coherent", "squeezed", "logarithmic", "zeta"}) {
    for (double N : {1.5, 3.0, 20.0}) {
      const MomentResult m = moments_closed_form(mean_template(name, 2.0)(N));
      EXPECT_NEAR(m.mean, N, 1e-9 * N) << name;
    }
  }
}

TEST(CriticalMu, RootOfLogarithmicExcess) {
  const double mu = logarithmic_critical_mu(1e-6);
  EXPECT_NEAR(mu, 0.79681213002002, 1e-6);
  EXPECT_NEAR(mu, 0.7968, 5e-5);
  EXPECT_NEAR(2 * mu + std::log1p(-mu), 0.0, 1e-5);
  EXPECT_LT(logarithmic_variance_excess(mu - 0.01), 0.0);
  EXPECT_GT(logarithmic_variance_excess(mu + 0.01), 0.0);
  EXPECT_LT(std::fabs(logarithmic_critical_mu(5e-7) - mu), 1e-6);
  EXPECT_EQ(code_of([] { logarithmic_critical_mu(0.0); }), Errc::InvalidParameter);
}

TEST(Crossover, Examples) {
  EXPECT_EQ(crossover_m(7.46, qfi_squeezed(7.46)), 25);
  EXPECT_EQ(crossover_m(7.46, 504.89), 25);
  // 4 * 7.46 * (M - 7.46) >= 1e5 first holds at M = 3359.
  EXPECT_EQ(crossover_m(7.46, 1e5), 3359);
  EXPECT_EQ(crossover_m(1.0, 4.0), 2);
  EXPECT_EQ(code_of([] { crossover_m(0.0, 4.0); }), Errc::InvalidParameter);
  EXPECT_EQ(code_of([] { crossover_m(1.0, -4.0); }), Errc::InvalidParameter);
}

TEST(Crossover, IsSmallestSatisfyingCutoff) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const double N = 0.1 + 50 * unit(rng);
    const double target = 1.0 + 1e5 * unit(rng);
    const std::int64_t M = crossover_m(N, target);
    ASSERT_GE(static_cast<double>(M), std::ceil(N));
    ASSERT_GE(qfi_mandm_fixed_n(0, M, N), target);
    if (static_cast<double>(M - 1) >= std::ceil(N) && M - 1 > 0) {
      ASSERT_LT(qfi_mandm_fixed_n(0, M - 1, N), target);
    }
  }
}
