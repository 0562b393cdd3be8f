#pragma once

// Photon-number distributions of single-mode probe states.
//
// Only probabilities p(n) are modelled. Amplitude phases do not enter the
// phase-estimation QFI of a pure probe and are not represented.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pqfi {

/// Photon-number index n.
using Photons = std::int64_t;

/// Support of a pmf: [lo, hi] when bounded, [lo, inf) otherwise.
struct Support {
  Photons lo = 0;
  std::optional<Photons> hi;

  static Support bounded(Photons m, Photons M);
  static Support unbounded(Photons start = 0);

  bool is_bounded() const noexcept { return hi.has_value(); }
  bool contains(Photons n) const noexcept { return n >= lo && (!hi || n <= *hi); }
};

class DistributionSpec;

namespace family {

/// sqrt(1-a)|m> + sqrt(a)|M>.
struct MAndM {
  Photons m = 0;
  Photons M = 1;
  double a = 0.5;
};

/// Poissonian statistics with mean |alpha|^2.
struct Coherent {
  double alpha_sq = 0.0;
};

/// Squeezed vacuum with squeezing magnitude r; mean photon number sinh^2 r.
struct SqueezedVacuum {
  double r = 0.0;
};

/// Amplitudes 1/(n+1) on 0..M.
struct Ssw {
  Photons M = 100;
};

/// Amplitudes 1/(n+z) on 0..M.
struct Ss {
  Photons M = 100;
  double z = 1.0;
};

/// Amplitudes exp(-n/eta)/(n+z) on 0..inf.
struct Dowling {
  double z = 1.0;
  double eta = 10.0;
};

/// sqrt(1-a)|0> + sqrt(a)|pi>, with |pi> carrying no vacuum population.
struct SmallPeak {
  double a = 0.0;
  std::shared_ptr<const DistributionSpec> inner;
};

struct Geometric {
  double mu = 0.5;
};

struct NegativeBinomial {
  double mu = 0.5;
  double eta = 1.0;
};

struct Logarithmic {
  double mu = 0.5;
};

struct Borel {
  double mu = 0.5;
};

/// p(n) = n^-s / zeta(s), n >= 1.
struct Zeta {
  double s = 2.0;
};

}  // namespace family

/// A validated description of one photon-number distribution.
///
/// Construction checks every parameter range and throws
/// Error(InvalidParameter) or, for a small-peak inner state with vacuum
/// population, Error(VacuumOverlap). A constructed spec is always valid.
class DistributionSpec {
 public:
  using Family = std::variant<family::MAndM, family::Coherent, family::SqueezedVacuum,
                              family::Ssw, family::Ss, family::Dowling, family::SmallPeak,
                              family::Geometric, family::NegativeBinomial,
                              family::Logarithmic, family::Borel, family::Zeta>;

  explicit DistributionSpec(Family f);

  static DistributionSpec small_peak(double a, const DistributionSpec& inner);

  const Family& family() const noexcept { return family_; }

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&family_);
  }

  /// Short lowercase family name, e.g. "geometric".
  std::string_view name() const noexcept;

  /// Human-readable rendering with parameters, e.g. "geometric(mu=0.5)".
  std::string describe() const;

  /// The parameter a sweep over this family conventionally varies.
  double primary_parameter() const noexcept;

 private:
  Family family_;
};

/// Evaluable probability mass function.
///
/// Cheap to copy; the evaluator is shared and immutable.
class Pmf {
 public:
  double operator()(Photons n) const;

  const DistributionSpec& spec() const noexcept { return spec_; }
  const Support& support() const noexcept { return support_; }

  /// Points that can carry mass, when the support is sparse and finite.
  const std::optional<std::vector<Photons>>& atoms() const noexcept { return atoms_; }

 private:
  friend Pmf make_pmf(const DistributionSpec& spec);

  Pmf(DistributionSpec spec, Support support, std::function<double(Photons)> eval,
      std::optional<std::vector<Photons>> atoms);

  DistributionSpec spec_;
  Support support_;
  std::shared_ptr<const std::function<double(Photons)>> eval_;
  std::optional<std::vector<Photons>> atoms_;
};

Pmf make_pmf(const DistributionSpec& spec);

/// p(0) = 1-a, p(n) = a p_inner(n) for n >= 1. Throws VacuumOverlap when
/// the inner pmf has p(0) > 0.
Pmf compose_small_peak(double a, const DistributionSpec& inner);

enum class MomentStatus { Exact, Converged, Diverges, NotConverged };

std::string_view to_string(MomentStatus status) noexcept;

struct MomentResult {
  double mean = 0.0;
  double variance = 0.0;
  double second_moment = 0.0;
  MomentStatus status = MomentStatus::Exact;
  /// Relative size of the unsummed remainder; zero for exact results.
  double achieved_tail = 0.0;
  std::int64_t terms_used = 0;

  bool finite() const noexcept {
    return status == MomentStatus::Exact || status == MomentStatus::Converged;
  }
};

struct TruncationConfig {
  double tail_epsilon = 1e-14;
  std::int64_t max_terms = 10'000'000;
  /// Terms per divergence-detection window.
  std::int64_t divergence_window = 10'000;
  /// Minimum relative second-moment growth per window that counts as "still growing".
  double divergence_growth = 1e-3;
  /// Consecutive growing windows required before a numeric divergence verdict.
  int divergence_windows = 10;
  /// Let known analytic finiteness of the variance override numeric verdicts.
  bool use_analytic_flags = true;
};

/// Closed-form moments. Throws Unsupported for SSW, SS and Dowling.
MomentResult moments_closed_form(const DistributionSpec& spec);

/// Adaptive direct summation of p(n), n p(n), n^2 p(n). Never throws on slow
/// convergence; the outcome is reported through MomentResult::status.
MomentResult moments_by_summation(const Pmf& pmf, const TruncationConfig& cfg = {});

/// Whether the photon-number variance is known analytically to be finite.
/// nullopt when nothing is known.
std::optional<bool> analytic_variance_finite(const DistributionSpec& spec);

/// Second term of the negative-binomial variance written as N^2 + excess:
/// mu eta (1 - mu eta) / (1 - mu)^2. Positive exactly when mu eta < 1.
double negative_binomial_variance_excess(double mu, double eta);

/// Second term of the logarithmic variance written as N^2 + excess:
/// -mu (2 mu + ln(1-mu)) / ((1-mu)^2 ln^2(1-mu)).
double logarithmic_variance_excess(double mu);

}  // namespace pqfi
