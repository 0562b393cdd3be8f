#include "pqfi/dist.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "pqfi/error.hpp"

namespace pqfi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::InvalidParameter, what);
}

bool finite(double x) { return std::isfinite(x); }

bool open_unit(double x) { return finite(x) && x > 0.0 && x < 1.0; }

bool closed_unit(double x) { return finite(x) && x >= 0.0 && x <= 1.0; }

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void validate(const DistributionSpec::Family& f) {
  std::visit(
      overloaded{
          [](const family::MAndM& d) {
            require(d.m >= 0, "m&M: m must be non-negative");
            require(d.m < d.M, "m&M: requires m < M");
            require(closed_unit(d.a), "m&M: weight a must lie in [0,1]");
          },
          [](const family::Coherent& d) {
            require(finite(d.alpha_sq) && d.alpha_sq >= 0.0, "coherent: |alpha|^2 must be >= 0");
          },
          [](const family::SqueezedVacuum& d) {
            require(finite(d.r) && d.r >= 0.0 && d.r < 300.0,
                    "squeezed: r must lie in [0, 300)");
          },
          [](const family::Ssw& d) { require(d.M >= 0, "ssw: M must be non-negative"); },
          [](const family::Ss& d) {
            require(d.M >= 0, "ss: M must be non-negative");
            require(finite(d.z) && d.z > 0.0, "ss: z must be positive");
          },
          [](const family::Dowling& d) {
            require(finite(d.z) && d.z > 0.0, "dowling: z must be positive");
            require(finite(d.eta) && d.eta > 0.0, "dowling: eta must be positive");
          },
          [](const family::SmallPeak& d) {
            require(closed_unit(d.a), "small peak: weight a must lie in [0,1]");
            require(d.inner != nullptr, "small peak: missing inner distribution");
            if (make_pmf(*d.inner)(0) > 0.0) {
              throw Error(Errc::VacuumOverlap,
                          "small peak: inner distribution " + d.inner->describe() +
                              " has vacuum population");
            }
          },
          [](const family::Geometric& d) {
            require(open_unit(d.mu), "geometric: mu must lie in (0,1)");
          },
          [](const family::NegativeBinomial& d) {
            require(open_unit(d.mu), "negative binomial: mu must lie in (0,1)");
            require(finite(d.eta) && d.eta > 0.0, "negative binomial: eta must be positive");
          },
          [](const family::Logarithmic& d) {
            require(open_unit(d.mu), "logarithmic: mu must lie in (0,1)");
          },
          [](const family::Borel& d) {
            require(finite(d.mu) && d.mu >= 0.0 && d.mu < 1.0, "borel: mu must lie in [0,1)");
          },
          [](const family::Zeta& d) {
            require(finite(d.s) && d.s > 1.0, "zeta: s must exceed 1");
          },
      },
      f);
}

// Normalisation by direct summation over 0..M of 1/(n+z)^2.
double inverse_square_norm(Photons M, double z) {
  long double sum = 0.0L;
  for (Photons n = M; n >= 0; --n) {  // small terms first
    const long double d = static_cast<long double>(n) + z;
    sum += 1.0L / (d * d);
  }
  return static_cast<double>(sum);
}

// Sum of exp(-2n/eta)/(n+z)^2 over n >= 0. Consecutive term ratios are below
// q = exp(-2/eta) < 1, so the remainder after term t is at most t q/(1-q).
double dowling_norm(double z, double eta) {
  const long double q = std::exp(-2.0L / eta);
  long double sum = 0.0L;
  long double comp = 0.0L;
  for (Photons n = 0;; ++n) {
    const long double d = static_cast<long double>(n) + z;
    const long double t = std::exp(-2.0L * n / eta) / (d * d);
    const long double y = t - comp;
    const long double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    if (t * q / (1.0L - q) < 1e-19L * sum) break;
  }
  return static_cast<double>(sum);
}

}  // namespace

Support Support::bounded(Photons m, Photons M) {
  require(m >= 0 && m <= M, "support: requires 0 <= m <= M");
  return Support{m, M};
}

Support Support::unbounded(Photons start) {
  require(start >= 0, "support: start must be non-negative");
  return Support{start, std::nullopt};
}

DistributionSpec::DistributionSpec(Family f) : family_(std::move(f)) { validate(family_); }

DistributionSpec DistributionSpec::small_peak(double a, const DistributionSpec& inner) {
  return DistributionSpec(family::SmallPeak{a, std::make_shared<const DistributionSpec>(inner)});
}

std::string_view DistributionSpec::name() const noexcept {
  return std::visit(overloaded{
                        [](const family::MAndM&) { return std::string_view("mandm"); },
                        [](const family::Coherent&) { return std::string_view("coherent"); },
                        [](const family::SqueezedVacuum&) { return std::string_view("squeezed"); },
                        [](const family::Ssw&) { return std::string_view("ssw"); },
                        [](const family::Ss&) { return std::string_view("ss"); },
                        [](const family::Dowling&) { return std::string_view("dowling"); },
                        [](const family::SmallPeak&) { return std::string_view("smallpeak"); },
                        [](const family::Geometric&) { return std::string_view("geometric"); },
                        [](const family::NegativeBinomial&) { return std::string_view("negbin"); },
                        [](const family::Logarithmic&) { return std::string_view("logarithmic"); },
                        [](const family::Borel&) { return std::string_view("borel"); },
                        [](const family::Zeta&) { return std::string_view("zeta"); },
                    },
                    family_);
}

std::string DistributionSpec::describe() const {
  const std::string head(name());
  return std::visit(
      overloaded{
          [&](const family::MAndM& d) {
            return head + "(m=" + std::to_string(d.m) + ",M=" + std::to_string(d.M) +
                   ",a=" + num(d.a) + ")";
          },
          [&](const family::Coherent& d) { return head + "(n=" + num(d.alpha_sq) + ")"; },
          [&](const family::SqueezedVacuum& d) { return head + "(r=" + num(d.r) + ")"; },
          [&](const family::Ssw& d) { return head + "(M=" + std::to_string(d.M) + ")"; },
          [&](const family::Ss& d) {
            return head + "(M=" + std::to_string(d.M) + ",z=" + num(d.z) + ")";
          },
          [&](const family::Dowling& d) {
            return head + "(z=" + num(d.z) + ",eta=" + num(d.eta) + ")";
          },
          [&](const family::SmallPeak& d) {
            return head + "(a=" + num(d.a) + ",inner=" + d.inner->describe() + ")";
          },
          [&](const family::Geometric& d) { return head + "(mu=" + num(d.mu) + ")"; },
          [&](const family::NegativeBinomial& d) {
            return head + "(mu=" + num(d.mu) + ",eta=" + num(d.eta) + ")";
          },
          [&](const family::Logarithmic& d) { return head + "(mu=" + num(d.mu) + ")"; },
          [&](const family::Borel& d) { return head + "(mu=" + num(d.mu) + ")"; },
          [&](const family::Zeta& d) { return head + "(s=" + num(d.s) + ")"; },
      },
      family_);
}

double DistributionSpec::primary_parameter() const noexcept {
  return std::visit(overloaded{
                        [](const family::MAndM& d) { return static_cast<double>(d.M); },
                        [](const family::Coherent& d) { return d.alpha_sq; },
                        [](const family::SqueezedVacuum& d) { return d.r; },
                        [](const family::Ssw& d) { return static_cast<double>(d.M); },
                        [](const family::Ss& d) { return static_cast<double>(d.M); },
                        [](const family::Dowling& d) { return d.eta; },
                        [](const family::SmallPeak& d) { return d.a; },
                        [](const family::Geometric& d) { return d.mu; },
                        [](const family::NegativeBinomial& d) { return d.mu; },
                        [](const family::Logarithmic& d) { return d.mu; },
                        [](const family::Borel& d) { return d.mu; },
                        [](const family::Zeta& d) { return d.s; },
                    },
                    family_);
}

Pmf::Pmf(DistributionSpec spec, Support support, std::function<double(Photons)> eval,
         std::optional<std::vector<Photons>> atoms)
    : spec_(std::move(spec)),
      support_(support),
      eval_(std::make_shared<const std::function<double(Photons)>>(std::move(eval))),
      atoms_(std::move(atoms)) {}

double Pmf::operator()(Photons n) const {
  if (!support_.contains(n)) return 0.0;
  return (*eval_)(n);
}

Pmf make_pmf(const DistributionSpec& spec) {
  using Eval = std::function<double(Photons)>;
  using Atoms = std::optional<std::vector<Photons>>;

  auto point_mass = [&](Photons at) {
    return Pmf(spec, Support::bounded(at, at), [](Photons) { return 1.0; },
               std::vector<Photons>{at});
  };

  return std::visit(
      overloaded{
          [&](const family::MAndM& d) {
            const Eval f = [m = d.m, a = d.a](Photons n) { return n == m ? 1.0 - a : a; };
            const auto inside = [m = d.m, M = d.M, f](Photons n) {
              return (n == m || n == M) ? f(n) : 0.0;
            };
            return Pmf(spec, Support::bounded(d.m, d.M), inside, std::vector<Photons>{d.m, d.M});
          },
          [&](const family::Coherent& d) {
            if (d.alpha_sq == 0.0) return point_mass(0);
            const double lam = d.alpha_sq;
            const double log_lam = std::log(lam);
            return Pmf(
                spec, Support::unbounded(0),
                [lam, log_lam](Photons n) {
                  const double x = static_cast<double>(n);
                  return std::exp(x * log_lam - lam - std::lgamma(x + 1.0));
                },
                Atoms{});
          },
          [&](const family::SqueezedVacuum& d) {
            if (d.r == 0.0) return point_mass(0);
            // p(2k) = tanh^{2k} r (2k)! / (4^k (k!)^2 cosh r), in log form.
            const double log_t2 = 2.0 * std::log(std::tanh(d.r));
            const double log_cosh = std::log(std::cosh(d.r));
            return Pmf(
                spec, Support::unbounded(0),
                [log_t2, log_cosh](Photons n) {
                  if (n % 2 != 0) return 0.0;
                  const double k = static_cast<double>(n / 2);
                  return std::exp(k * log_t2 + std::lgamma(2.0 * k + 1.0) -
                                  2.0 * k * std::log(2.0) - 2.0 * std::lgamma(k + 1.0) -
                                  log_cosh);
                },
                Atoms{});
          },
          [&](const family::Ssw& d) {
            const double norm = inverse_square_norm(d.M, 1.0);
            return Pmf(
                spec, Support::bounded(0, d.M),
                [norm](Photons n) {
                  const double x = static_cast<double>(n) + 1.0;
                  return 1.0 / (x * x * norm);
                },
                Atoms{});
          },
          [&](const family::Ss& d) {
            const double norm = inverse_square_norm(d.M, d.z);
            return Pmf(
                spec, Support::bounded(0, d.M),
                [norm, z = d.z](Photons n) {
                  const double x = static_cast<double>(n) + z;
                  return 1.0 / (x * x * norm);
                },
                Atoms{});
          },
          [&](const family::Dowling& d) {
            const double norm = dowling_norm(d.z, d.eta);
            return Pmf(
                spec, Support::unbounded(0),
                [norm, z = d.z, eta = d.eta](Photons n) {
                  const double x = static_cast<double>(n);
                  const double amp = std::exp(-x / eta) / (x + z);
                  return amp * amp / norm;
                },
                Atoms{});
          },
          [&](const family::SmallPeak& d) {
            const Pmf inner = make_pmf(*d.inner);
            if (d.a == 0.0) return point_mass(0);
            Support support = inner.support();
            support.lo = 0;
            Atoms atoms;
            if (inner.atoms()) {
              std::vector<Photons> pts{0};
              for (Photons n : *inner.atoms()) {
                if (n != 0) pts.push_back(n);
              }
              atoms = std::move(pts);
            }
            return Pmf(
                spec, support,
                [inner, a = d.a](Photons n) { return n == 0 ? 1.0 - a : a * inner(n); },
                std::move(atoms));
          },
          [&](const family::Geometric& d) {
            const double log_q = std::log1p(-d.mu);
            return Pmf(
                spec, Support::unbounded(0),
                [mu = d.mu, log_q](Photons n) {
                  return mu * std::exp(static_cast<double>(n) * log_q);
                },
                Atoms{});
          },
          [&](const family::NegativeBinomial& d) {
            const double log_mu = std::log(d.mu);
            const double base = d.eta * std::log1p(-d.mu) - std::lgamma(d.eta);
            return Pmf(
                spec, Support::unbounded(0),
                [eta = d.eta, log_mu, base](Photons n) {
                  const double x = static_cast<double>(n);
                  return std::exp(std::lgamma(x + eta) - std::lgamma(x + 1.0) + x * log_mu + base);
                },
                Atoms{});
          },
          [&](const family::Logarithmic& d) {
            const double c = -1.0 / std::log1p(-d.mu);
            const double log_mu = std::log(d.mu);
            return Pmf(
                spec, Support::unbounded(1),
                [c, log_mu](Photons n) {
                  const double x = static_cast<double>(n);
                  return c * std::exp(x * log_mu) / x;
                },
                Atoms{});
          },
          [&](const family::Borel& d) {
            if (d.mu == 0.0) return point_mass(1);
            const double log_mu = std::log(d.mu);
            return Pmf(
                spec, Support::unbounded(1),
                [mu = d.mu, log_mu](Photons n) {
                  const double x = static_cast<double>(n);
                  return std::exp(-mu * x + (x - 1.0) * (log_mu + std::log(x)) -
                                  std::lgamma(x + 1.0));
                },
                Atoms{});
          },
          [&](const family::Zeta& d) {
            const double norm = std::riemann_zeta(d.s);
            return Pmf(
                spec, Support::unbounded(1),
                [s = d.s, norm](Photons n) {
                  return std::pow(static_cast<double>(n), -s) / norm;
                },
                Atoms{});
          },
      },
      spec.family());
}

Pmf compose_small_peak(double a, const DistributionSpec& inner) {
  return make_pmf(DistributionSpec::small_peak(a, inner));
}

std::string_view to_string(MomentStatus status) noexcept {
  switch (status) {
    case MomentStatus::Exact: return "exact";
    case MomentStatus::Converged: return "converged";
    case MomentStatus::Diverges: return "diverges";
    case MomentStatus::NotConverged: return "not_converged";
  }
  return "unknown";
}

double negative_binomial_variance_excess(double mu, double eta) {
  require(open_unit(mu) && finite(eta) && eta > 0.0, "negative binomial: invalid (mu, eta)");
  const double om = 1.0 - mu;
  return mu * eta * (1.0 - mu * eta) / (om * om);
}

double logarithmic_variance_excess(double mu) {
  require(open_unit(mu), "logarithmic: mu must lie in (0,1)");
  const double L = std::log1p(-mu);
  const double om = 1.0 - mu;
  return -mu * (2.0 * mu + L) / (om * om * L * L);
}

std::optional<bool> analytic_variance_finite(const DistributionSpec& spec) {
  if (const auto* z = spec.get_if<family::Zeta>()) return z->s > 3.0;
  if (const auto* sp = spec.get_if<family::SmallPeak>()) {
    if (sp->a == 0.0) return true;
    return analytic_variance_finite(*sp->inner);
  }
  // Every other family has bounded support or an exponentially decaying tail.
  return true;
}

namespace {

MomentResult exact(double mean, double variance) {
  MomentResult r;
  r.mean = mean;
  r.variance = variance;
  r.second_moment = variance + mean * mean;
  r.status = MomentStatus::Exact;
  return r;
}

MomentResult diverging(double mean) {
  MomentResult r;
  r.mean = mean;
  r.variance = std::numeric_limits<double>::infinity();
  r.second_moment = std::numeric_limits<double>::infinity();
  r.status = MomentStatus::Diverges;
  return r;
}

}  // namespace

MomentResult moments_closed_form(const DistributionSpec& spec) {
  return std::visit(
      overloaded{
          [](const family::MAndM& d) {
            const double span = static_cast<double>(d.M - d.m);
            return exact((1.0 - d.a) * static_cast<double>(d.m) + d.a * static_cast<double>(d.M),
                         d.a * (1.0 - d.a) * span * span);
          },
          [](const family::Coherent& d) { return exact(d.alpha_sq, d.alpha_sq); },
          [](const family::SqueezedVacuum& d) {
            const double sh = std::sinh(d.r);
            const double N = sh * sh;
            return exact(N, 2.0 * (N * N + N));
          },
          [](const family::Ssw&) -> MomentResult {
            throw Error(Errc::Unsupported, "ssw: no closed-form moments");
          },
          [](const family::Ss&) -> MomentResult {
            throw Error(Errc::Unsupported, "ss: no closed-form moments");
          },
          [](const family::Dowling&) -> MomentResult {
            throw Error(Errc::Unsupported, "dowling: no closed-form moments");
          },
          [](const family::SmallPeak& d) {
            if (d.a == 0.0) return exact(0.0, 0.0);
            const MomentResult in = moments_closed_form(*d.inner);
            const double mean = d.a * in.mean;
            if (in.status == MomentStatus::Diverges) return diverging(mean);
            // a E_pi[n^2] - (a N_pi)^2
            return exact(mean, d.a * in.variance + d.a * (1.0 - d.a) * in.mean * in.mean);
          },
          [](const family::Geometric& d) {
            const double N = (1.0 - d.mu) / d.mu;
            return exact(N, N * N + N);
          },
          [](const family::NegativeBinomial& d) {
            const double N = d.mu * d.eta / (1.0 - d.mu);
            return exact(N, N * N + negative_binomial_variance_excess(d.mu, d.eta));
          },
          [](const family::Logarithmic& d) {
            const double N = -d.mu / ((1.0 - d.mu) * std::log1p(-d.mu));
            return exact(N, N * N + logarithmic_variance_excess(d.mu));
          },
          [](const family::Borel& d) {
            const double om = 1.0 - d.mu;
            return exact(1.0 / om, d.mu / (om * om * om));
          },
          [](const family::Zeta& d) {
            const double inf = std::numeric_limits<double>::infinity();
            const double zs = std::riemann_zeta(d.s);
            const double mean = d.s > 2.0 ? std::riemann_zeta(d.s - 1.0) / zs : inf;
            if (d.s <= 3.0) return diverging(mean);
            return exact(mean, std::riemann_zeta(d.s - 2.0) / zs - mean * mean);
          },
      },
      spec.family());
}

}  // namespace pqfi
