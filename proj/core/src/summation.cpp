// Adaptive summation of the first two moments of a pmf.
//
// Unbounded supports are summed term by term. The loop stops on the first of:
//  * a geometric remainder certificate: successive term ratios q (extrapolated
//    upward when they are still increasing) stay below 1 and bound the
//    remaining mass and second moment below tail_epsilon;
//  * a detected pure power-law tail p(n) ~ C n^-e, whose remainder is added via
//    Euler-Maclaurin (or declared divergent when e <= 3);
//  * the windowed growth heuristic for divergent second moments;
//  * max_terms.

#include <cmath>
#include <limits>

#include "pqfi/dist.hpp"
#include "pqfi/error.hpp"

namespace pqfi {

namespace {

struct Neumaier {
  long double sum = 0.0L;
  long double comp = 0.0L;

  void add(long double x) {
    const long double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  long double value() const { return sum + comp; }
};

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// sum_{j > K} j^-sigma for sigma > 1, Euler-Maclaurin through B_6.
long double power_tail(long double sigma, long double K) {
  const long double a = std::pow(K, -sigma);
  const long double s1 = sigma;
  const long double s3 = sigma * (sigma + 1) * (sigma + 2);
  const long double s5 = s3 * (sigma + 3) * (sigma + 4);
  return K * a / (sigma - 1) - a / 2 + s1 * a / (12 * K) - s3 * a / (720 * K * K * K) +
         s5 * a / (30240 * K * K * K * K * K);
}

// Local power-law exponent between two points: ln(p(a)/p(b)) / ln(b/a).
double local_exponent(double pa, double pb, Photons a, Photons b) {
  return std::log(pa / pb) / std::log(static_cast<double>(b) / static_cast<double>(a));
}

struct PowerLaw {
  double exponent;
};

// Detects p(n) = C n^-e on [n/4, n+1] to near machine precision.
std::optional<PowerLaw> detect_power_law(const Pmf& pmf, Photons n) {
  const Photons q = n / 4;
  const Photons h = n / 2;
  if (q < 16 || q < pmf.support().lo) return std::nullopt;
  const double pq = pmf(q);
  const double ph = pmf(h);
  const double pn = pmf(n);
  const double pn1 = pmf(n + 1);
  if (!(pq > 0.0 && ph > 0.0 && pn > 0.0 && pn1 > 0.0)) return std::nullopt;
  const double e_far = local_exponent(pq, ph, q, h);
  const double e_near = local_exponent(ph, pn, h, n);
  if (!(e_near > 0.0)) return std::nullopt;
  if (std::fabs(e_far - e_near) > 1e-9 * e_near) return std::nullopt;
  const double e_step = std::log(pn / pn1) / std::log1p(1.0 / static_cast<double>(n));
  if (std::fabs(e_step - e_near) > 1e-6 * e_near) return std::nullopt;
  return PowerLaw{e_near};
}

MomentResult finish(long double s0, long double s1, long double s2, MomentStatus status,
                    double tail, std::int64_t terms) {
  (void)s0;
  MomentResult r;
  r.mean = static_cast<double>(s1);
  r.second_moment = static_cast<double>(s2);
  r.variance = static_cast<double>(s2 - s1 * s1);
  if (r.variance < 0.0) r.variance = 0.0;
  r.status = status;
  r.achieved_tail = tail;
  r.terms_used = terms;
  return r;
}

MomentResult sum_finite(const Pmf& pmf) {
  std::vector<Photons> points;
  if (pmf.atoms()) {
    points = *pmf.atoms();
  } else {
    for (Photons n = pmf.support().lo; n <= *pmf.support().hi; ++n) points.push_back(n);
  }
  Neumaier s0, s1, s2;
  for (Photons n : points) {
    const long double p = pmf(n);
    const long double x = static_cast<long double>(n);
    s0.add(p);
    s1.add(x * p);
    s2.add(x * x * p);
  }
  const long double mean = s1.value();
  Neumaier central;
  for (Photons n : points) {
    const long double d = static_cast<long double>(n) - mean;
    central.add(d * d * pmf(n));
  }
  MomentResult r;
  r.mean = static_cast<double>(mean);
  r.second_moment = static_cast<double>(s2.value());
  r.variance = static_cast<double>(central.value());
  r.status = MomentStatus::Exact;
  r.terms_used = static_cast<std::int64_t>(points.size());
  return r;
}

void validate(const TruncationConfig& cfg) {
  if (!(cfg.tail_epsilon > 0.0 && cfg.tail_epsilon < 1.0)) {
    throw Error(Errc::InvalidParameter, "truncation: tail_epsilon must lie in (0,1)");
  }
  if (cfg.max_terms < 1 || cfg.divergence_window < 1 || cfg.divergence_windows < 1 ||
      !(cfg.divergence_growth > 0.0)) {
    throw Error(Errc::InvalidParameter, "truncation: invalid window or term limits");
  }
}

}  // namespace

MomentResult moments_by_summation(const Pmf& pmf, const TruncationConfig& cfg) {
  validate(cfg);
  if (pmf.support().is_bounded()) return sum_finite(pmf);

  const std::optional<bool> analytic =
      cfg.use_analytic_flags ? analytic_variance_finite(pmf.spec()) : std::nullopt;
  const bool known_infinite = analytic.has_value() && !analytic.value();
  const bool may_diverge = !analytic.has_value() || known_infinite;
  const double eps = cfg.tail_epsilon;

  Neumaier s0, s1, s2;

  // Previous non-zero term and its ratios to the one before.
  bool have_prev = false;
  Photons n_prev = 0;
  long double p_prev = 0, t_prev = 0;
  bool have_q = false;
  long double qp_prev = 0, qt_prev = 0;

  long double s2_window_start = 0;
  int growing_windows = 0;

  const Photons start = pmf.support().lo;
  std::int64_t terms = 0;
  for (Photons n = start; terms < cfg.max_terms; ++n) {
    ++terms;
    const long double p = pmf(n);
    const long double x = static_cast<long double>(n);
    const long double t = x * x * p;
    if (p > 0) {
      s0.add(p);
      s1.add(x * p);
      s2.add(t);

      if (have_prev && t_prev > 0) {
        const long double gap = static_cast<long double>(n - n_prev);
        const long double qp = p / p_prev;
        const long double qt = t / t_prev;
        if (have_q) {
          // Ratios approaching their limit like 1/n are extrapolated to it.
          const long double qp_up = qp + std::fmax(0.0L, qp - qp_prev) * x / gap;
          const long double qt_up = qt + std::fmax(0.0L, qt - qt_prev) * x / gap;
          if (qp_up < 1 && qt_up < 1) {
            const long double S2 = s2.value();
            const long double rem0 = p * qp_up / (1 - qp_up);
            const long double rem2 = t * qt_up / (1 - qt_up);
            if (rem0 <= eps && rem2 <= eps * S2 && t < eps * S2) {
              const double tail = static_cast<double>(std::fmax(rem0, rem2 / S2));
              return finish(s0.value(), s1.value(), S2, MomentStatus::Converged, tail, terms);
            }
          }
        }
        qp_prev = qp;
        qt_prev = qt;
        have_q = true;
      }
      have_prev = true;
      n_prev = n;
      p_prev = p;
      t_prev = t;
    }

    const bool pow2 = n >= 64 && (n & (n - 1)) == 0;
    const bool window_end = terms % cfg.divergence_window == 0;
    if (!(pow2 || window_end)) continue;

    if (const auto law = p > 0 ? detect_power_law(pmf, n) : std::nullopt) {
      const long double e = law->exponent;
      const long double amp = p * std::pow(x, e);
      const long double T0 = amp * power_tail(e, x);
      const long double T1 = e > 2 ? amp * power_tail(e - 1, x) : kInf;
      const long double T2 = e > 3 ? amp * power_tail(e - 2, x) : kInf;
      if (e > 3) {
        const long double S2 = s2.value() + T2;
        // First omitted Euler-Maclaurin term, relative.
        const long double s7 = (e - 2) * (e - 1) * e * (e + 1) * (e + 2) * (e + 3) * (e + 4);
        const double tail =
            static_cast<double>(amp * s7 * std::pow(x, -(e - 2) - 7) / 1209600 / S2);
        if (known_infinite) continue;
        return finish(s0.value() + T0, s1.value() + T1, S2, MomentStatus::Converged,
                      std::fabs(tail), terms);
      }
      if (may_diverge) {
        MomentResult r;
        r.mean = e > 2 ? static_cast<double>(s1.value() + T1) : kInf;
        r.variance = kInf;
        r.second_moment = kInf;
        r.status = MomentStatus::Diverges;
        r.terms_used = terms;
        return r;
      }
    }

    if (window_end) {
      const long double S2 = s2.value();
      const long double growth = S2 > 0 ? (S2 - s2_window_start) / S2 : 0;
      growing_windows = growth > cfg.divergence_growth ? growing_windows + 1 : 0;
      s2_window_start = S2;
      if (may_diverge && growing_windows >= cfg.divergence_windows) {
        // n^2 p(n) must also look non-summable: local exponent at most 1.
        const Photons h = n / 2;
        const double ph = pmf(h);
        if (ph > 0 && t > 0) {
          const double e_t = local_exponent(ph * double(h) * double(h),
                                            static_cast<double>(t), h, n);
          if (e_t <= 1.0) {
            MomentResult r;
            r.mean = kNaN;
            r.variance = kInf;
            r.second_moment = kInf;
            r.status = MomentStatus::Diverges;
            r.terms_used = terms;
            return r;
          }
        }
      }
    }
  }

  if (known_infinite) {
    MomentResult r;
    r.mean = kNaN;
    r.variance = kInf;
    r.second_moment = kInf;
    r.status = MomentStatus::Diverges;
    r.terms_used = terms;
    return r;
  }
  MomentResult r = finish(s0.value(), s1.value(), s2.value(), MomentStatus::NotConverged, kNaN,
                          terms);
  return r;
}

}  // namespace pqfi
