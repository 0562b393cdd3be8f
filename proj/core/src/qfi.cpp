#include "pqfi/qfi.hpp"

#include <cmath>
#include <limits>

#include "pqfi/error.hpp"

namespace pqfi {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::InvalidParameter, what);
}

void require_mean(double N) { require(std::isfinite(N) && N >= 0.0, "mean photon number must be finite and >= 0"); }

}  // namespace

QfiReport qfi_from_moments(const MomentResult& m, std::uint32_t nu) {
  require(nu >= 1, "nu must be >= 1");
  if (m.status == MomentStatus::NotConverged) {
    throw Error(Errc::NotConvergedInput, "moments did not converge");
  }
  QfiReport r;
  r.mean = m.mean;
  r.nu = nu;
  if (m.status == MomentStatus::Diverges) {
    r.variance = std::numeric_limits<double>::infinity();
    r.qfi = std::numeric_limits<double>::infinity();
    r.finite = false;
    return r;
  }
  r.variance = m.variance;
  r.qfi = 4.0 * m.variance;
  if (r.qfi > 0.0) r.delta_phi = crlb(r.qfi, nu);
  return r;
}

double qfi_coherent(double N) {
  require_mean(N);
  return 4.0 * N;
}

double qfi_squeezed(double N) {
  require_mean(N);
  return 8.0 * (N * N + N);
}

double qfi_mandm(double a, std::int64_t m, std::int64_t M) {
  require(std::isfinite(a) && a >= 0.0 && a <= 1.0, "m&M: weight a must lie in [0,1]");
  require(m >= 0 && m < M, "m&M: requires 0 <= m < M");
  const double span = static_cast<double>(M - m);
  return 4.0 * a * (1.0 - a) * span * span;
}

double qfi_mandm_fixed_n(std::int64_t m, std::int64_t M, double N) {
  require(m >= 0 && m < M, "m&M: requires 0 <= m < M");
  require(std::isfinite(N) && N >= static_cast<double>(m) && N <= static_cast<double>(M),
          "m&M: mean must lie in [m, M]");
  return 4.0 * bhatia_davis_bound(m, M, N);
}

double qfi_small_peak(double a, double N_pi, double var_pi) {
  require(std::isfinite(a) && a >= 0.0 && a <= 1.0, "small peak: weight a must lie in [0,1]");
  require(std::isfinite(N_pi) && N_pi > 0.0, "small peak: inner mean must be positive");
  require(std::isfinite(var_pi) && var_pi >= 0.0, "small peak: inner variance must be >= 0");
  const double N = a * N_pi;
  return 4.0 * N * (N_pi - N) + 4.0 * var_pi * N / N_pi;
}

double crlb(double qfi, std::uint32_t nu) {
  require(nu >= 1, "nu must be >= 1");
  if (std::isinf(qfi)) throw Error(Errc::InfiniteQfi, "infinite QFI has no finite Cramer-Rao bound");
  if (!(qfi > 0.0)) throw Error(Errc::NonPositiveQfi, "QFI must be positive");
  return 1.0 / std::sqrt(static_cast<double>(nu) * qfi);
}

double popoviciu_bound(std::int64_t m, std::int64_t M) {
  require(m <= M, "popoviciu: requires m <= M");
  const double span = static_cast<double>(M - m);
  return span * span / 4.0;
}

double bhatia_davis_bound(std::int64_t m, std::int64_t M, double N) {
  require(m <= M, "bhatia-davis: requires m <= M");
  require(std::isfinite(N) && N >= static_cast<double>(m) && N <= static_cast<double>(M),
          "bhatia-davis: mean must lie in [m, M]");
  return (static_cast<double>(M) - N) * (N - static_cast<double>(m));
}

}  // namespace pqfi
