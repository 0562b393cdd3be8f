#pragma once

// Quantum Fisher information of single-mode phase probes and the associated
// precision bounds. For a pure probe the QFI is four times the photon-number
// variance, so every function here is closed-form arithmetic.

#include <cstdint>
#include <optional>

#include "pqfi/dist.hpp"

namespace pqfi {

struct QfiReport {
  double qfi = 0.0;       ///< rad^-2; +inf when the variance diverges
  double variance = 0.0;  ///< photons^2
  double mean = 0.0;      ///< photons
  /// Cramer-Rao bound for nu repetitions; absent when the QFI is zero or infinite.
  std::optional<double> delta_phi;
  std::uint32_t nu = 1;
  bool finite = true;
};

/// H = 4 Var(n). Throws NotConvergedInput for unconverged moments.
QfiReport qfi_from_moments(const MomentResult& m, std::uint32_t nu = 1);

/// Coherent-state benchmark 4N.
double qfi_coherent(double N);

/// Squeezed vacuum 8(N^2 + N).
double qfi_squeezed(double N);

/// m&M state with weight a on |M>: 4a(1-a)(M-m)^2.
double qfi_mandm(double a, std::int64_t m, std::int64_t M);

/// m&M state with the weight fixed by the mean: 4(M-N)(N-m).
double qfi_mandm_fixed_n(std::int64_t m, std::int64_t M, double N);

/// Small-peak state: 4N(N_pi - N) + 4 var_pi N / N_pi with N = a N_pi.
double qfi_small_peak(double a, double N_pi, double var_pi);

/// Delta phi >= 1/sqrt(nu H). Refuses zero, negative and infinite QFI.
double crlb(double qfi, std::uint32_t nu = 1);

/// (M-m)^2 / 4.
double popoviciu_bound(std::int64_t m, std::int64_t M);

/// (M-N)(N-m); never exceeds popoviciu_bound(m, M).
double bhatia_davis_bound(std::int64_t m, std::int64_t M, double N);

}  // namespace pqfi
