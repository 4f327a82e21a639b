#pragma once

// Closed-form asymptotic key rates. The one-sided device-independent rate
// certifies Eve's information from the observed three-setting steering value
// alone; CHSH-based fully device-independent and device-dependent (trusted
// devices, same error correction) rates are included for comparison.

#include "steerkd/steering.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace steerkd {

inline constexpr double kChshMax = 2.8284271247461903;  // 2 sqrt(2)

inline double binary_entropy(double x) {
  if (x < 0.0 && x > -1e-12) x = 0.0;
  if (x > 1.0 && x < 1.0 + 1e-12) x = 1.0;
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("binary_entropy: argument outside [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

enum class RateVariant {
  OneSidedDi,        // checked steering value, ideal detection
  OneSidedDiPs,      // lossy Alice, post-selected key rounds
  OneSidedDiNonPs,   // lossy Alice, null outcomes mapped to -1
  DiChsh,            // CHSH-certified, both devices untrusted
  DeviceDependent,   // both devices trusted
};

inline std::string variant_name(RateVariant v) {
  switch (v) {
    case RateVariant::OneSidedDi: return "1sdi";
    case RateVariant::OneSidedDiPs: return "1sdi_ps";
    case RateVariant::OneSidedDiNonPs: return "1sdi_nonps";
    case RateVariant::DiChsh: return "di_chsh";
    case RateVariant::DeviceDependent: return "dd";
  }
  throw std::invalid_argument("variant_name: unknown variant");
}

inline RateVariant variant_from_name(const std::string& name) {
  if (name == "1sdi") return RateVariant::OneSidedDi;
  if (name == "1sdi_ps") return RateVariant::OneSidedDiPs;
  if (name == "1sdi_nonps") return RateVariant::OneSidedDiNonPs;
  if (name == "di_chsh") return RateVariant::DiChsh;
  if (name == "dd") return RateVariant::DeviceDependent;
  throw std::invalid_argument("variant_from_name: unknown variant '" + name + "'");
}

// Channel visibility nu and Alice-side detection efficiency eta_a.
struct NoiseParams {
  double nu = 1.0;
  double eta_a = 1.0;

  NoiseParams() = default;
  NoiseParams(double visibility, double efficiency) : nu(visibility), eta_a(efficiency) {
    if (!(nu >= 0.0 && nu <= 1.0))
      throw std::invalid_argument("NoiseParams: visibility outside [0, 1]");
    if (!(eta_a >= 0.0 && eta_a <= 1.0))
      throw std::invalid_argument("NoiseParams: detection efficiency outside [0, 1]");
  }
};

struct RateReport {
  RateVariant variant;
  double q;        // key-round error rate used for error correction
  double witness;  // F3 for steering variants, CHSH value for di_chsh, unused (0) for dd
  double i_ab;     // mutual information term
  double chi_e;    // Eve information term
  double rate;     // certified asymptotic key rate (can be negative)
};

// Squared Bell-diagonal anisotropy R^2 = (l1 - l2)^2 + (l3 - l4)^2, in
// [0, 1]. Controls the entropy bound; on the extremal two-weight families
// (l2 = l4 = 0 or l1 = l3 = 0) it also fixes the steering value via
// F3^2 = 4 R^2 - 1.
inline double r_squared(const BellDiagonalState& s) {
  const double a = s[0] - s[1], b = s[2] - s[3];
  return a * a + b * b;
}

// Upper bound on Eve's information against the key measurement of a
// Bell-diagonal state, chi = H(lambda) - h(l1 + l3), in terms of R^2 alone:
// chi <= h((1 + sqrt(2 R^2 - 1))/2) when R^2 > 1/2, else chi <= 1. Tight
// exactly on the two-weight families (l2 = l4 = 0 or l1 = l3 = 0).
inline double s_lambda_bound(double r2) {
  if (r2 < -1e-12 || r2 > 1.0 + 1e-9)
    throw std::invalid_argument("s_lambda_bound: R^2 outside [0, 1]");
  if (r2 <= 0.5) return 1.0;
  double arg = 2.0 * r2 - 1.0;
  if (arg > 1.0) arg = 1.0;
  return binary_entropy((1.0 + std::sqrt(arg)) / 2.0);
}

// Holevo bound for Eve against the key measurement on a Bell-diagonal state:
// chi <= H(lambda) - h(l1 + l3). For these states the bound is achieved, so
// the verification oracle expects equality.
inline double holevo_bell_diagonal_upper(const BellDiagonalState& s) {
  double h_lam = 0.0;
  for (int k = 0; k < 4; ++k)
    if (s[k] > 0.0) h_lam -= s[k] * std::log2(s[k]);
  return h_lam - binary_entropy(s[0] + s[2]);
}

// Eve's information certified by the observed steering value alone:
// chi(F3) = h((1 + sqrt((F3^2 - 1)/2)) / 2), clamped to 1 for F3 <= 1
// (no steering, no certification). Decreasing in F3, zero at sqrt(3).
inline double eve_info_from_f3(double f3) {
  if (f3 < 0.0) throw std::invalid_argument("eve_info_from_f3: F3 must be nonnegative");
  if (f3 > kSqrt3 + kSpectrumTol)
    throw std::domain_error("eve_info_from_f3: F3 above sqrt(3) is unphysical");
  if (f3 <= 1.0) return 1.0;
  double u = (f3 * f3 - 1.0) / 2.0;
  if (u > 1.0) u = 1.0;
  return binary_entropy((1.0 + std::sqrt(u)) / 2.0);
}

inline void check_qber(double q, const char* who) {
  if (!(q >= 0.0 && q <= 0.5))
    throw std::invalid_argument(std::string(who) + ": QBER outside [0, 0.5]");
}

// r = 1 - h(Q) - chi(F3): Devetak-Winter with one-way error correction and
// Eve's information bounded by the steering violation.
inline RateReport rate_1sdi(double q, double f3) {
  check_qber(q, "rate_1sdi");
  const double i_ab = 1.0 - binary_entropy(q);
  const double chi = eve_info_from_f3(f3);
  return RateReport{RateVariant::OneSidedDi, q, f3, i_ab, chi, i_ab - chi};
}

// Fully device-independent comparison: Eve bounded by the CHSH value b,
// chi = h((1 + sqrt((b/2)^2 - 1))/2), clamped to 1 without a violation.
inline RateReport rate_di_chsh(double q, double b) {
  check_qber(q, "rate_di_chsh");
  if (b < 0.0) throw std::invalid_argument("rate_di_chsh: CHSH value must be nonnegative");
  if (b > kChshMax + kSpectrumTol)
    throw std::domain_error("rate_di_chsh: CHSH value above 2 sqrt(2) is unphysical");
  const double i_ab = 1.0 - binary_entropy(q);
  double chi = 1.0;
  if (b > 2.0) {
    double u = (b / 2.0) * (b / 2.0) - 1.0;
    if (u > 1.0) u = 1.0;
    chi = binary_entropy((1.0 + std::sqrt(u)) / 2.0);
  }
  return RateReport{RateVariant::DiChsh, q, b, i_ab, chi, i_ab - chi};
}

// Device-dependent comparison at the same QBER: r = 1 - 2 h(Q).
inline RateReport rate_dd(double q) {
  check_qber(q, "rate_dd");
  const double h = binary_entropy(q);
  return RateReport{RateVariant::DeviceDependent, q, 0.0, 1.0 - h, h, 1.0 - 2.0 * h};
}

// Observable statistics for an isotropic (visibility nu) state with Alice
// detection efficiency eta_a, null outcomes recorded as -1 unless
// post-selected away. The steering value is always estimated without
// post-selection: F3 = eta_a * nu * sqrt(3).
struct WernerObservables {
  double q_nonps;  // key-round QBER with nulls mapped to -1: (1 - nu eta)/2
  double q_ps;     // key-round QBER on conclusive rounds only: (1 - nu)/2
  double f3;       // non-post-selected steering value
};

inline WernerObservables observables_from_werner(const NoiseParams& p) {
  return {(1.0 - p.nu * p.eta_a) / 2.0, (1.0 - p.nu) / 2.0, p.eta_a * p.nu * kSqrt3};
}

inline RateReport rate_1sdi_nonps(const NoiseParams& p) {
  const WernerObservables obs = observables_from_werner(p);
  const double i_ab = 1.0 - binary_entropy(obs.q_nonps);
  const double chi = eve_info_from_f3(obs.f3);
  return RateReport{RateVariant::OneSidedDiNonPs, obs.q_nonps, obs.f3, i_ab, chi, i_ab - chi};
}

// Post-selected variant: conclusive key rounds arrive at rate eta_a and carry
// the post-selected QBER, but Eve's term still uses the full-ensemble
// steering value (post-selecting the witness would open the detection
// loophole).
inline RateReport rate_1sdi_ps(const NoiseParams& p) {
  const WernerObservables obs = observables_from_werner(p);
  const double i_ab = 1.0 - binary_entropy(obs.q_ps);
  const double chi = eve_info_from_f3(obs.f3);
  return RateReport{RateVariant::OneSidedDiPs, obs.q_ps, obs.f3, i_ab, chi,
                    p.eta_a * i_ab - chi};
}

}  // namespace steerkd
