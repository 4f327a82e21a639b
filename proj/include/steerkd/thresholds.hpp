#pragma once

// Noise thresholds by bisection on the closed-form rates along the isotropic
// noise line, plus grid sweeps for plotting rate curves and threshold curves.

#include "steerkd/keyrates.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace steerkd {

inline constexpr double kBisectXTol = 1e-8;
inline constexpr double kBisectFTol = 1e-9;
inline constexpr int kBisectMaxIter = 200;

struct BisectionResult {
  double root;
  double lo, hi;   // final bracket
  int iterations;
  double residual;  // |f(root)|
};

// Plain bisection for a sign change of f on [lo, hi]. Converges when the
// bracket is narrower than xtol and |f| at the midpoint is below ftol.
inline BisectionResult bisect(const std::function<double(double)>& f, double lo, double hi,
                              double xtol = kBisectXTol, double ftol = kBisectFTol,
                              int max_iter = kBisectMaxIter) {
  if (!(lo < hi)) throw std::invalid_argument("bisect: need lo < hi");
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return {lo, lo, lo, 0, 0.0};
  if (fhi == 0.0) return {hi, hi, hi, 0, 0.0};
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::domain_error("bisect: no sign change over the bracket");
  int it = 0;
  double mid = 0.5 * (lo + hi), fmid = 0.0;
  while (it < max_iter) {
    mid = 0.5 * (lo + hi);
    fmid = f(mid);
    ++it;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
    if (hi - lo <= xtol && std::abs(fmid) <= ftol) break;
  }
  if (it >= max_iter && (hi - lo > xtol || std::abs(fmid) > ftol))
    throw std::runtime_error("bisect: did not converge");
  return {mid, lo, hi, it, std::abs(fmid)};
}

struct ThresholdResult {
  std::string variable;  // "q" or "eta"
  double critical;
  double bracket_lo, bracket_hi;
  int iterations;
  double residual;
};

// Key rate along the isotropic noise line Q = (1 - nu)/2, where the witness
// values are F3 = sqrt(3)(1 - 2Q) and B = 2 sqrt(2)(1 - 2Q).
inline double isotropic_line_rate(RateVariant variant, double q) {
  switch (variant) {
    case RateVariant::OneSidedDi:
      return rate_1sdi(q, kSqrt3 * (1.0 - 2.0 * q)).rate;
    case RateVariant::DiChsh:
      return rate_di_chsh(q, kChshMax * (1.0 - 2.0 * q)).rate;
    case RateVariant::DeviceDependent:
      return rate_dd(q).rate;
    default:
      throw std::invalid_argument(
          "isotropic_line_rate: variant must be 1sdi, di_chsh or dd");
  }
}

// Largest tolerable QBER for a variant on the isotropic line. The rate is
// strictly decreasing there, so the unique sign change is the threshold; a
// coarse scan below the root cross-checks positivity.
inline ThresholdResult critical_qber(RateVariant variant) {
  auto f = [variant](double q) { return isotropic_line_rate(variant, q); };
  BisectionResult b = bisect(f, 0.0, 0.5);
  for (int k = 1; k <= 8; ++k) {
    double q = b.root * static_cast<double>(k) / 9.0;
    if (f(q) <= 0.0)
      throw std::runtime_error("critical_qber: rate not positive below the root");
  }
  return {"q", b.root, b.lo, b.hi, b.iterations, b.residual};
}

// Minimal Alice detection efficiency with a positive rate at visibility nu,
// for the post-selected or non-post-selected strategy. Returns nullopt when
// even a perfect detector yields no key (the rate at eta = 1 is the 1sDI
// isotropic rate, positive only for nu above roughly 0.8275).
inline std::optional<ThresholdResult> critical_eta(double nu, RateVariant strategy) {
  if (!(nu >= 0.0 && nu <= 1.0))
    throw std::invalid_argument("critical_eta: visibility outside [0, 1]");
  std::function<double(double)> f;
  switch (strategy) {
    case RateVariant::OneSidedDiPs:
      f = [nu](double eta) { return rate_1sdi_ps(NoiseParams(nu, eta)).rate; };
      break;
    case RateVariant::OneSidedDiNonPs:
      f = [nu](double eta) { return rate_1sdi_nonps(NoiseParams(nu, eta)).rate; };
      break;
    default:
      throw std::invalid_argument("critical_eta: strategy must be 1sdi_ps or 1sdi_nonps");
  }
  if (f(1.0) <= 0.0) return std::nullopt;  // no key even with perfect detection
  // below 1/sqrt(3) the steering value cannot exceed 1, so no key there either
  const double lo = 1.0 / kSqrt3;
  BisectionResult b = bisect(f, lo, 1.0);
  return ThresholdResult{"eta", b.root, b.lo, b.hi, b.iterations, b.residual};
}

enum class SweepVariable { Q, Eta, Nu };

inline std::string sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::Q: return "q";
    case SweepVariable::Eta: return "eta";
    case SweepVariable::Nu: return "nu";
  }
  throw std::invalid_argument("sweep_variable_name: unknown variable");
}

// Inclusive grid start, start + step, ..., up to stop (degenerate
// start == stop gives a single point).
struct SweepSpec {
  SweepVariable variable = SweepVariable::Q;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;
  NoiseParams fixed;                   // held-constant parameters
  std::vector<RateVariant> variants;   // columns, in order
};

struct SweepRow {
  double value;
  std::vector<RateReport> reports;
};

inline std::vector<double> grid_points(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("sweep: step must be positive");
  if (start > stop) throw std::invalid_argument("sweep: start must be <= stop");
  const double n_exact = (stop - start) / step;
  if (n_exact > 2e6) throw std::invalid_argument("sweep: grid too large");
  const auto n = static_cast<long>(std::floor(n_exact + 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

inline std::vector<SweepRow> sweep(const SweepSpec& spec) {
  if (spec.variants.empty()) throw std::invalid_argument("sweep: no variants requested");
  const bool loss_sweep = spec.variable != SweepVariable::Q;
  for (RateVariant v : spec.variants) {
    const bool loss_variant =
        v == RateVariant::OneSidedDiPs || v == RateVariant::OneSidedDiNonPs;
    if (loss_sweep != loss_variant)
      throw std::invalid_argument(
          "sweep: variant '" + variant_name(v) + "' does not apply to a " +
          sweep_variable_name(spec.variable) + " sweep");
  }
  const double max_val = spec.variable == SweepVariable::Q ? 0.5 : 1.0;
  if (spec.start < 0.0 || spec.stop > max_val)
    throw std::invalid_argument("sweep: grid outside the variable's domain");

  std::vector<SweepRow> rows;
  for (double value : grid_points(spec.start, spec.stop, spec.step)) {
    SweepRow row{value, {}};
    for (RateVariant v : spec.variants) {
      switch (spec.variable) {
        case SweepVariable::Q: {
          RateReport r{v, value, 0.0, 0.0, 0.0, 0.0};
          switch (v) {
            case RateVariant::OneSidedDi:
              r = rate_1sdi(value, kSqrt3 * (1.0 - 2.0 * value));
              break;
            case RateVariant::DiChsh:
              r = rate_di_chsh(value, kChshMax * (1.0 - 2.0 * value));
              break;
            default:
              r = rate_dd(value);
              break;
          }
          row.reports.push_back(r);
          break;
        }
        case SweepVariable::Eta: {
          NoiseParams p(spec.fixed.nu, value);
          row.reports.push_back(v == RateVariant::OneSidedDiPs ? rate_1sdi_ps(p)
                                                               : rate_1sdi_nonps(p));
          break;
        }
        case SweepVariable::Nu: {
          NoiseParams p(value, spec.fixed.eta_a);
          row.reports.push_back(v == RateVariant::OneSidedDiPs ? rate_1sdi_ps(p)
                                                               : rate_1sdi_nonps(p));
          break;
        }
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct EtaThresholdRow {
  double nu;
  std::optional<double> eta_nonps;
  std::optional<double> eta_ps;
};

// Threshold detection efficiency as a function of visibility, both
// strategies; entries are empty where no efficiency suffices.
inline std::vector<EtaThresholdRow> critical_eta_sweep(double start, double stop, double step) {
  if (start < 0.0 || stop > 1.0)
    throw std::invalid_argument("critical_eta_sweep: visibility grid outside [0, 1]");
  std::vector<EtaThresholdRow> rows;
  for (double nu : grid_points(start, stop, step)) {
    EtaThresholdRow row{nu, std::nullopt, std::nullopt};
    if (auto r = critical_eta(nu, RateVariant::OneSidedDiNonPs)) row.eta_nonps = r->critical;
    if (auto r = critical_eta(nu, RateVariant::OneSidedDiPs)) row.eta_ps = r->critical;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace steerkd
