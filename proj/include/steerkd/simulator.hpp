#pragma once

// Round-by-round protocol simulator. Each round independently draws Alice's
// and Bob's settings, samples the ideal joint outcome from the Born
// distribution of the noisy state, then applies Alice's detector coin. The
// per-round generator is keyed by (seed, round index), so transcripts are
// reproducible and independent of analysis options: toggling post-selection
// re-interprets the same counts, it never changes them.

#include "steerkd/keyrates.hpp"
#include "steerkd/noise.hpp"
#include "steerkd/steering.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace steerkd {

// SplitMix64 (Steele, Lea, Flood): a counter can be mixed into a
// well-distributed 64-bit stream with a handful of multiplications.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t s) : state(s) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t round) {
  SplitMix64 m(round);
  return seed ^ m.next();
}

struct ProtocolConfig {
  std::uint64_t rounds = 100000;
  NoiseParams noise{};
  std::array<double, 3> alice_probs = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::array<double, 3> bob_probs = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  bool postselect = false;
  std::uint64_t seed = 42;
};

// One protocol round. Settings are 1-based; a_raw is +1, -1 or 0 for a null
// (no-click) outcome, a_mapped folds the null into -1.
struct RoundRecord {
  int x, y;
  int a_raw;
  int a_mapped;
  int b;
};

// Ideal two-outcome joint distribution for matched qubit observables.
struct OutcomePmf {
  double pp, pm, mp, mm;  // P(a, b) for (+,+), (+,-), (-,+), (-,-)
};

inline OutcomePmf born_pmf(const DensityMatrix& rho, const Observable& a_obs,
                           const Observable& b_obs) {
  BinaryPovm a = projective_povm(a_obs), b = projective_povm(b_obs);
  auto prob = [&rho](const Mat& ea, const Mat& eb) {
    Complex tr = (rho.mat() * tensor(ea, eb)).trace();
    return tr.real();
  };
  OutcomePmf p{prob(a.plus(), b.plus()), prob(a.plus(), b.minus()),
               prob(a.minus(), b.plus()), prob(a.minus(), b.minus())};
  for (double v : {p.pp, p.pm, p.mp, p.mm})
    if (v < -kPsdTol) throw std::runtime_error("born_pmf: negative probability");
  const double total = p.pp + p.pm + p.mp + p.mm;
  if (std::abs(total - 1.0) > 1e-9) throw std::runtime_error("born_pmf: pmf not normalized");
  return p;
}

// Draw one round given the ideal joint pmf for the selected settings. The
// generator must be keyed for this round; draw order is fixed (outcome, then
// detector coin) regardless of analysis options.
inline RoundRecord sample_round(const OutcomePmf& pmf, double eta, int x, int y,
                                SplitMix64& rng) {
  const double u = rng.uniform();
  int a, b;
  if (u < pmf.pp) {
    a = 1; b = 1;
  } else if (u < pmf.pp + pmf.pm) {
    a = 1; b = -1;
  } else if (u < pmf.pp + pmf.pm + pmf.mp) {
    a = -1; b = 1;
  } else {
    a = -1; b = -1;
  }
  const bool click = rng.uniform() < eta;
  const int a_raw = click ? a : 0;
  return RoundRecord{x, y, a_raw, a_raw == 0 ? -1 : a_raw, b};
}

struct SimStats {
  std::uint64_t n_rounds = 0;
  std::uint64_t n_conclusive = 0;      // rounds where Alice's detector clicked
  std::uint64_t n_key = 0;             // rounds with x = y = 3
  std::uint64_t n_key_conclusive = 0;  // key rounds that were conclusive
  double conclusive_fraction = 0.0;
  double key_fraction = 0.0;

  double q_hat = 0.0;        // empirical key-round error rate
  double q_stderr = 0.0;
  double f3_hat = 0.0;       // empirical steering value, never post-selected
  double f3_stderr = 0.0;
  double rate_hat = 0.0;     // closed-form rate evaluated at (q_hat, f3_hat)
  bool postselected = false;
  bool f3_clamped = false;   // f3_hat exceeded sqrt(3) and was clamped for the rate

  // matched-setting correlators <a b> over x = y = i rounds (mapped outcomes)
  std::array<double, 3> matched_correlators = {0.0, 0.0, 0.0};
  std::array<std::uint64_t, 3> matched_counts = {0, 0, 0};

  // counts[x-1][y-1][a][b]: a in {0: +1, 1: -1, 2: null}, b in {0: +1, 1: -1}
  std::uint64_t counts[3][3][3][2] = {};
};

struct EmpiricalRate {
  RateReport report;
  bool f3_clamped;
};

// Closed-form rate at the empirical operating point. For the post-selected
// variant the conclusive fraction stands in for the detection efficiency.
inline EmpiricalRate empirical_rate(const SimStats& s, RateVariant variant) {
  double f3 = s.f3_hat;
  bool clamped = false;
  if (f3 > kSqrt3) {
    clamped = f3 > kSqrt3 + 1e-12;  // roundoff at the algebraic max is not a fluctuation
    f3 = kSqrt3;
  }
  switch (variant) {
    case RateVariant::OneSidedDi:
    case RateVariant::OneSidedDiNonPs: {
      RateReport r = rate_1sdi(s.q_hat, f3);
      r.variant = variant;
      return {r, clamped};
    }
    case RateVariant::OneSidedDiPs: {
      const double i_ab = 1.0 - binary_entropy(s.q_hat);
      const double chi = eve_info_from_f3(f3);
      const double eta_hat = s.n_rounds > 0
                                 ? static_cast<double>(s.n_conclusive) /
                                       static_cast<double>(s.n_rounds)
                                 : 0.0;
      return {RateReport{variant, s.q_hat, f3, i_ab, chi, eta_hat * i_ab - chi}, clamped};
    }
    default:
      throw std::invalid_argument("empirical_rate: variant must be a 1sdi variant");
  }
}

namespace detail {

// smoothed binomial standard error: positive even at hat(p) in {0, 1}
inline double proportion_stderr(std::uint64_t successes, std::uint64_t n) {
  const double p = (static_cast<double>(successes) + 1.0) / (static_cast<double>(n) + 2.0);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace detail

inline SimStats run_protocol(const ProtocolConfig& cfg) {
  if (cfg.rounds == 0) throw std::invalid_argument("run_protocol: need at least one round");
  for (const auto& probs : {cfg.alice_probs, cfg.bob_probs}) {
    double sum = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw std::invalid_argument("run_protocol: negative setting probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("run_protocol: setting probabilities must sum to 1");
  }
  NoiseParams noise(cfg.noise.nu, cfg.noise.eta_a);  // re-validate

  const DensityMatrix rho = werner(noise.nu);
  const Observable alice_obs[3] = {Observable(pauli_x()), Observable(-pauli_y()),
                                   Observable(pauli_z())};
  const Observable bob_obs[3] = {Observable(pauli_x()), Observable(pauli_y()),
                                 Observable(pauli_z())};
  OutcomePmf pmf[3][3];
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) pmf[x][y] = born_pmf(rho, alice_obs[x], bob_obs[y]);

  const std::array<double, 2> acut = {cfg.alice_probs[0], cfg.alice_probs[0] + cfg.alice_probs[1]};
  const std::array<double, 2> bcut = {cfg.bob_probs[0], cfg.bob_probs[0] + cfg.bob_probs[1]};

  SimStats s;
  s.n_rounds = cfg.rounds;
  s.postselected = cfg.postselect;
  std::uint64_t key_err_nonps = 0, key_err_ps = 0;
  std::array<std::uint64_t, 3> matched_agree = {0, 0, 0};

  for (std::uint64_t k = 0; k < cfg.rounds; ++k) {
    SplitMix64 rng(mix_seed(cfg.seed, k));
    const double ux = rng.uniform(), uy = rng.uniform();
    const int x = ux < acut[0] ? 1 : (ux < acut[1] ? 2 : 3);
    const int y = uy < bcut[0] ? 1 : (uy < bcut[1] ? 2 : 3);
    const RoundRecord r = sample_round(pmf[x - 1][y - 1], noise.eta_a, x, y, rng);

    if (r.a_raw != 0) ++s.n_conclusive;
    s.counts[x - 1][y - 1][r.a_raw == 0 ? 2 : (r.a_raw == 1 ? 0 : 1)][r.b == 1 ? 0 : 1]++;
    if (x == y) {
      ++s.matched_counts[static_cast<size_t>(x - 1)];
      if (r.a_mapped == r.b) ++matched_agree[static_cast<size_t>(x - 1)];
    }
    if (x == 3 && y == 3) {
      ++s.n_key;
      if (r.a_mapped != r.b) ++key_err_nonps;
      if (r.a_raw != 0) {
        ++s.n_key_conclusive;
        if (r.a_raw != r.b) ++key_err_ps;
      }
    }
  }

  s.conclusive_fraction =
      static_cast<double>(s.n_conclusive) / static_cast<double>(s.n_rounds);
  s.key_fraction = static_cast<double>(s.n_key) / static_cast<double>(s.n_rounds);

  const std::uint64_t q_n = cfg.postselect ? s.n_key_conclusive : s.n_key;
  const std::uint64_t q_err = cfg.postselect ? key_err_ps : key_err_nonps;
  if (q_n < 2) throw std::runtime_error("run_protocol: fewer than 2 key rounds, cannot estimate");
  for (int i = 0; i < 3; ++i)
    if (s.matched_counts[static_cast<size_t>(i)] == 0)
      throw std::runtime_error("run_protocol: a matched setting pair was never sampled");

  s.q_hat = static_cast<double>(q_err) / static_cast<double>(q_n);
  s.q_stderr = detail::proportion_stderr(q_err, q_n);

  double corr_sum = 0.0, var_sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto n_i = s.matched_counts[static_cast<size_t>(i)];
    const auto k_i = matched_agree[static_cast<size_t>(i)];
    const double c =
        2.0 * static_cast<double>(k_i) / static_cast<double>(n_i) - 1.0;
    s.matched_correlators[static_cast<size_t>(i)] = c;
    corr_sum += c;
    const double se = detail::proportion_stderr(k_i, n_i);
    var_sum += 4.0 * se * se;  // var(c_i) = 4 var(hat p_i)
  }
  s.f3_hat = std::abs(corr_sum) / kSqrt3;
  s.f3_stderr = std::sqrt(var_sum) / kSqrt3;

  const EmpiricalRate er = empirical_rate(
      s, cfg.postselect ? RateVariant::OneSidedDiPs : RateVariant::OneSidedDiNonPs);
  s.rate_hat = er.report.rate;
  s.f3_clamped = er.f3_clamped;
  return s;
}

}  // namespace steerkd
