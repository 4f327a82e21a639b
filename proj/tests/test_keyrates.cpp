#include "steerkd/keyrates.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace steerkd;
using Catch::Approx;

// Reference values below were computed independently with 30-digit arbitrary
// precision arithmetic and are frozen here; the implementation must reproduce
// them, not the other way around.

TEST_CASE("binary entropy reference points and domain") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == Approx(1.0).margin(1e-15));
  CHECK(binary_entropy(0.05) == Approx(0.286396957115956).margin(1e-12));
  CHECK(binary_entropy(0.1) == Approx(0.468995593589281).margin(1e-12));
  CHECK(binary_entropy(0.11) == Approx(0.499915958164528).margin(1e-12));
  CHECK(binary_entropy(0.3) == binary_entropy(0.7));  // symmetry
  CHECK_THROWS_AS(binary_entropy(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(binary_entropy(1.01), std::invalid_argument);
  CHECK_NOTHROW(binary_entropy(1.0 + 1e-13));  // roundoff slack
}

TEST_CASE("variant names round-trip") {
  for (RateVariant v : {RateVariant::OneSidedDi, RateVariant::OneSidedDiPs,
                        RateVariant::OneSidedDiNonPs, RateVariant::DiChsh,
                        RateVariant::DeviceDependent})
    CHECK(variant_from_name(variant_name(v)) == v);
  CHECK_THROWS_AS(variant_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("noise parameter validation") {
  CHECK_NOTHROW(NoiseParams(0.0, 0.0));
  CHECK_NOTHROW(NoiseParams(1.0, 1.0));
  CHECK_THROWS_AS(NoiseParams(1.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseParams(0.9, -0.1), std::invalid_argument);
}

TEST_CASE("eve information from the steering value") {
  CHECK(eve_info_from_f3(kSqrt3) == Approx(0.0).margin(1e-12));
  CHECK(eve_info_from_f3(1.0) == 1.0);
  CHECK(eve_info_from_f3(0.3) == 1.0);  // no violation, no certification
  CHECK(eve_info_from_f3(1.5588) == Approx(0.392352620149518).margin(1e-12));
  CHECK(eve_info_from_f3(kSqrt3 * 0.9) == Approx(0.392277195272111).margin(1e-12));
  CHECK(eve_info_from_f3(1.4334) == Approx(0.576106753572610).margin(1e-12));
  CHECK(eve_info_from_f3(1.05) == Approx(0.962708505145747).margin(1e-12));
  CHECK(eve_info_from_f3(1.2) == Approx(0.834902526882937).margin(1e-12));
  CHECK(eve_info_from_f3(1.6) == Approx(0.321108456074705).margin(1e-12));
  CHECK(eve_info_from_f3(1.7) == Approx(0.105932546155716).margin(1e-12));

  CHECK_THROWS_AS(eve_info_from_f3(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(eve_info_from_f3(1.8), std::domain_error);
  CHECK_NOTHROW(eve_info_from_f3(kSqrt3 + 1e-10));  // roundoff above the max

  // strictly decreasing on the certification interval
  double prev = 1.0 + 1e-12;
  for (double f3 = 1.01; f3 <= kSqrt3; f3 += 0.01) {
    const double v = eve_info_from_f3(f3);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("one-sided device-independent rate") {
  CHECK(rate_1sdi(0.0, kSqrt3).rate == Approx(1.0).margin(1e-12));
  CHECK(rate_1sdi(0.05, 1.5588).rate == Approx(0.321250422734526).margin(1e-12));
  CHECK(rate_1sdi(0.05, kSqrt3 * 0.9).rate == Approx(0.321325847611933).margin(1e-12));
  // no violation: rate cannot be positive
  CHECK(rate_1sdi(0.0, 1.0).rate == Approx(0.0).margin(1e-12));
  CHECK(rate_1sdi(0.1, 0.5).rate < 0.0);
  CHECK_THROWS_AS(rate_1sdi(0.6, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(rate_1sdi(0.05, 1.9), std::domain_error);

  const RateReport rep = rate_1sdi(0.03, 1.5);
  CHECK(rep.rate == Approx(rep.i_ab - rep.chi_e).margin(1e-12));
  CHECK(rep.i_ab == Approx(1.0 - binary_entropy(0.03)).margin(1e-12));
}

TEST_CASE("chsh-certified device-independent rate") {
  CHECK(rate_di_chsh(0.0, kChshMax).rate == Approx(1.0).margin(1e-12));
  CHECK(rate_di_chsh(0.05, kChshMax * 0.9).rate ==
        Approx(0.224950489999666).margin(1e-12));
  // at or below the local bound the Eve term saturates
  CHECK(rate_di_chsh(0.05, 2.0).chi_e == 1.0);
  CHECK(rate_di_chsh(0.05, 1.2).chi_e == 1.0);
  CHECK_THROWS_AS(rate_di_chsh(0.05, 3.0), std::domain_error);
  CHECK_THROWS_AS(rate_di_chsh(-0.1, 2.5), std::invalid_argument);
}

TEST_CASE("device-dependent rate") {
  CHECK(rate_dd(0.0).rate == Approx(1.0).margin(1e-12));
  CHECK(rate_dd(0.05).rate == Approx(0.427206085768088).margin(1e-12));
  // the ~11% threshold: tiny but positive at 0.11, negative just above
  CHECK(rate_dd(0.11).rate == Approx(1.68084e-4).margin(1e-9));
  CHECK(rate_dd(0.111).rate < 0.0);
}

TEST_CASE("isotropic-line rates are ordered dd >= 1sdi >= di_chsh") {
  for (double q = 0.0; q <= 0.07 + 1e-12; q += 0.001) {
    const double r_dd = rate_dd(q).rate;
    const double r_1sdi = rate_1sdi(q, kSqrt3 * (1.0 - 2.0 * q)).rate;
    const double r_di = rate_di_chsh(q, kChshMax * (1.0 - 2.0 * q)).rate;
    CHECK(r_dd >= r_1sdi - 1e-12);
    CHECK(r_1sdi >= r_di - 1e-12);
  }
}

TEST_CASE("published operating points near the thresholds") {
  // the 1sdi threshold is at 8.6237...%: slightly positive below, negative above
  CHECK(rate_1sdi(0.0862, kSqrt3 * (1.0 - 2.0 * 0.0862)).rate ==
        Approx(2.95478e-4).margin(1e-8));
  CHECK(rate_1sdi(0.087, kSqrt3 * (1.0 - 2.0 * 0.087)).rate < 0.0);
  // the di threshold is at 7.1492...%: the 2-significant-figure value 0.071
  // still sits below it
  CHECK(std::abs(rate_di_chsh(0.071, kChshMax * (1.0 - 2.0 * 0.071)).rate) < 6e-3);
  CHECK(rate_di_chsh(0.072, kChshMax * (1.0 - 2.0 * 0.072)).rate < 0.0);
}

TEST_CASE("bell-diagonal helpers: anisotropy and entropy bound") {
  CHECK(r_squared(BellDiagonalState({1.0, 0.0, 0.0, 0.0})) == Approx(1.0));
  CHECK(r_squared(BellDiagonalState({0.25, 0.25, 0.25, 0.25})) == Approx(0.0));
  CHECK(r_squared(BellDiagonalState({0.7, 0.1, 0.15, 0.05})) ==
        Approx(0.36 + 0.01).margin(1e-15));

  CHECK(s_lambda_bound(1.0) == Approx(0.0).margin(1e-12));
  CHECK(s_lambda_bound(0.5) == 1.0);
  CHECK(s_lambda_bound(0.2) == 1.0);
  // continuous at the branch point
  CHECK(s_lambda_bound(0.5 + 1e-12) == Approx(1.0).margin(1e-5));
  CHECK_THROWS_AS(s_lambda_bound(1.2), std::invalid_argument);
  CHECK_THROWS_AS(s_lambda_bound(-0.1), std::invalid_argument);
}

TEST_CASE("holevo bound for Bell-diagonal states") {
  CHECK(holevo_bell_diagonal_upper(BellDiagonalState({1.0, 0.0, 0.0, 0.0})) ==
        Approx(0.0).margin(1e-12));
  CHECK(holevo_bell_diagonal_upper(BellDiagonalState({0.25, 0.25, 0.25, 0.25})) ==
        Approx(1.0).margin(1e-12));
  // l1 = l3 = 1/2: H = 1, h(l1 + l3) = h(1) = 0
  CHECK(holevo_bell_diagonal_upper(BellDiagonalState({0.5, 0.0, 0.5, 0.0})) ==
        Approx(1.0).margin(1e-12));
  // two-weight family: chi = h(l1)
  CHECK(holevo_bell_diagonal_upper(BellDiagonalState({0.9, 0.0, 0.1, 0.0})) ==
        Approx(binary_entropy(0.9)).margin(1e-12));

  // the R^2 bound dominates the Holevo expression across a simplex grid
  const int n = 25;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n - i; ++j)
      for (int k = 0; k <= n - i - j; ++k) {
        const double a = i / static_cast<double>(n), b = j / static_cast<double>(n),
                     c = k / static_cast<double>(n);
        double d = 1.0 - a - b - c;
        if (d < 0) d = 0;
        const BellDiagonalState s({a, b, c, d});
        CHECK(holevo_bell_diagonal_upper(s) <=
              s_lambda_bound(r_squared(s)) + 1e-12);
      }
}

TEST_CASE("eve bound chains to the Bell-diagonal family achieving it") {
  // on the family l2 = l4 = 0 with l1 >= 1/2: F3^2 = 2 (2 l1 - 1)^2 + 1 and
  // chi = h(l1) = eve_info_from_f3(F3)
  for (double l1 = 0.5; l1 <= 1.0 + 1e-12; l1 += 0.01) {
    const double l1c = std::min(l1, 1.0);
    const BellDiagonalState s({l1c, 0.0, 1.0 - l1c, 0.0});
    const double delta = 2.0 * l1c - 1.0;
    const double f3 = std::sqrt(2.0 * delta * delta + 1.0);
    CHECK(holevo_bell_diagonal_upper(s) == Approx(eve_info_from_f3(f3)).margin(1e-10));
  }
}

TEST_CASE("detector-loss observables for isotropic states") {
  const WernerObservables ideal = observables_from_werner(NoiseParams(1.0, 1.0));
  CHECK(ideal.q_nonps == Approx(0.0).margin(1e-15));
  CHECK(ideal.q_ps == Approx(0.0).margin(1e-15));
  CHECK(ideal.f3 == Approx(kSqrt3).margin(1e-15));

  const WernerObservables lossy = observables_from_werner(NoiseParams(0.9, 0.8));
  CHECK(lossy.q_nonps == Approx((1.0 - 0.72) / 2.0).margin(1e-15));
  CHECK(lossy.q_ps == Approx(0.05).margin(1e-15));
  CHECK(lossy.f3 == Approx(0.72 * kSqrt3).margin(1e-15));

  // the isotropic line identity: F3 = sqrt(3)(1 - 2 q_nonps) at full efficiency
  for (double nu = 0.0; nu <= 1.0 + 1e-12; nu += 0.05) {
    const WernerObservables w = observables_from_werner(NoiseParams(std::min(nu, 1.0), 1.0));
    CHECK(w.f3 == Approx(kSqrt3 * (1.0 - 2.0 * w.q_nonps)).margin(1e-12));
  }
}

TEST_CASE("lossy one-sided rates, frozen reference values") {
  CHECK(rate_1sdi_nonps(NoiseParams(1.0, 1.0)).rate == Approx(1.0).margin(1e-12));
  CHECK(rate_1sdi_ps(NoiseParams(1.0, 1.0)).rate == Approx(1.0).margin(1e-12));

  CHECK(rate_1sdi_nonps(NoiseParams(0.95, 0.9)).rate ==
        Approx(0.113481194213582).margin(1e-12));
  CHECK(rate_1sdi_ps(NoiseParams(0.98, 0.8)).rate ==
        Approx(0.065905751201631).margin(1e-12));
  CHECK(rate_1sdi_nonps(NoiseParams(1.0, 0.9)).rate ==
        Approx(0.321325847611933).margin(1e-12));
  CHECK(rate_1sdi_ps(NoiseParams(1.0, 0.8)).rate ==
        Approx(0.163581014144653).margin(1e-12));

  // near the published efficiency thresholds at nu = 1
  CHECK(std::abs(rate_1sdi_nonps(NoiseParams(1.0, 0.827)).rate) < 3e-3);
  CHECK(std::abs(rate_1sdi_ps(NoiseParams(1.0, 0.745)).rate) < 2e-3);
  CHECK(rate_1sdi_nonps(NoiseParams(1.0, 0.82)).rate < 0.0);
  CHECK(rate_1sdi_ps(NoiseParams(1.0, 0.74)).rate < 0.0);
}

TEST_CASE("rate reports satisfy their defining identities") {
  for (double nu = 0.85; nu <= 1.0 + 1e-12; nu += 0.01)
    for (double eta = 0.7; eta <= 1.0 + 1e-12; eta += 0.05) {
      const NoiseParams p(std::min(nu, 1.0), std::min(eta, 1.0));
      const RateReport nonps = rate_1sdi_nonps(p);
      CHECK(nonps.rate == Approx(nonps.i_ab - nonps.chi_e).margin(1e-12));
      const RateReport ps = rate_1sdi_ps(p);
      CHECK(ps.rate == Approx(p.eta_a * ps.i_ab - ps.chi_e).margin(1e-12));
      // both variants share the non-post-selected witness
      CHECK(ps.witness == Approx(nonps.witness).margin(1e-15));
    }
}

TEST_CASE("post-selection never hurts on the isotropic loss model") {
  for (double eta = 0.6; eta <= 1.0 + 1e-12; eta += 0.02) {
    const NoiseParams p(1.0, std::min(eta, 1.0));
    CHECK(rate_1sdi_ps(p).rate >= rate_1sdi_nonps(p).rate - 1e-12);
  }
}
