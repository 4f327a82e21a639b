#include "steerkd/noise.hpp"
#include "steerkd/steering.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>

using namespace steerkd;
using Catch::Approx;

namespace {

DensityMatrix random_two_qubit(std::mt19937_64& rng) { return random_density_matrix(4, rng); }

}  // namespace

TEST_CASE("correlation matrix of canonical states") {
  const Eigen::Matrix3d t_phi = correlation_matrix(werner(1.0)).t();
  CHECK(t_phi(0, 0) == Approx(1.0).margin(1e-12));
  CHECK(t_phi(1, 1) == Approx(-1.0).margin(1e-12));
  CHECK(t_phi(2, 2) == Approx(1.0).margin(1e-12));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(std::abs(t_phi(i, j)) < 1e-12);

  const Eigen::Matrix3d t_mixed = correlation_matrix(DensityMatrix(Mat::Identity(4, 4) * 0.25)).t();
  CHECK(t_mixed.cwiseAbs().maxCoeff() < 1e-12);

  for (double nu : {0.3, 0.6, 0.9}) {
    const Eigen::Matrix3d t = correlation_matrix(werner(nu)).t();
    CHECK(t(0, 0) == Approx(nu).margin(1e-12));
    CHECK(t(1, 1) == Approx(-nu).margin(1e-12));
    CHECK(t(2, 2) == Approx(nu).margin(1e-12));
  }

  CHECK_THROWS_AS(correlation_matrix(DensityMatrix(Mat::Identity(2, 2) * 0.5)),
                  std::invalid_argument);
}

TEST_CASE("correlation matrix type rejects unphysical input") {
  CHECK_THROWS_AS(CorrelationMatrix(Eigen::Matrix3d::Identity() * 1.5),
                  std::invalid_argument);
  Eigen::Matrix3d ones = Eigen::Matrix3d::Ones();  // singular value 3
  CHECK_THROWS_AS(CorrelationMatrix(ones), std::invalid_argument);
  CHECK_NOTHROW(CorrelationMatrix(Eigen::Matrix3d::Identity()));
}

TEST_CASE("measurement settings validation") {
  CHECK_NOTHROW(protocol_settings());
  // Alice direction not unit
  CHECK_THROWS_AS(MeasurementSettings({Eigen::Vector3d(2, 0, 0)}, {Eigen::Vector3d(1, 0, 0)}),
                  std::invalid_argument);
  // Bob directions not orthogonal
  CHECK_THROWS_AS(MeasurementSettings({Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 0, 1)},
                                      {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(1, 0, 0)}),
                  std::invalid_argument);
  // mismatched counts
  CHECK_THROWS_AS(MeasurementSettings({Eigen::Vector3d(1, 0, 0)},
                                      {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)}),
                  std::invalid_argument);
}

TEST_CASE("three-setting value on reference states") {
  const MeasurementSettings s = protocol_settings();
  CHECK(cjwr_value(werner(1.0), s) == Approx(std::sqrt(3.0)).margin(1e-12));
  CHECK(cjwr_value(DensityMatrix(Mat::Identity(4, 4) * 0.25), s) == Approx(0.0).margin(1e-12));
  for (double nu : {0.2, 0.5, 0.8})
    CHECK(cjwr_value(werner(nu), s) == Approx(nu * std::sqrt(3.0)).margin(1e-12));

  // two settings on Phi+: (x, z) matched gives 2/sqrt(2) = sqrt(2)
  const MeasurementSettings two({Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 0, 1)},
                                {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 0, 1)});
  CHECK(cjwr_value(werner(1.0), two) == Approx(std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("protocol value equals the matched-correlator expression") {
  std::mt19937_64 rng(99);
  const MeasurementSettings s = protocol_settings();
  for (int trial = 0; trial < 200; ++trial) {
    const DensityMatrix rho = random_two_qubit(rng);
    const Eigen::Matrix3d t = correlation_matrix(rho).t();
    const double direct = std::abs(t(0, 0) - t(1, 1) + t(2, 2)) / std::sqrt(3.0);
    CHECK(cjwr_value(rho, s) == Approx(direct).margin(1e-10));
  }
}

TEST_CASE("optimal three-setting value") {
  CHECK(cjwr_f3_optimal(werner(1.0)) == Approx(std::sqrt(3.0)).margin(1e-12));
  CHECK(cjwr_f3_optimal(werner(0.5)) == Approx(0.5 * std::sqrt(3.0)).margin(1e-12));

  // pure product state |00>: T = diag(0, 0, 1), F3 = 1
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = 1.0;
  CHECK(cjwr_f3_optimal(DensityMatrix(m)) == Approx(1.0).margin(1e-12));

  // never exceeds sqrt(3), and settings-based value never exceeds the optimum
  std::mt19937_64 rng(7);
  const MeasurementSettings s = protocol_settings();
  for (int trial = 0; trial < 300; ++trial) {
    const DensityMatrix rho = random_two_qubit(rng);
    const double opt = cjwr_f3_optimal(rho);
    CHECK(opt <= std::sqrt(3.0) + 1e-9);
    CHECK(cjwr_value(rho, s) <= opt + 1e-9);
  }
}

TEST_CASE("optimal value is invariant under local unitaries") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix rho = random_two_qubit(rng);
    const Mat u = tensor(random_unitary(2, rng), random_unitary(2, rng));
    Mat rotated = u * rho.mat() * u.adjoint();
    rotated = 0.5 * (rotated + rotated.adjoint().eval());
    rotated /= rotated.trace().real();
    CHECK(cjwr_f3_optimal(DensityMatrix(rotated)) ==
          Approx(cjwr_f3_optimal(rho)).margin(1e-9));
  }
}

TEST_CASE("steering operator spectrum") {
  // anticommuting triple saturates the norm bound: spectrum {1, 1, 1, -3}
  const Mat b_pauli = cjwr_operator(Observable(pauli_x()), Observable(pauli_y()),
                                    Observable(pauli_z()));
  const std::vector<double> ev = eigenvalues(b_pauli);
  CHECK(ev[0] == Approx(1.0).margin(1e-12));
  CHECK(ev[2] == Approx(1.0).margin(1e-12));
  CHECK(ev[3] == Approx(-3.0).margin(1e-12));

  // commuting triple (z, z, z): sigma_z (x) (sx + sy + sz), eigenvalues
  // +-sqrt(3) twice each
  const Mat b_zzz = cjwr_operator(Observable(pauli_z()), Observable(pauli_z()),
                                  Observable(pauli_z()));
  const std::vector<double> ez = eigenvalues(b_zzz);
  CHECK(ez[0] == Approx(std::sqrt(3.0)).margin(1e-12));
  CHECK(ez[1] == Approx(std::sqrt(3.0)).margin(1e-12));
  CHECK(ez[2] == Approx(-std::sqrt(3.0)).margin(1e-12));
  CHECK(ez[3] == Approx(-std::sqrt(3.0)).margin(1e-12));

  // dimension mismatch
  std::mt19937_64 rng(5);
  CHECK_THROWS_AS(cjwr_operator(random_dichotomic_observable(4, rng), Observable(pauli_x()),
                                Observable(pauli_y())),
                  std::invalid_argument);
}

TEST_CASE("bell diagonal state construction and correlators") {
  CHECK_THROWS_AS(BellDiagonalState({0.5, 0.5, 0.5, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(BellDiagonalState({0.5, 0.1, 0.1, 0.1}), std::invalid_argument);

  const BellDiagonalState phi({1.0, 0.0, 0.0, 0.0});
  const auto c_phi = bell_diagonal_correlators(phi);
  CHECK(c_phi[0] == Approx(1.0));
  CHECK(c_phi[1] == Approx(-1.0));
  CHECK(c_phi[2] == Approx(1.0));

  const DensityMatrix rho_phi = bell_diagonal_to_density(phi);
  CHECK((rho_phi.mat() - werner(1.0).mat()).cwiseAbs().maxCoeff() < 1e-12);

  const BellDiagonalState uniform({0.25, 0.25, 0.25, 0.25});
  CHECK((bell_diagonal_to_density(uniform).mat() - Mat::Identity(4, 4) * 0.25)
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  const BellDiagonalState mix({0.7, 0.1, 0.15, 0.05});
  const auto c = bell_diagonal_correlators(mix);
  CHECK(c[0] == Approx(0.7 - 0.1 - 0.15 + 0.05).margin(1e-15));
  CHECK(c[1] == Approx(-0.7 - 0.1 + 0.15 + 0.05).margin(1e-15));
  CHECK(c[2] == Approx(0.7 - 0.1 + 0.15 - 0.05).margin(1e-15));
}

TEST_CASE("bell diagonal correlators agree with the reconstructed density matrix") {
  const int n = 20;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n - i; ++j)
      for (int k = 0; k <= n - i - j; ++k) {
        const double a = i / static_cast<double>(n), b = j / static_cast<double>(n),
                     c = k / static_cast<double>(n);
        const double d = 1.0 - a - b - c;
        const BellDiagonalState s({a, b, c, d < 0 ? 0.0 : d});
        const auto corr = bell_diagonal_correlators(s);
        const Eigen::Matrix3d t = correlation_matrix(bell_diagonal_to_density(s)).t();
        CHECK(std::abs(t(0, 0) - corr[0]) < 1e-12);
        CHECK(std::abs(t(1, 1) - corr[1]) < 1e-12);
        CHECK(std::abs(t(2, 2) - corr[2]) < 1e-12);
        const double f3_corr =
            std::sqrt(corr[0] * corr[0] + corr[1] * corr[1] + corr[2] * corr[2]);
        CHECK(cjwr_f3_optimal(bell_diagonal_to_density(s)) ==
              Approx(f3_corr).margin(1e-9));
      }
}

TEST_CASE("symmetrization of isotropic states") {
  for (double nu : {0.0, 0.3, 0.6, 1.0}) {
    const BellDiagonalReduction red = symmetrize_to_bell_diagonal(werner(nu));
    CHECK(red.lambda[0] == Approx((1.0 + 3.0 * nu) / 4.0).margin(1e-12));
    CHECK(red.lambda[1] == Approx((1.0 - nu) / 4.0).margin(1e-12));
    CHECK(red.lambda[2] == Approx((1.0 - nu) / 4.0).margin(1e-12));
    CHECK(red.lambda[3] == Approx((1.0 - nu) / 4.0).margin(1e-12));
  }
}

TEST_CASE("symmetrization fixes canonically ordered Bell-diagonal states") {
  const BellDiagonalState s({0.5, 0.2, 0.2, 0.1});
  const BellDiagonalReduction red =
      symmetrize_to_bell_diagonal(bell_diagonal_to_density(s));
  for (int k = 0; k < 4; ++k) CHECK(red.lambda[k] == Approx(s[k]).margin(1e-12));
}

TEST_CASE("symmetrization reorders non-canonical Bell-diagonal states") {
  // weights out of canonical order: expect the pairwise sorted arrangement
  const BellDiagonalState s({0.2, 0.5, 0.1, 0.2});
  const BellDiagonalReduction red =
      symmetrize_to_bell_diagonal(bell_diagonal_to_density(s));
  CHECK(red.lambda[0] == Approx(0.5).margin(1e-12));
  CHECK(red.lambda[1] == Approx(0.2).margin(1e-12));
  CHECK(red.lambda[2] == Approx(0.2).margin(1e-12));
  CHECK(red.lambda[3] == Approx(0.1).margin(1e-12));
}

TEST_CASE("symmetrization output is Bell-diagonal, canonical and weight-consistent") {
  std::mt19937_64 rng(31415);
  for (int trial = 0; trial < 200; ++trial) {
    const DensityMatrix rho = trial % 4 == 0 ? density_from_pure(random_pure_state(4, rng))
                                             : random_two_qubit(rng);
    const BellDiagonalReduction red = symmetrize_to_bell_diagonal(rho);

    CHECK(red.lambda.canonical(1e-12));

    // the reduced state is diagonal in the Bell basis with the reported weights
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const Complex e = (bell_state(i).adjoint() * red.state.mat() * bell_state(j))(0, 0);
        if (i == j)
          CHECK(std::abs(e.real() - red.lambda[i]) < 1e-10);
        else
          CHECK(std::abs(e) < 1e-10);
      }

    // matched correlators survive the twirl stage
    const Eigen::Matrix3d t_in = correlation_matrix(rho).t();
    const Eigen::Matrix3d t_tw = correlation_matrix(detail::bell_symmetrize(rho)).t();
    for (int i = 0; i < 3; ++i) CHECK(std::abs(t_in(i, i) - t_tw(i, i)) < 1e-12);
  }
}
