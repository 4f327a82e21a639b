#pragma once

// Steering certification layer: two-qubit correlation matrices, the
// three-setting CJWR steering functional, its optimal value F3, the
// symmetrization of an arbitrary two-qubit state to Bell-diagonal form, and
// Bell-diagonal bookkeeping. Bell basis order is (Phi+, Psi-, Phi-, Psi+)
// throughout.

#include "steerkd/quantum.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace steerkd {

inline constexpr double kSqrt3 = 1.7320508075688772;

inline Mat bloch_observable(const Eigen::Vector3d& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("bloch_observable: direction must be a unit vector");
  return direction.x() * pauli_x() + direction.y() * pauli_y() + direction.z() * pauli_z();
}

// T_ij = <sigma_i (x) sigma_j>. Entries are bounded by 1 and the matrix has
// all singular values <= 1 for any physical state.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Eigen::Matrix3d t) : t_(std::move(t)) {
    if (t_.cwiseAbs().maxCoeff() > 1.0 + kPsdTol)
      throw std::invalid_argument("CorrelationMatrix: entry out of [-1, 1]");
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(t_);
    if (svd.singularValues().maxCoeff() > 1.0 + kSpectrumTol)
      throw std::invalid_argument("CorrelationMatrix: singular value above 1, unphysical");
  }

  const Eigen::Matrix3d& t() const { return t_; }
  double operator()(int i, int j) const { return t_(i, j); }

  double frobenius_norm() const { return t_.norm(); }

 private:
  Eigen::Matrix3d t_;
};

inline CorrelationMatrix correlation_matrix(const DensityMatrix& rho) {
  if (rho.dim() != 4)
    throw std::invalid_argument("correlation_matrix: state must be two-qubit (dim 4)");
  const Mat sig[3] = {pauli_x(), pauli_y(), pauli_z()};
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = expectation(rho, tensor(sig[i], sig[j]));
  return CorrelationMatrix(t);
}

// n pairs of measurement directions; Alice's are arbitrary unit vectors,
// Bob's must be mutually orthonormal (his device is trusted and calibrated).
class MeasurementSettings {
 public:
  MeasurementSettings(std::vector<Eigen::Vector3d> alice, std::vector<Eigen::Vector3d> bob)
      : alice_(std::move(alice)), bob_(std::move(bob)) {
    if (alice_.size() != bob_.size() || alice_.empty() || alice_.size() > 3)
      throw std::invalid_argument("MeasurementSettings: need 1..3 matched setting pairs");
    for (const auto& u : alice_)
      if (std::abs(u.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("MeasurementSettings: Alice direction not unit");
    for (size_t i = 0; i < bob_.size(); ++i) {
      for (size_t j = 0; j < bob_.size(); ++j) {
        double want = (i == j) ? 1.0 : 0.0;
        if (std::abs(bob_[i].dot(bob_[j]) - want) > 1e-10)
          throw std::invalid_argument("MeasurementSettings: Bob directions not orthonormal");
      }
    }
  }

  const std::vector<Eigen::Vector3d>& alice() const { return alice_; }
  const std::vector<Eigen::Vector3d>& bob() const { return bob_; }
  int n() const { return static_cast<int>(alice_.size()); }

 private:
  std::vector<Eigen::Vector3d> alice_, bob_;
};

// The protocol's settings: Alice measures (sigma_x, -sigma_y, sigma_z),
// Bob (sigma_x, sigma_y, sigma_z). The sign on Alice's second setting makes
// all three matched correlators positive on Phi+.
inline MeasurementSettings protocol_settings() {
  return MeasurementSettings(
      {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, -1, 0), Eigen::Vector3d(0, 0, 1)},
      {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1)});
}

// F_n = (1/sqrt(n)) |sum_i <A_i (x) B_i>|.
inline double cjwr_value(const DensityMatrix& rho, const MeasurementSettings& settings) {
  if (rho.dim() != 4)
    throw std::invalid_argument("cjwr_value: state must be two-qubit (dim 4)");
  double acc = 0.0;
  for (int i = 0; i < settings.n(); ++i) {
    Mat obs = tensor(bloch_observable(settings.alice()[static_cast<size_t>(i)]),
                     bloch_observable(settings.bob()[static_cast<size_t>(i)]));
    acc += expectation(rho, obs);
  }
  return std::abs(acc) / std::sqrt(static_cast<double>(settings.n()));
}

// Best-case three-setting value over all measurement choices:
// F3 = ||T||_F = sqrt(sum of squared singular values). Steering is certified
// when this exceeds 1; the algebraic maximum is sqrt(3).
inline double cjwr_f3_optimal(const DensityMatrix& rho) {
  return correlation_matrix(rho).frobenius_norm();
}

// B = sum_l A_l (x) sigma_l for three dichotomic observables on a common
// dimension. Its operator norm is at most 3, with equality iff the A_l
// pairwise anticommute.
inline Mat cjwr_operator(const Observable& a1, const Observable& a2, const Observable& a3) {
  if (a1.dim() != a2.dim() || a1.dim() != a3.dim())
    throw std::invalid_argument("cjwr_operator: observables must share a dimension");
  return tensor(a1.mat(), pauli_x()) + tensor(a2.mat(), pauli_y()) + tensor(a3.mat(), pauli_z());
}

// Bell-diagonal state, weights ordered (Phi+, Psi-, Phi-, Psi+).
class BellDiagonalState {
 public:
  explicit BellDiagonalState(std::array<double, 4> lambda) : lam_(lambda) {
    double sum = 0.0;
    for (double& l : lam_) {
      if (l < -kPsdTol) throw std::invalid_argument("BellDiagonalState: negative weight");
      if (l < 0.0) l = 0.0;
      sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("BellDiagonalState: weights must sum to 1");
    for (double& l : lam_) l /= sum;
  }

  const std::array<double, 4>& lambda() const { return lam_; }
  double operator[](int k) const { return lam_[static_cast<size_t>(k)]; }

  bool canonical(double tol = 1e-12) const {
    return lam_[0] >= lam_[1] - tol && lam_[2] >= lam_[3] - tol;
  }

 private:
  std::array<double, 4> lam_;
};

inline DensityMatrix bell_diagonal_to_density(const BellDiagonalState& state) {
  Mat rho = Mat::Zero(4, 4);
  for (int k = 0; k < 4; ++k) {
    Vec b = bell_state(k);
    rho += state[k] * (b * b.adjoint());
  }
  return DensityMatrix(std::move(rho));
}

// Diagonal correlators (T11, T22, T33) of a Bell-diagonal state; the
// off-diagonal T entries vanish identically.
inline std::array<double, 3> bell_diagonal_correlators(const BellDiagonalState& s) {
  return {s[0] - s[1] - s[2] + s[3],
          -s[0] - s[1] + s[2] + s[3],
          s[0] - s[1] + s[2] - s[3]};
}

namespace detail {

// sigma_y (x) sigma_y twirl followed by realification. Leaves the matched
// correlators (T11, T22, T33) untouched, kills every single-qubit Bloch
// component, and brings T to the form [[*,0,*],[0,*,0],[*,0,*]].
inline DensityMatrix bell_symmetrize(const DensityMatrix& rho) {
  static const Mat yy = tensor(pauli_y(), pauli_y());
  Mat m = 0.5 * (rho.mat() + yy * rho.mat() * yy);
  m = 0.5 * (m + m.conjugate().eval());
  m = 0.5 * (m + m.adjoint().eval());
  m /= m.trace().real();
  return DensityMatrix(std::move(m));
}

// y-axis rotation by theta on one qubit; u(theta) = exp(-i theta sigma_y / 2).
inline Mat y_rotation(double theta) {
  Mat u(2, 2);
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  u << Complex(c, 0), Complex(-s, 0), Complex(s, 0), Complex(c, 0);
  return u;
}

inline DensityMatrix rotate_local_y(const DensityMatrix& rho, double theta_a, double theta_b) {
  Mat u = tensor(y_rotation(theta_a), y_rotation(theta_b));
  Mat m = u * rho.mat() * u.adjoint();
  m = 0.5 * (m + m.adjoint().eval());
  m /= m.trace().real();
  return DensityMatrix(std::move(m));
}

}  // namespace detail

struct BellDiagonalReduction {
  BellDiagonalState lambda;
  DensityMatrix state;  // the symmetrized, rotated density matrix itself
};

// Reduce an arbitrary two-qubit state to canonical Bell-diagonal form by
// operations that never increase Eve's information: twirl + realify, then
// local y-rotations diagonalizing the (x,z) block of T, then discrete flips
// enforcing the canonical weight ordering lam_Phi+ >= lam_Psi- and
// lam_Phi- >= lam_Psi+.
inline BellDiagonalReduction symmetrize_to_bell_diagonal(const DensityMatrix& rho) {
  if (rho.dim() != 4)
    throw std::invalid_argument("symmetrize_to_bell_diagonal: state must be two-qubit");
  DensityMatrix cur = detail::bell_symmetrize(rho);

  Eigen::Matrix3d t = correlation_matrix(cur).t();
  Eigen::Matrix2d block;
  block << t(0, 0), t(0, 2), t(2, 0), t(2, 2);
  if (std::abs(t(0, 2)) > 1e-14 || std::abs(t(2, 0)) > 1e-14) {
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix2d u = svd.matrixU(), v = svd.matrixV();
    if (u.determinant() < 0) u.col(1) *= -1.0;  // keep rotations proper
    if (v.determinant() < 0) v.col(1) *= -1.0;
    const double theta_a = std::atan2(u(1, 0), u(0, 0));
    const double theta_b = std::atan2(v(1, 0), v(0, 0));
    cur = detail::rotate_local_y(cur, theta_a, theta_b);
    t = correlation_matrix(cur).t();
  }

  // canonical flips on (T11, T33): a pi y-rotation on Alice negates both,
  // a pi/2 y-rotation on both sides swaps them
  if (t(0, 0) + t(2, 2) < 0.0) {
    cur = detail::rotate_local_y(cur, M_PI, 0.0);
    t = correlation_matrix(cur).t();
  }
  if (t(2, 2) < t(0, 0)) {
    cur = detail::rotate_local_y(cur, M_PI_2, M_PI_2);
    t = correlation_matrix(cur).t();
  }

  if (std::abs(t(0, 2)) > kSpectrumTol || std::abs(t(2, 0)) > kSpectrumTol ||
      std::abs(t(0, 1)) > kSpectrumTol || std::abs(t(1, 0)) > kSpectrumTol ||
      std::abs(t(1, 2)) > kSpectrumTol || std::abs(t(2, 1)) > kSpectrumTol)
    throw std::runtime_error("symmetrize_to_bell_diagonal: residual off-diagonal correlations");

  const double t11 = t(0, 0), t22 = t(1, 1), t33 = t(2, 2);
  std::array<double, 4> lam = {(1.0 + t11 - t22 + t33) / 4.0,
                               (1.0 - t11 - t22 - t33) / 4.0,
                               (1.0 - t11 + t22 + t33) / 4.0,
                               (1.0 + t11 + t22 - t33) / 4.0};
  return BellDiagonalReduction{BellDiagonalState(lam), std::move(cur)};
}

}  // namespace steerkd
