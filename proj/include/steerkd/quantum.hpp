#pragma once

// Dense complex linear algebra for small quantum systems: Pauli matrices,
// tensor products, expectation values, spectra, entropies, partial traces
// and purifications. Everything is validated at construction so the layers
// above can assume well-formed states and observables.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace steerkd {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kInvolutionTol = 1e-10;
inline constexpr double kSpectrumTol = 1e-9;

enum class PauliAxis { X, Y, Z };

inline Mat pauli(PauliAxis axis) {
  Mat m(2, 2);
  switch (axis) {
    case PauliAxis::X:
      m << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
      break;
    case PauliAxis::Y:
      m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
      break;
    case PauliAxis::Z:
      m << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
      break;
  }
  return m;
}

inline Mat pauli_x() { return pauli(PauliAxis::X); }
inline Mat pauli_y() { return pauli(PauliAxis::Y); }
inline Mat pauli_z() { return pauli(PauliAxis::Z); }

// Kronecker product, row-major index convention: (a (x) b)[i*rb + k, j*cb + l].
inline Mat tensor(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline double hermiticity_error(const Mat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Eigenvalues of a Hermitian matrix, descending. Throws if m is not square
// or not Hermitian within tolerance.
inline std::vector<double> eigenvalues(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues: matrix not square");
  if (m.rows() == 0) throw std::invalid_argument("eigenvalues: empty matrix");
  if (hermiticity_error(m) > kInvolutionTol)
    throw std::invalid_argument("eigenvalues: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalues: eigensolver failed");
  std::vector<double> out(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + m.rows());
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

class DensityMatrix {
 public:
  explicit DensityMatrix(Mat m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
      throw std::invalid_argument("DensityMatrix: matrix not square");
    if (hermiticity_error(mat_) > kHermitianTol)
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(mat_.trace().real() - 1.0) > kTraceTol ||
        std::abs(mat_.trace().imag()) > kTraceTol)
      throw std::invalid_argument("DensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Mat> solver(mat_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kPsdTol)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  }

  const Mat& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  Mat mat_;
};

// Dichotomic observable: Hermitian involution (A^2 = I) with both outcomes
// +1 and -1 actually present in the spectrum.
class Observable {
 public:
  explicit Observable(Mat m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
      throw std::invalid_argument("Observable: matrix not square");
    if (hermiticity_error(mat_) > kHermitianTol)
      throw std::invalid_argument("Observable: not Hermitian");
    Mat sq = mat_ * mat_;
    sq -= Mat::Identity(mat_.rows(), mat_.cols());
    if (sq.cwiseAbs().maxCoeff() > kInvolutionTol)
      throw std::invalid_argument("Observable: not an involution (A^2 != I)");
    Eigen::SelfAdjointEigenSolver<Mat> solver(mat_, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    if (ev.minCoeff() > -1.0 + kInvolutionTol || ev.maxCoeff() < 1.0 - kInvolutionTol)
      throw std::invalid_argument("Observable: degenerate, needs both +1 and -1 outcomes");
  }

  const Mat& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  Mat mat_;
};

class PureState {
 public:
  explicit PureState(Vec amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() == 0) throw std::invalid_argument("PureState: empty vector");
    if (std::abs(amp_.norm() - 1.0) > kHermitianTol)
      throw std::invalid_argument("PureState: not normalized");
  }

  const Vec& amplitudes() const { return amp_; }
  Eigen::Index dim() const { return amp_.size(); }

 private:
  Vec amp_;
};

inline DensityMatrix density_from_pure(const PureState& psi) {
  Mat m = psi.amplitudes() * psi.amplitudes().adjoint();
  // round off the rank-1 outer product so the trace check cannot trip
  m /= m.trace().real();
  return DensityMatrix(std::move(m));
}

// Bell basis, ordered (Phi+, Psi-, Phi-, Psi+).
inline Vec bell_state(int k) {
  const double s = 1.0 / std::sqrt(2.0);
  Vec v = Vec::Zero(4);
  switch (k) {
    case 0: v(0) = s; v(3) = s; break;    // Phi+
    case 1: v(1) = s; v(2) = -s; break;   // Psi-
    case 2: v(0) = s; v(3) = -s; break;   // Phi-
    case 3: v(1) = s; v(2) = s; break;    // Psi+
    default: throw std::invalid_argument("bell_state: index must be 0..3");
  }
  return v;
}

inline double expectation(const DensityMatrix& rho, const Mat& observable) {
  if (observable.rows() != observable.cols())
    throw std::invalid_argument("expectation: observable not square");
  if (observable.rows() != rho.dim())
    throw std::invalid_argument("expectation: dimension mismatch");
  if (hermiticity_error(observable) > kInvolutionTol)
    throw std::invalid_argument("expectation: observable not Hermitian");
  Complex tr = (rho.mat() * observable).trace();
  if (std::abs(tr.imag()) > 1e-10)
    throw std::runtime_error("expectation: non-real value, inputs corrupt");
  return tr.real();
}

// S(rho) = -sum lambda log2 lambda, in bits. Eigenvalues within the PSD
// tolerance below zero are clamped to zero.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double lam : eigenvalues(rho.mat())) {
    if (lam > 0.0) s -= lam * std::log2(lam);
  }
  return s;
}

// Partial trace over one factor of a bipartite system with dims (d1, d2).
// traced = 0 removes the first factor, traced = 1 the second. The raw
// variant works on any matrix (not necessarily normalized), which the
// conditional-state computations need.
inline Mat partial_trace_raw(const Mat& m, int traced, Eigen::Index d1, Eigen::Index d2) {
  if (m.rows() != m.cols()) throw std::invalid_argument("partial_trace: matrix not square");
  if (d1 <= 0 || d2 <= 0 || d1 * d2 != m.rows())
    throw std::invalid_argument("partial_trace: inconsistent factor dimensions");
  if (traced != 0 && traced != 1)
    throw std::invalid_argument("partial_trace: traced factor must be 0 or 1");
  if (traced == 0) {
    Mat out = Mat::Zero(d2, d2);
    for (Eigen::Index i = 0; i < d2; ++i)
      for (Eigen::Index j = 0; j < d2; ++j)
        for (Eigen::Index k = 0; k < d1; ++k) out(i, j) += m(k * d2 + i, k * d2 + j);
    return out;
  }
  Mat out = Mat::Zero(d1, d1);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index j = 0; j < d1; ++j)
      for (Eigen::Index k = 0; k < d2; ++k) out(i, j) += m(i * d2 + k, j * d2 + k);
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, int traced,
                                   Eigen::Index d1, Eigen::Index d2) {
  Mat out = partial_trace_raw(rho.mat(), traced, d1, d2);
  out = 0.5 * (out + out.adjoint().eval());  // scrub roundoff
  out /= out.trace().real();
  return DensityMatrix(std::move(out));
}

// Purification on system (x) ancilla with ancilla dimension = dim(rho):
// |psi> = sum_k sqrt(lambda_k) |v_k> (x) |k>. partial_trace(.., traced=1)
// recovers rho.
inline PureState purify(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(rho.mat());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("purify: eigensolver failed");
  const Eigen::Index d = rho.dim();
  Vec psi = Vec::Zero(d * d);
  for (Eigen::Index k = 0; k < d; ++k) {
    double lam = solver.eigenvalues()(k);
    if (lam <= 0.0) continue;  // clamp tiny negatives
    const double w = std::sqrt(lam);
    for (Eigen::Index s = 0; s < d; ++s) psi(s * d + k) += w * solver.eigenvectors()(s, k);
  }
  psi /= psi.norm();
  return PureState(std::move(psi));
}

// --- random ensembles (property tests and verification oracles) ---

inline PureState random_pure_state(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  v /= v.norm();
  return PureState(std::move(v));
}

// Ginibre construction: G G^dag / tr, full rank with probability 1.
inline DensityMatrix random_density_matrix(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Mat rho = g * g.adjoint();
  rho = 0.5 * (rho + rho.adjoint().eval());
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho));
}

inline Mat random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    Complex d = r(i, i);
    q.col(i) *= (std::abs(d) > 0 ? d / std::abs(d) : Complex(1, 0));
  }
  return q;
}

// Random dichotomic observable: random unitary basis with random +-1 signs,
// resampled if all signs come out equal (that would be +-identity).
inline Observable random_dichotomic_observable(Eigen::Index dim, std::mt19937_64& rng) {
  if (dim < 2) throw std::invalid_argument("random_dichotomic_observable: dim must be >= 2");
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    std::vector<int> signs(static_cast<size_t>(dim));
    int plus = 0;
    for (auto& s : signs) {
      s = coin(rng) ? 1 : -1;
      if (s > 0) ++plus;
    }
    if (plus == 0 || plus == static_cast<int>(signs.size())) continue;
    Mat u = random_unitary(dim, rng);
    Mat d = Mat::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) d(i, i) = Complex(signs[static_cast<size_t>(i)], 0);
    Mat a = u * d * u.adjoint();
    a = 0.5 * (a + a.adjoint().eval());
    return Observable(std::move(a));
  }
}

}  // namespace steerkd
