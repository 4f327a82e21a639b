#pragma once

// Noise models: isotropic (Werner) states and Alice-side detection loss as a
// two-outcome POVM with the null outcome merged into -1.

#include "steerkd/quantum.hpp"

#include <cmath>
#include <stdexcept>

namespace steerkd {

// nu |Phi+><Phi+| + (1 - nu) I/4.
inline DensityMatrix werner(double nu) {
  if (!(nu >= 0.0 && nu <= 1.0))
    throw std::invalid_argument("werner: visibility outside [0, 1]");
  Vec phi = bell_state(0);
  Mat rho = nu * (phi * phi.adjoint()) + (1.0 - nu) * 0.25 * Mat::Identity(4, 4);
  return DensityMatrix(std::move(rho));
}

// Two-outcome POVM {E+, E-}, E+- PSD and E+ + E- = I.
class BinaryPovm {
 public:
  BinaryPovm(Mat e_plus, Mat e_minus) : plus_(std::move(e_plus)), minus_(std::move(e_minus)) {
    if (plus_.rows() != plus_.cols() || minus_.rows() != minus_.cols() ||
        plus_.rows() != minus_.rows() || plus_.rows() == 0)
      throw std::invalid_argument("BinaryPovm: elements must be square, same dimension");
    for (const Mat* m : {&plus_, &minus_}) {
      if (hermiticity_error(*m) > kHermitianTol)
        throw std::invalid_argument("BinaryPovm: element not Hermitian");
      Eigen::SelfAdjointEigenSolver<Mat> solver(*m, Eigen::EigenvaluesOnly);
      if (solver.eigenvalues().minCoeff() < -kPsdTol)
        throw std::invalid_argument("BinaryPovm: element not positive semidefinite");
    }
    Mat sum = plus_ + minus_ - Mat::Identity(plus_.rows(), plus_.cols());
    if (sum.cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("BinaryPovm: elements do not sum to identity");
  }

  const Mat& plus() const { return plus_; }
  const Mat& minus() const { return minus_; }
  Eigen::Index dim() const { return plus_.rows(); }

  // E+ - E-, the observable whose expectation reproduces <a> = p+ - p-.
  Mat effective_observable() const { return plus_ - minus_; }

 private:
  Mat plus_, minus_;
};

// Projective POVM {(I + A)/2, (I - A)/2} of a dichotomic observable.
inline BinaryPovm projective_povm(const Observable& a) {
  Mat id = Mat::Identity(a.dim(), a.dim());
  return BinaryPovm(0.5 * (id + a.mat()), 0.5 * (id - a.mat()));
}

// Detector of efficiency eta in front of an ideal POVM, with the no-click
// event recorded as outcome -1: {eta E+, eta E- + (1 - eta) I}.
inline BinaryPovm lossy_povm(const BinaryPovm& ideal, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("lossy_povm: efficiency outside [0, 1]");
  Mat id = Mat::Identity(ideal.dim(), ideal.dim());
  return BinaryPovm(eta * ideal.plus(), eta * ideal.minus() + (1.0 - eta) * id);
}

}  // namespace steerkd
