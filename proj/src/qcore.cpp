#include "rspsim/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace rsp {

namespace {

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
}

bool is_hermitian(const Mat& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const Mat& herm) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

double BlochVector::length() const { return std::sqrt(x * x + y * y + z * z); }

StateVector::StateVector(Vec amps, std::string basis_label)
    : amps_(std::move(amps)), basis_label_(std::move(basis_label)) {
  const int d = static_cast<int>(amps_.size());
  if (d != 2 && d != 4 && d != 8) {
    throw std::invalid_argument("StateVector: dimension must be 2, 4, or 8");
  }
  if (!amps_.allFinite()) {
    throw std::invalid_argument("StateVector: non-finite amplitude");
  }
  if (std::abs(amps_.squaredNorm() - 1.0) > kStructTol) {
    throw std::invalid_argument("StateVector: squared norm differs from 1");
  }
}

Operator::Operator(Mat entries, Flag flag) : m_(std::move(entries)), flag_(flag) {
  if (m_.rows() != m_.cols() || m_.rows() < 2) {
    throw std::invalid_argument("Operator: entries must be a square matrix");
  }
  require_finite(m_, "Operator");
  if (flag_ == Flag::Unitary) {
    Mat uu = m_ * m_.adjoint();
    uu -= Mat::Identity(m_.rows(), m_.cols());
    if (uu.cwiseAbs().maxCoeff() > kStructTol) {
      throw std::invalid_argument("Operator: flagged unitary but U U+ != I");
    }
  } else if (flag_ == Flag::Hermitian) {
    if (!is_hermitian(m_, kStructTol)) {
      throw std::invalid_argument("Operator: flagged Hermitian but M != M+");
    }
  }
}

DensityOperator::DensityOperator(Mat entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() < 2) {
    throw std::invalid_argument("DensityOperator: entries must be square");
  }
  require_finite(m_, "DensityOperator");
  if (!is_hermitian(m_, kStructTol)) {
    throw std::invalid_argument("DensityOperator: not Hermitian");
  }
  if (std::abs(m_.trace().real() - 1.0) > kStructTol ||
      std::abs(m_.trace().imag()) > kStructTol) {
    throw std::invalid_argument("DensityOperator: trace differs from 1");
  }
  if (min_eigenvalue(m_) < -kStructTol) {
    throw std::invalid_argument("DensityOperator: negative eigenvalue");
  }
}

const Mat& identity2() {
  static const Mat m = Mat::Identity(2, 2);
  return m;
}

const Mat& pauli_x() {
  static const Mat m = [] {
    Mat s(2, 2);
    s << cxd(0, 0), cxd(1, 0), cxd(1, 0), cxd(0, 0);
    return s;
  }();
  return m;
}

const Mat& pauli_y() {
  static const Mat m = [] {
    Mat s(2, 2);
    s << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
    return s;
  }();
  return m;
}

const Mat& pauli_z() {
  static const Mat m = [] {
    Mat s(2, 2);
    s << cxd(1, 0), cxd(0, 0), cxd(0, 0), cxd(-1, 0);
    return s;
  }();
  return m;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  const int d = a.dim() * b.dim();
  if (d != 4 && d != 8) {
    throw std::invalid_argument("tensor: combined dimension must be 4 or 8");
  }
  Vec amps(d);
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < b.dim(); ++j) {
      amps(i * b.dim() + j) = a.amps()(i) * b.amps()(j);
    }
  }
  return StateVector(std::move(amps), a.basis_label() + "*" + b.basis_label());
}

DensityOperator tensor_density(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(kron(a.entries(), b.entries()));
}

DensityOperator density_of(const StateVector& state) {
  return DensityOperator(state.amps() * state.amps().adjoint());
}

double fidelity_pure(const StateVector& target, const DensityOperator& rho) {
  if (target.dim() != rho.dim()) {
    throw std::invalid_argument("fidelity_pure: dimension mismatch");
  }
  const cxd form = (target.amps().adjoint() * rho.entries() * target.amps())(0);
  if (std::abs(form.imag()) > kStructTol) {
    throw std::invalid_argument("fidelity_pure: quadratic form not real");
  }
  return std::clamp(form.real(), 0.0, 1.0);
}

BlochVector bloch_of(const DensityOperator& rho) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("bloch_of: dimension must be 2");
  }
  const Mat& m = rho.entries();
  BlochVector b;
  b.x = 2.0 * m(0, 1).real();
  b.y = -2.0 * m(0, 1).imag();
  b.z = m(0, 0).real() - m(1, 1).real();
  return b;
}

DensityOperator density_from_bloch(const BlochVector& b) {
  const double len = b.length();
  if (len > 1.0 + kStructTol) {
    throw std::invalid_argument("density_from_bloch: vector outside the Bloch ball");
  }
  // Clip the rounding residue when |b| sits marginally outside the sphere.
  const double s = len > 1.0 ? 1.0 / len : 1.0;
  Mat m(2, 2);
  m(0, 0) = cxd(0.5 * (1.0 + s * b.z), 0.0);
  m(1, 1) = cxd(0.5 * (1.0 - s * b.z), 0.0);
  m(0, 1) = cxd(0.5 * s * b.x, -0.5 * s * b.y);
  m(1, 0) = std::conj(m(0, 1));
  return DensityOperator(std::move(m));
}

Eig2 eig2(const Operator& herm) {
  if (herm.dim() != 2) {
    throw std::invalid_argument("eig2: dimension must be 2");
  }
  const Mat& m = herm.entries();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kStructTol) {
    throw std::invalid_argument("eig2: input not Hermitian");
  }
  const double a = m(0, 0).real();
  const double c = m(1, 1).real();
  const cxd b = m(0, 1);
  const double half_diff = 0.5 * (a - c);
  const double disc = std::sqrt(half_diff * half_diff + std::norm(b));
  const double mean = 0.5 * (a + c);

  Eig2 out;
  out.values = {mean + disc, mean - disc};

  if (disc < 1e-12) {
    Vec v0(2), v1(2);
    v0 << cxd(1, 0), cxd(0, 0);
    v1 << cxd(0, 0), cxd(1, 0);
    out.vectors = {std::move(v0), std::move(v1)};
    return out;
  }

  // Eigenvector of lambda+ solves (a - lambda) v0 + b v1 = 0. Pick the
  // better-conditioned row to avoid cancellation when b is tiny.
  Vec vplus(2);
  if (std::abs(b) >= std::abs(half_diff)) {
    vplus << b, cxd(out.values[0] - a, 0.0);
  } else if (half_diff > 0.0) {
    vplus << cxd(out.values[0] - c, 0.0), std::conj(b);
  } else {
    vplus << b, cxd(out.values[0] - a, 0.0);
  }
  vplus.normalize();
  Vec vminus(2);
  vminus << -std::conj(vplus(1)), std::conj(vplus(0));
  out.vectors = {std::move(vplus), std::move(vminus)};
  return out;
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() != 2 || b.dim() != 2) {
    throw std::invalid_argument("trace_distance: dimension must be 2");
  }
  const Mat diff = a.entries() - b.entries();
  const Eig2 e = eig2(Operator(diff, Operator::Flag::Hermitian));
  return 0.5 * (std::abs(e.values[0]) + std::abs(e.values[1]));
}

}  // namespace rsp
