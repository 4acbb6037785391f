#pragma once

#include <array>
#include <complex>
#include <string>

#include <Eigen/Dense>

namespace rsp {

using cxd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Tolerance for structural invariants (normalization, hermiticity, trace,
// positivity). Double precision leaves ample headroom at dimension <= 8.
inline constexpr double kStructTol = 1e-9;

// Probabilities below this are treated as impossible outcomes rather than
// renormalized into conditional states.
inline constexpr double kProbFloor = 1e-12;

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double length() const;
};

// Pure state over a fixed tensor-product basis. The label records which
// ordering the amplitudes use (for example "atom*pol*spatial"); operations
// that combine states concatenate labels so mismatches are visible in tests
// and output metadata.
class StateVector {
 public:
  StateVector(Vec amps, std::string basis_label);

  int dim() const { return static_cast<int>(amps_.size()); }
  const Vec& amps() const { return amps_; }
  const std::string& basis_label() const { return basis_label_; }

 private:
  Vec amps_;
  std::string basis_label_;
};

class Operator {
 public:
  enum class Flag { None, Unitary, Hermitian };

  explicit Operator(Mat entries, Flag flag = Flag::None);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& entries() const { return m_; }
  Flag flag() const { return flag_; }

 private:
  Mat m_;
  Flag flag_;
};

// Hermitian, unit-trace, positive-semidefinite matrix. Construction
// validates all three properties and throws std::invalid_argument on
// violation; instances are immutable afterwards.
class DensityOperator {
 public:
  explicit DensityOperator(Mat entries);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& entries() const { return m_; }

 private:
  Mat m_;
};

const Mat& identity2();
const Mat& pauli_x();
const Mat& pauli_y();
const Mat& pauli_z();

// Kronecker product with a-index major, b-index minor, matching the global
// basis ordering convention.
Mat kron(const Mat& a, const Mat& b);

// Tensor product of pure states; the combined dimension must be 4 or 8.
StateVector tensor(const StateVector& a, const StateVector& b);

DensityOperator tensor_density(const DensityOperator& a, const DensityOperator& b);

DensityOperator density_of(const StateVector& state);

// F = <target|rho|target>, clamped into [0, 1]. The imaginary residue of the
// quadratic form must vanish within tolerance for a valid rho.
double fidelity_pure(const StateVector& target, const DensityOperator& rho);

// (x, y, z) = (Tr rho sx, Tr rho sy, Tr rho sz) in the z basis {up, down}
// with up_x = (up + down)/sqrt(2) and up_y = (up + i down)/sqrt(2).
BlochVector bloch_of(const DensityOperator& rho);

// rho = (I + b . sigma)/2; requires |b| <= 1 within tolerance.
DensityOperator density_from_bloch(const BlochVector& b);

struct Eig2 {
  std::array<double, 2> values;  // sorted descending
  std::array<Vec, 2> vectors;    // orthonormal, aligned with values
};

// Closed-form eigendecomposition of a Hermitian 2x2 operator. A degenerate
// spectrum (discriminant < 1e-12) returns the canonical basis pair so results
// stay deterministic.
Eig2 eig2(const Operator& herm);

// Half the trace norm of the difference; dimension 2 only.
double trace_distance(const DensityOperator& a, const DensityOperator& b);

}  // namespace rsp
