#pragma once

// Dense complex linear algebra for small Hilbert spaces (dim <= 32):
// products, Kronecker products, Hermitian matrix exponentials and
// state utilities. Everything is a plain value type; nothing here
// holds mutable shared state.

#include <complex>
#include <Eigen/Dense>

namespace ddsim {

using cxd = std::complex<double>;

// Row-major storage is the global convention; first Kronecker factor is the
// slowest index.
using ComplexMatrix =
    Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

ComplexMatrix identity(int dim);

const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();

// Exact matrix product; throws std::invalid_argument on dimension mismatch.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

// Kronecker product, first factor = slowest index.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

double max_abs(const ComplexMatrix& m);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_unitary(const ComplexMatrix& u, double tol = 1e-10);
bool is_hermitian(const ComplexMatrix& h, double tol = 1e-12);

// exp(-i h t) for Hermitian h (entries rad/s, t seconds), computed through a
// Hermitian eigendecomposition so accuracy is uniform in |h|*t. Throws on
// non-Hermitian or non-square input.
ComplexMatrix hermitian_expm(const ComplexMatrix& h, double t);

struct QuantumState {
  Eigen::VectorXcd amplitudes;

  // Validates ||psi|| = 1 within 1e-12.
  explicit QuantumState(Eigen::VectorXcd amps);

  int dim() const { return static_cast<int>(amplitudes.size()); }

  // Normalizes an arbitrary nonzero vector.
  static QuantumState normalized(const Eigen::VectorXcd& v);
  // (|0> + |1>)/sqrt(2), the sigma_x +1 eigenstate.
  static QuantumState plus_x();
};

// |<psi0| u |psi0>|^2, clamped to [0, 1].
double survival_probability(const ComplexMatrix& u, const QuantumState& psi0);

}  // namespace ddsim
