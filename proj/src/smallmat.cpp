#include "ddsim/smallmat.hpp"

#include <algorithm>
#include <stdexcept>

namespace ddsim {

ComplexMatrix identity(int dim) {
  if (dim < 1) throw std::invalid_argument("identity: dim must be >= 1");
  return ComplexMatrix::Identity(dim, dim);
}

namespace {

ComplexMatrix make_pauli(cxd a, cxd b, cxd c, cxd d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m = make_pauli(0, 1, 1, 0);
  return m;
}

const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m = make_pauli(0, cxd(0, -1), cxd(0, 1), 0);
  return m;
}

const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m = make_pauli(1, 0, 0, -1);
  return m;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: dimension mismatch");
  return a * b;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols();
  const Eigen::Index br = b.rows(), bc = b.cols();
  ComplexMatrix out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i)
    for (Eigen::Index j = 0; j < ac; ++j)
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
  return out;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  return max_abs(a - b);
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const ComplexMatrix gram = u.adjoint() * u;
  return max_abs_diff(gram, identity(static_cast<int>(u.rows()))) < tol;
}

bool is_hermitian(const ComplexMatrix& h, double tol) {
  if (h.rows() != h.cols()) return false;
  return max_abs(h - h.adjoint()) < tol;
}

ComplexMatrix hermitian_expm(const ComplexMatrix& h, double t) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("hermitian_expm: matrix must be square");
  // scale-aware Hermiticity check: entries are angular frequencies and can
  // be large
  const double scale = std::max(1.0, max_abs(h));
  if (max_abs(h - h.adjoint()) > 1e-12 * scale)
    throw std::invalid_argument("hermitian_expm: input is not Hermitian");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_expm: eigendecomposition failed");
  const Eigen::VectorXd& w = solver.eigenvalues();
  const ComplexMatrix& v = solver.eigenvectors();

  Eigen::VectorXcd phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double theta = -w[k] * t;
    phases[k] = cxd(std::cos(theta), std::sin(theta));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

QuantumState::QuantumState(Eigen::VectorXcd amps) : amplitudes(std::move(amps)) {
  if (amplitudes.size() < 1)
    throw std::invalid_argument("QuantumState: empty amplitude vector");
  if (std::abs(amplitudes.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("QuantumState: amplitudes are not normalized");
}

QuantumState QuantumState::normalized(const Eigen::VectorXcd& v) {
  const double n = v.norm();
  if (n == 0.0) throw std::invalid_argument("QuantumState: zero vector");
  return QuantumState(v / n);
}

QuantumState QuantumState::plus_x() {
  Eigen::VectorXcd v(2);
  v << 1, 1;
  return normalized(v);
}

double survival_probability(const ComplexMatrix& u, const QuantumState& psi0) {
  if (u.rows() != u.cols() || u.rows() != psi0.dim())
    throw std::invalid_argument("survival_probability: dimension mismatch");
  const cxd amp = psi0.amplitudes.adjoint() * (u * psi0.amplitudes);
  return std::clamp(std::norm(amp), 0.0, 1.0);
}

}  // namespace ddsim
