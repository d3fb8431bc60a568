#include "spinctl/operator_kernel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "spinctl/errors.hpp"

namespace spinctl {

char axis_name(Axis a) {
  switch (a) {
    case Axis::x: return 'x';
    case Axis::y: return 'y';
    case Axis::z: return 'z';
  }
  return '?';
}

Axis parse_axis(char c) {
  switch (c) {
    case 'x': case 'X': return Axis::x;
    case 'y': case 'Y': return Axis::y;
    case 'z': case 'Z': return Axis::z;
    default: throw ValidationError(std::string("unknown axis '") + c + "'");
  }
}

int hilbert_dim(int n_spins) {
  if (n_spins < 1 || n_spins > 12) {
    throw ValidationError("spin count must be in [1, 12], got " + std::to_string(n_spins));
  }
  return 1 << n_spins;
}

int spins_for_dim(long dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw ValidationError("dimension " + std::to_string(dim) + " is not a power of two");
  }
  int n = 0;
  while ((1L << n) < dim) ++n;
  return n;
}

Operator identity(long dim) { return Operator::Identity(dim, dim); }

Operator pauli(Axis a) {
  Operator p = Operator::Zero(2, 2);
  switch (a) {
    case Axis::x:
      p(0, 1) = 1.0;
      p(1, 0) = 1.0;
      break;
    case Axis::y:
      p(0, 1) = -kI;
      p(1, 0) = kI;
      break;
    case Axis::z:
      p(0, 0) = 1.0;
      p(1, 1) = -1.0;
      break;
  }
  return p;
}

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator spin_operator(Axis axis, int spin_index, int n_spins) {
  hilbert_dim(n_spins);
  if (spin_index < 1 || spin_index > n_spins) {
    throw ValidationError("spin index " + std::to_string(spin_index) + " outside [1, " +
                          std::to_string(n_spins) + "]");
  }
  Operator out = Operator::Identity(1, 1);
  for (int k = 1; k <= n_spins; ++k) {
    out = kron(out, k == spin_index ? Operator(0.5 * pauli(axis)) : identity(2));
  }
  return out;
}

Operator total_spin(Axis axis, int n_spins) {
  const int d = hilbert_dim(n_spins);
  Operator out = Operator::Zero(d, d);
  for (int k = 1; k <= n_spins; ++k) out += spin_operator(axis, k, n_spins);
  return out;
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }
Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

double max_abs(const Eigen::Ref<const Eigen::MatrixXcd>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Operator& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, max_abs(m));
  return max_abs(m - m.adjoint()) <= tol * scale;
}

double unitarity_error(const Operator& u) {
  return max_abs(u.adjoint() * u - identity(u.rows()));
}

Operator exp_hermitian(const Operator& h, double t) {
  if (!is_hermitian(h)) throw ValidationError("exp_hermitian: matrix is not Hermitian");
  // Symmetrize so roundoff in the input cannot leak into the eigenvectors.
  const Operator hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(hs);
  if (es.info() != Eigen::Success) throw NumericalError("exp_hermitian: eigensolver failed");
  Eigen::VectorXcd phases(hs.rows());
  for (Eigen::Index j = 0; j < hs.rows(); ++j) {
    phases(j) = std::exp(-kI * (es.eigenvalues()(j) * t));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

UnitaryEigen eigen_unitary(const Operator& u) {
  Eigen::ComplexSchur<Operator> schur(u);
  if (schur.info() != Eigen::Success) throw NumericalError("eigen_unitary: Schur decomposition failed");
  return {schur.matrixT().diagonal(), schur.matrixU()};
}

Operator log_unitary(const Operator& u, double cut_tol) {
  if (u.rows() != u.cols() || unitarity_error(u) > 1e-8) {
    throw ValidationError("log_unitary: matrix is not unitary");
  }
  const UnitaryEigen eig = eigen_unitary(u);
  Eigen::VectorXcd logs(eig.values.size());
  for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
    const cplx lambda = eig.values(j);
    if (std::abs(lambda + 1.0) < cut_tol) {
      throw BranchCutError("log_unitary: eigenvalue " + std::to_string(j) +
                           " lies on the branch cut at -1");
    }
    logs(j) = kI * std::arg(lambda);
  }
  return eig.vectors * logs.asDiagonal() * eig.vectors.adjoint();
}

LiouvilleVector columnize(const StateMatrix& rho) {
  return Eigen::Map<const LiouvilleVector>(rho.data(), rho.size());
}

StateMatrix decolumnize(const LiouvilleVector& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) {
    throw ValidationError("decolumnize: length " + std::to_string(v.size()) + " is not a square");
  }
  return Eigen::Map<const StateMatrix>(v.data(), n, n);
}

Superoperator superop_of_unitary(const Operator& u) { return kron(u.conjugate(), u); }

StateMatrix traceless(const StateMatrix& rho) {
  return rho - (rho.trace() / static_cast<double>(rho.rows())) * identity(rho.rows());
}

bool PauliProduct::is_identity() const {
  for (int f : factors) {
    if (f != 0) return false;
  }
  return true;
}

std::string PauliProduct::label() const {
  std::string out;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k] == 0) continue;
    if (!out.empty()) out += ' ';
    out += "xyz"[factors[k] - 1];
    out += std::to_string(k + 1);
  }
  return out.empty() ? "I" : out;
}

std::vector<PauliProduct> pauli_products(int n_spins) {
  const int d = hilbert_dim(n_spins);
  const Operator singles[4] = {identity(2), pauli(Axis::x), pauli(Axis::y), pauli(Axis::z)};
  std::vector<PauliProduct> out;
  out.reserve(static_cast<std::size_t>(d) * d);
  for (int code = 0; code < d * d; ++code) {
    PauliProduct p;
    p.factors.resize(n_spins);
    int rest = code;
    for (int k = n_spins - 1; k >= 0; --k) {
      p.factors[k] = rest % 4;
      rest /= 4;
    }
    p.matrix = Operator::Identity(1, 1);
    for (int f : p.factors) p.matrix = kron(p.matrix, singles[f]);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace spinctl
