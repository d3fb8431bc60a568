#pragma once

// Dense complex linear algebra for small spin-1/2 systems.
//
// Conventions:
//   * Hilbert-space dimension is 2^N for N spins; spin indices are 1-based.
//   * Liouville vectors stack the columns of a matrix, so the superoperator of
//     rho -> U rho U^dagger is conj(U) (x) U.
//   * Hamiltonians are in rad/s.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace spinctl {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;        // 2^N x 2^N
using StateMatrix = Eigen::MatrixXcd;     // density matrix or its deviation part
using Superoperator = Eigen::MatrixXcd;   // 4^N x 4^N
using LiouvilleVector = Eigen::VectorXcd; // 4^N

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

enum class Axis { x, y, z };

char axis_name(Axis a);
Axis parse_axis(char c);

// 2^n, validating n >= 1.
int hilbert_dim(int n_spins);
// Inverse of hilbert_dim; throws if dim is not a power of two >= 2.
int spins_for_dim(long dim);

Operator identity(long dim);
Operator pauli(Axis a);
Operator kron(const Operator& a, const Operator& b);

// I (x) ... (x) sigma_axis/2 (x) ... (x) I with the spin-1/2 factor at spin_index.
Operator spin_operator(Axis axis, int spin_index, int n_spins);
// Sum of spin_operator over all spins.
Operator total_spin(Axis axis, int n_spins);

Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

// Largest entry magnitude.
double max_abs(const Eigen::Ref<const Eigen::MatrixXcd>& m);
// max|M - M^dagger| <= tol * max(1, max|M|).
bool is_hermitian(const Operator& m, double tol = 1e-12);
// max|U^dagger U - I|.
double unitarity_error(const Operator& u);

// exp(-i H t) through the eigendecomposition of H. Rejects non-Hermitian H.
Operator exp_hermitian(const Operator& h, double t);

// Principal logarithm of a unitary: V diag(i arg(lambda_j)) V^dagger with arg in
// (-pi, pi]. The result is anti-Hermitian. Throws BranchCutError when an
// eigenvalue lies within `cut_tol` of -1.
Operator log_unitary(const Operator& u, double cut_tol = 1e-8);

// Unitary eigendecomposition through the complex Schur form, which is
// diagonal for normal matrices and so yields orthonormal eigenvectors even
// for degenerate eigenvalues.
struct UnitaryEigen {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // columns
};
UnitaryEigen eigen_unitary(const Operator& u);

LiouvilleVector columnize(const StateMatrix& rho);
StateMatrix decolumnize(const LiouvilleVector& v);

// conj(U) (x) U.
Superoperator superop_of_unitary(const Operator& u);

// rho - (tr rho / dim) I.
StateMatrix traceless(const StateMatrix& rho);

// Tensor products of {I, sigma_x, sigma_y, sigma_z}; `factors[k]` is 0 for the
// identity and 1..3 for x, y, z on spin k+1.
struct PauliProduct {
  std::vector<int> factors;
  Operator matrix;

  bool is_identity() const;
  // e.g. "x1 z3", or "I" for the identity.
  std::string label() const;
};

// All 4^N products, identity first, ordered with spin 1 as the most
// significant digit.
std::vector<PauliProduct> pauli_products(int n_spins);

}  // namespace spinctl
