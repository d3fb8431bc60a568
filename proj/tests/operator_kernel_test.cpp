#include <gtest/gtest.h>

#include "spinctl/errors.hpp"
#include "spinctl/operator_kernel.hpp"
#include "test_support.hpp"

using namespace spinctl;
using spinctl::testing::random_hermitian;
using spinctl::testing::random_unitary;
using spinctl::testing::taylor_exp;

TEST(Dimensions, PowersOfTwo) {
  EXPECT_EQ(hilbert_dim(1), 2);
  EXPECT_EQ(hilbert_dim(3), 8);
  EXPECT_EQ(spins_for_dim(16), 4);
  EXPECT_THROW(hilbert_dim(0), ValidationError);
  EXPECT_THROW(hilbert_dim(13), ValidationError);
  EXPECT_THROW(spins_for_dim(6), ValidationError);
}

TEST(Axis, ParseAndName) {
  EXPECT_EQ(parse_axis('y'), Axis::y);
  EXPECT_EQ(axis_name(Axis::z), 'z');
  EXPECT_THROW(parse_axis('w'), ValidationError);
}

TEST(SpinOperators, AngularMomentumCommutation) {
  for (int n = 1; n <= 3; ++n) {
    for (int k = 1; k <= n; ++k) {
      const Operator ix = spin_operator(Axis::x, k, n);
      const Operator iy = spin_operator(Axis::y, k, n);
      const Operator iz = spin_operator(Axis::z, k, n);
      EXPECT_LT(max_abs(commutator(ix, iy) - kI * iz), 1e-15);
      EXPECT_LT(max_abs(commutator(iy, iz) - kI * ix), 1e-15);
      EXPECT_LT(max_abs(ix * ix + iy * iy + iz * iz - 0.75 * identity(1L << n)), 1e-15);
    }
  }
}

TEST(SpinOperators, DifferentSpinsCommute) {
  EXPECT_LT(max_abs(commutator(spin_operator(Axis::x, 1, 3), spin_operator(Axis::y, 3, 3))), 1e-15);
}

TEST(SpinOperators, FirstSpinIsMostSignificant) {
  // I_z^1 on two spins is diag(1/2, 1/2, -1/2, -1/2).
  const Operator z1 = spin_operator(Axis::z, 1, 2);
  EXPECT_DOUBLE_EQ(z1(1, 1).real(), 0.5);
  EXPECT_DOUBLE_EQ(z1(2, 2).real(), -0.5);
}

TEST(SpinOperators, IndexValidation) {
  EXPECT_THROW(spin_operator(Axis::x, 0, 2), ValidationError);
  EXPECT_THROW(spin_operator(Axis::x, 3, 2), ValidationError);
}

TEST(Kron, MixedProduct) {
  std::mt19937_64 rng(3);
  const Operator a = random_unitary(2, rng), b = random_unitary(4, rng);
  const Operator c = random_unitary(2, rng), d = random_unitary(4, rng);
  EXPECT_LT(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)), 1e-13);
}

TEST(Exp, MatchesTaylorSeries) {
  std::mt19937_64 rng(11);
  for (long d : {2L, 4L, 8L}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Operator h = random_hermitian(d, rng, 3.0);
      EXPECT_LT(max_abs(exp_hermitian(h, 0.7) - taylor_exp(h, 0.7)), 1e-12);
    }
  }
}

TEST(Exp, ClosedFormRotation) {
  // exp(-i theta I_x) = cos(theta/2) I - i sin(theta/2) sigma_x
  const double th = 1.234;
  const Operator expect = std::cos(th / 2) * identity(2) - kI * std::sin(th / 2) * pauli(Axis::x);
  EXPECT_LT(max_abs(exp_hermitian(spin_operator(Axis::x, 1, 1), th) - expect), 1e-15);
}

TEST(Exp, RejectsNonHermitian) {
  Operator m = Operator::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(exp_hermitian(m, 1.0), ValidationError);
}

TEST(Hermitian, RelativeTolerance) {
  Operator m = 1e6 * pauli(Axis::y);
  m(0, 1) += 1e-7;
  EXPECT_TRUE(is_hermitian(m));
  m(0, 1) += 1e-3;
  EXPECT_FALSE(is_hermitian(m));
}

TEST(Log, RoundTripOfExp) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    // Keep the spectrum inside (-pi, pi) so the principal log recovers -iH.
    const Operator h = random_hermitian(4, rng);
    Eigen::SelfAdjointEigenSolver<Operator> es(h);
    const double r = es.eigenvalues().cwiseAbs().maxCoeff();
    const Operator hs = h * (2.5 / r);
    const Operator l = log_unitary(exp_hermitian(hs, 1.0));
    EXPECT_LT(max_abs(l + kI * hs), 1e-11);
    EXPECT_LT(max_abs(l + l.adjoint()), 1e-12);
  }
}

TEST(Log, ExpOfLogIsIdentityMap) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Operator u = random_unitary(8, rng);
    const Operator l = log_unitary(u);
    EXPECT_LT(max_abs(exp_hermitian(kI * l, 1.0) - u), 1e-11);
  }
}

TEST(Log, DegenerateSpectrum) {
  // exp(-i pi/2 sigma_x^1) on three spins has fourfold degenerate eigenvalues.
  const Operator g = kron(pauli(Axis::x), identity(4));
  const Operator u = exp_hermitian(g, kPi / 4);
  EXPECT_LT(max_abs(log_unitary(u) + kI * (kPi / 4) * g), 1e-12);
}

TEST(Log, BranchCut) {
  const Operator u = exp_hermitian(pauli(Axis::z), kPi);  // eigenvalues -1
  EXPECT_THROW(log_unitary(u), BranchCutError);
  EXPECT_THROW(log_unitary(2.0 * identity(2)), ValidationError);
}

TEST(Liouville, ColumnizeRoundTrip) {
  std::mt19937_64 rng(8);
  const Operator rho = random_hermitian(4, rng);
  EXPECT_EQ(decolumnize(columnize(rho)), rho);
  // Column stacking: entry (i, j) sits at j * d + i.
  EXPECT_EQ(columnize(rho)(2 * 4 + 1), rho(1, 2));
  EXPECT_THROW(decolumnize(LiouvilleVector::Zero(5)), ValidationError);
}

TEST(Liouville, UnitarySuperoperatorActsByConjugation) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const Operator u = random_unitary(4, rng);
    const Operator rho = random_hermitian(4, rng);
    const LiouvilleVector lhs = superop_of_unitary(u) * columnize(rho);
    EXPECT_LT(max_abs(decolumnize(lhs) - u * rho * u.adjoint()), 1e-13);
  }
}

TEST(Traceless, Idempotent) {
  std::mt19937_64 rng(10);
  const Operator rho = random_hermitian(8, rng);
  const Operator t1 = traceless(rho);
  EXPECT_LT(std::abs(t1.trace()), 1e-13);
  EXPECT_LT(max_abs(traceless(t1) - t1), 1e-15);
}

TEST(Pauli, ProductsAreOrthogonal) {
  const auto basis = pauli_products(2);
  ASSERT_EQ(basis.size(), 16u);
  EXPECT_TRUE(basis.front().is_identity());
  EXPECT_EQ(basis.front().label(), "I");
  for (std::size_t a = 0; a < basis.size(); ++a) {
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const cplx ip = (basis[a].matrix.adjoint() * basis[b].matrix).trace();
      EXPECT_NEAR(std::abs(ip), a == b ? 4.0 : 0.0, 1e-14);
    }
  }
}

TEST(Pauli, LabelsAndOrdering) {
  const auto basis = pauli_products(3);
  EXPECT_EQ(basis[1].label(), "x3");
  EXPECT_EQ(basis[16].label(), "x1");
  EXPECT_EQ(basis[16 + 12 + 3].label(), "x1 z2 z3");
}
