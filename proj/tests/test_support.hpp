#pragma once

#include <random>

#include "spinctl/ensemble.hpp"
#include "spinctl/operator_kernel.hpp"
#include "spinctl/propagator.hpp"
#include "spinctl/spin_system.hpp"

namespace spinctl::testing {

inline Operator random_hermitian(long d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g;
  Operator a(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
  return scale * 0.5 * (a + a.adjoint());
}

inline Operator random_unitary(long d, std::mt19937_64& rng) {
  return exp_hermitian(random_hermitian(d, rng, 2.0), 1.0);
}

inline KrausSet random_kraus(long d, std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  KrausSet ks;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    ks.weights.push_back(u(rng));
    total += ks.weights.back();
    ks.unitaries.push_back(random_unitary(d, rng));
  }
  for (auto& w : ks.weights) w /= total;
  return ks;
}

inline SpinSystem random_system(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> off(-3000.0, 3000.0), jj(-60.0, 60.0);
  std::vector<double> offsets;
  for (int i = 0; i < n; ++i) offsets.push_back(off(rng));
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) j(a, b) = j(b, a) = jj(rng);
  return SpinSystem(offsets, j);
}

inline PulseSequence random_sequence(std::size_t m, std::mt19937_64& rng, double tau_lo = 5e-6,
                                     double tau_hi = 2e-5) {
  std::uniform_real_distribution<double> tau(tau_lo, tau_hi), amp(0.0, 2e4), ph(0.0, 6.283185307179586),
      car(-5000.0, 5000.0);
  PulseSequence s;
  for (std::size_t i = 0; i < m; ++i) s.segments.push_back({tau(rng), amp(rng), ph(rng), car(rng)});
  return s;
}

// exp(-i H t) by Taylor series with scaling and squaring; independent of the
// eigendecomposition used in the library.
inline Operator taylor_exp(const Operator& h, double t) {
  const Operator a = cplx(0.0, -t) * h;
  int squarings = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  const Operator b = a / std::pow(2.0, squarings);
  Operator term = Operator::Identity(h.rows(), h.cols());
  Operator sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

}  // namespace spinctl::testing
