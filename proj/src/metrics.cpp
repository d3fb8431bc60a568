#include "spinctl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "spinctl/errors.hpp"

namespace spinctl {

namespace {

void check_same_shape(const StateMatrix& a, const StateMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw ValidationError("metrics: state dimensions differ");
  }
}

// Hermitian inputs make these traces real.
double overlap(const StateMatrix& a, const StateMatrix& b) { return (a * b).trace().real(); }
double norm2(const StateMatrix& a) { return overlap(a, a); }

constexpr double kVanishing = 1e-24;

}  // namespace

double correlation(const StateMatrix& ideal, const StateMatrix& out) {
  check_same_shape(ideal, out);
  const StateMatrix a = traceless(ideal);
  const StateMatrix b = traceless(out);
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na <= kVanishing || nb <= kVanishing * std::max(1.0, na)) {
    throw UndefinedCorrelation("correlation: traceless part vanishes");
  }
  return std::clamp(overlap(a, b) / std::sqrt(na * nb), -1.0, 1.0);
}

double attenuation(const StateMatrix& out, const StateMatrix& in) {
  check_same_shape(out, in);
  const double nin = norm2(traceless(in));
  if (nin <= kVanishing) throw UndefinedCorrelation("attenuation: input has no traceless part");
  return std::sqrt(norm2(traceless(out)) / nin);
}

double attenuated_correlation(const StateMatrix& ideal, const StateMatrix& out,
                              const StateMatrix& in) {
  check_same_shape(ideal, out);
  check_same_shape(ideal, in);
  const StateMatrix a = traceless(ideal);
  const double na = norm2(a);
  const double nin = norm2(traceless(in));
  if (na <= kVanishing || nin <= kVanishing) {
    throw UndefinedCorrelation("attenuated correlation: ideal or input traceless part vanishes");
  }
  return overlap(a, traceless(out)) / std::sqrt(na * nin);
}

double gate_fidelity_basis_average(const Operator& u_ideal, const KrausSet& ks) {
  const long d = ks.dim();
  if (u_ideal.rows() != d || u_ideal.cols() != d) {
    throw ValidationError("gate fidelity: ideal gate and channel dimensions differ");
  }
  const int n = spins_for_dim(d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  double sum = 0.0;
  const auto basis = pauli_products(n);
  for (const auto& p : basis) {
    if (p.is_identity()) {
      sum += 1.0;
      continue;
    }
    const StateMatrix rho = norm * p.matrix;
    const StateMatrix ideal = u_ideal * rho * u_ideal.adjoint();
    sum += attenuated_correlation(ideal, apply_kraus(ks, rho), rho);
  }
  return sum / static_cast<double>(basis.size());
}

double gate_fidelity_trace(const Operator& u_ideal, const KrausSet& ks) {
  const long d = ks.dim();
  if (u_ideal.rows() != d || u_ideal.cols() != d) {
    throw ValidationError("gate fidelity: ideal gate and channel dimensions differ");
  }
  double f = 0.0;
  for (std::size_t k = 0; k < ks.size(); ++k) {
    // tr(A^dagger B) without forming the product.
    const cplx tr = u_ideal.conjugate().cwiseProduct(ks.unitaries[k]).sum();
    f += ks.weights[k] * std::norm(tr);
  }
  return f / static_cast<double>(d * d);
}

MetricReport metric_report(const StateMatrix& ideal, const StateMatrix& out, const StateMatrix& in) {
  MetricReport r;
  r.attenuation = attenuation(out, in);
  r.attenuated_correlation = attenuated_correlation(ideal, out, in);
  try {
    r.correlation = correlation(ideal, out);
  } catch (const UndefinedCorrelation&) {
    r.correlation.reset();
  }
  const double product = r.correlation ? *r.correlation * r.attenuation : 0.0;
  if (std::abs(product - r.attenuated_correlation) > 1e-12) {
    throw NumericalError("metric report: C_A differs from C * A");
  }
  return r;
}

}  // namespace spinctl
