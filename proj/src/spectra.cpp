#include "spinctl/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "spinctl/errors.hpp"

namespace spinctl {

namespace {

constexpr double kDegenerateTol = 1e-6;

double wrap_phase(double a) {
  a = std::remainder(a, kTwoPi);
  return a == -kPi ? kPi : a;
}

bool phase_less(const cplx& a, const cplx& b) {
  const double pa = std::arg(a), pb = std::arg(b);
  if (pa != pb) return pa < pb;
  return std::abs(a) < std::abs(b);
}

}  // namespace

double branch_safe_phase(const Operator& u) {
  const UnitaryEigen eig = eigen_unitary(u);
  std::vector<double> a;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) a.push_back(std::arg(eig.values(i)));
  std::sort(a.begin(), a.end());
  double best_gap = -1.0, mid = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double lo = a[i];
    const double hi = i + 1 < a.size() ? a[i + 1] : a.front() + kTwoPi;
    if (hi - lo > best_gap) {
      best_gap = hi - lo;
      mid = 0.5 * (lo + hi);
    }
  }
  return wrap_phase(kPi - mid);
}

Spectrum exact_spectrum(const Superoperator& s) {
  if (s.rows() != s.cols() || s.rows() == 0) throw ValidationError("exact_spectrum: square matrix required");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(s, false);
  if (solver.info() != Eigen::Success) throw NumericalError("exact_spectrum: eigensolver failed");
  Spectrum out(solver.eigenvalues().data(), solver.eigenvalues().data() + s.rows());
  std::sort(out.begin(), out.end(), phase_less);
  return out;
}

double mean_unit_circle_distance(const Spectrum& spectrum) {
  if (spectrum.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& l : spectrum) sum += 1.0 - std::abs(l);
  return sum / static_cast<double>(spectrum.size());
}

PerturbationDecomposition extract_perturbations(const KrausSet& ks, const Operator& u0, double t) {
  ks.validate();
  if (!(t > 0.0)) throw ValidationError("extract_perturbations: t must be positive");
  if (u0.rows() != ks.dim() || u0.cols() != ks.dim()) {
    throw ValidationError("extract_perturbations: reference dimension mismatch");
  }
  PerturbationDecomposition pd;
  pd.t = t;
  pd.global_phase = branch_safe_phase(u0);
  const cplx shift = std::exp(kI * pd.global_phase);
  pd.u0 = shift * u0;
  const Operator log0 = log_unitary(pd.u0);
  pd.h0 = kI * log0 / t;
  pd.h0 = 0.5 * (pd.h0 + pd.h0.adjoint()).eval();

  const UnitaryEigen eig = eigen_unitary(pd.u0);
  pd.vectors = eig.vectors;
  const long d = u0.rows();
  pd.phases.resize(d);
  for (long j = 0; j < d; ++j) pd.phases(j) = -std::arg(eig.values(j)) / t;
  for (long j = 0; j < d && !pd.degenerate; ++j) {
    for (long m = j + 1; m < d; ++m) {
      if (std::abs(eig.values(j) - eig.values(m)) < kDegenerateTol) {
        pd.degenerate = true;
        break;
      }
    }
  }

  for (const auto& u : ks.unitaries) {
    Operator k = kI * (log_unitary(shift * u) - log0) / t;
    pd.k.push_back(0.5 * (k + k.adjoint()));
  }
  return pd;
}

PerturbationDecomposition extract_perturbations(const KrausSet& ks, int reference_index, double t) {
  if (reference_index < 0 || static_cast<std::size_t>(reference_index) >= ks.size()) {
    throw ValidationError("extract_perturbations: reference index out of range");
  }
  PerturbationDecomposition pd = extract_perturbations(ks, ks.unitaries[reference_index], t);
  pd.reference_index = reference_index;
  pd.k[reference_index].setZero();
  return pd;
}

PerturbativeSpectrum perturbative_spectrum(const PerturbationDecomposition& pd,
                                           const std::vector<double>& weights) {
  if (weights.size() != pd.k.size()) {
    throw ValidationError("perturbative_spectrum: weight count does not match perturbation count");
  }
  const long d = pd.dim();
  const double t = pd.t;
  // diag[k](j) = <phi_j|K_k|phi_j>
  std::vector<Eigen::VectorXd> diag;
  for (const auto& k : pd.k) {
    diag.push_back((pd.vectors.adjoint() * k * pd.vectors).diagonal().real());
  }
  std::vector<cplx> mu(d);
  for (long j = 0; j < d; ++j) mu[j] = std::exp(-kI * pd.phases(j) * t);

  PerturbativeSpectrum out;
  out.values.resize(d * d);
  out.unperturbed.resize(d * d);
  out.degenerate.assign(d * d, false);
  for (long j = 0; j < d; ++j) {
    for (long m = 0; m < d; ++m) {
      cplx sum = 0.0;
      for (std::size_t k = 0; k < pd.k.size(); ++k) {
        sum += weights[k] * std::exp(-kI * (diag[k](j) - diag[k](m)) * t);
      }
      const cplx base = std::exp(-kI * (pd.phases(j) - pd.phases(m)) * t);
      out.unperturbed[j * d + m] = base;
      out.values[j * d + m] = base * sum;
      out.degenerate[j * d + m] = j != m && std::abs(mu[j] - mu[m]) < kDegenerateTol;
    }
  }
  return out;
}

SpectrumReport match_spectra(const Spectrum& exact, const Spectrum& approx,
                             const std::vector<bool>& excluded) {
  if (exact.size() != approx.size()) throw ValidationError("match_spectra: spectra differ in length");
  if (!excluded.empty() && excluded.size() != approx.size()) {
    throw ValidationError("match_spectra: exclusion mask length mismatch");
  }
  const std::size_t n = exact.size();
  SpectrumReport r;
  r.exact = exact;
  r.approx = approx;
  r.pairing.assign(n, -1);
  if (n == 0) return r;

  struct Candidate {
    double dist;
    double phase;
    std::size_t i, a;
  };
  std::vector<Candidate> cands;
  cands.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      cands.push_back({std::abs(exact[i] - approx[a]), std::arg(exact[i]), i, a});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    return x.phase < y.phase;
  });
  std::vector<bool> used(n, false);
  std::size_t assigned = 0;
  for (const auto& c : cands) {
    if (r.pairing[c.i] >= 0 || used[c.a]) continue;
    r.pairing[c.i] = static_cast<int>(c.a);
    used[c.a] = true;
    if (++assigned == n) break;
  }

  double mod_sum = 0.0, phase_sum = 0.0;
  std::size_t phase_n = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = static_cast<std::size_t>(r.pairing[i]);
    const double dm = std::abs(exact[i] - approx[a]);
    r.max_modulus_deviation = std::max(r.max_modulus_deviation, dm);
    mod_sum += dm;
    if (!excluded.empty() && excluded[a]) {
      ++r.excluded_pairs;
      continue;
    }
    const double dp = std::abs(wrap_phase(std::arg(exact[i]) - std::arg(approx[a])));
    r.max_phase_deviation = std::max(r.max_phase_deviation, dp);
    phase_sum += dp;
    ++phase_n;
  }
  r.mean_modulus_deviation = mod_sum / static_cast<double>(n);
  r.mean_phase_deviation = phase_n ? phase_sum / static_cast<double>(phase_n) : 0.0;
  return r;
}

std::vector<EigenShift> eigen_shifts(const PerturbativeSpectrum& ps, long dim) {
  std::vector<EigenShift> out;
  for (long j = 0; j < dim; ++j) {
    for (long m = 0; m < dim; ++m) {
      const std::size_t i = static_cast<std::size_t>(j * dim + m);
      EigenShift s;
      s.j = static_cast<int>(j);
      s.m = static_cast<int>(m);
      s.ratio = ps.values[i] / ps.unperturbed[i];
      s.phase_shift = std::arg(s.ratio);
      s.attenuation = 1.0 - std::abs(s.ratio);
      out.push_back(s);
    }
  }
  return out;
}

std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ValidationError("spearman: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) return std::nullopt;
  auto ranks = [n](const std::vector<double>& x) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto p, auto q) { return x[p] < x[q]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t k = i;
      while (k + 1 < n && x[idx[k + 1]] == x[idx[i]]) ++k;
      const double avg = 0.5 * static_cast<double>(i + k) + 1.0;
      for (std::size_t q = i; q <= k; ++q) r[idx[q]] = avg;
      i = k + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

namespace {

bool commuting_one_spin_case(const SpinSystem& sys, const PulseSequence& seq) {
  if (sys.n_spins() != 1 || sys.offsets_hz()[0] != 0.0) return false;
  const double phase0 = seq.segments.front().phase_rad;
  for (const auto& s : seq.segments) {
    if (s.carrier_offset_hz != 0.0) return false;
    if (std::abs(wrap_phase(s.phase_rad - phase0)) > 1e-15) return false;
  }
  return true;
}

}  // namespace

SymmetricProfileReport symmetric_profile_test(const SpinSystem& sys, const PulseSequence& seq,
                                              const RfDistribution& dist) {
  if (!dist.is_symmetric(1e-12)) {
    throw ValidationError("symmetric_profile_test: distribution is not symmetric about its mean");
  }
  seq.validate();
  const Propagator prop(sys);
  const KrausSet ks = kraus_set(prop, seq, dist);
  const Operator u0 = prop.sequence(seq, dist.mean_scale());
  const PerturbationDecomposition pd = extract_perturbations(ks, u0, seq.total_duration());
  const PerturbativeSpectrum ps = perturbative_spectrum(pd, ks.weights);

  SymmetricProfileReport r;
  r.shifts = eigen_shifts(ps, pd.dim());
  std::vector<double> abs_phase, atten;
  for (const auto& s : r.shifts) {
    r.max_phase_deviation = std::max(r.max_phase_deviation, std::abs(s.phase_shift));
    r.max_attenuation = std::max(r.max_attenuation, s.attenuation);
    r.max_imaginary = std::max(r.max_imaginary, std::abs(s.ratio.imag()));
    abs_phase.push_back(std::abs(s.phase_shift));
    atten.push_back(s.attenuation);
  }
  r.rank_correlation = spearman(abs_phase, atten);

  if (commuting_one_spin_case(sys, seq) && (r.max_phase_deviation > 1e-9 || r.max_imaginary > 1e-9)) {
    throw NumericalError("symmetric_profile_test: commuting one-spin case shows a phase shift of " +
                         std::to_string(r.max_phase_deviation));
  }
  return r;
}

ContributionReport contribution_count(const Operator& generator, int n_spins) {
  const int d = hilbert_dim(n_spins);
  if (generator.rows() != d || generator.cols() != d) {
    throw ValidationError("contribution_count: generator dimension mismatch");
  }
  const auto basis = pauli_products(n_spins);
  // Expansion coefficients tr(P G) / d; exactly one non-identity entry may be nonzero.
  const double scale = std::max(1.0, max_abs(generator));
  const PauliProduct* axis = nullptr;
  for (const auto& p : basis) {
    const cplx c = (p.matrix.adjoint() * generator).trace() / static_cast<double>(d);
    if (std::abs(c) <= 1e-12 * scale) continue;
    if (p.is_identity() || axis != nullptr || std::abs(c.imag()) > 1e-12 * scale) {
      throw ValidationError("contribution_count: generator must be a real multiple of one Pauli product");
    }
    axis = &p;
  }
  if (axis == nullptr) throw ValidationError("contribution_count: generator is zero");

  // Product eigenbasis of the axis operator: sigma_a eigenvectors where it acts,
  // the computational basis elsewhere.
  Operator v = Operator::Identity(1, 1);
  for (int f : axis->factors) {
    Operator local = Operator::Identity(2, 2);
    if (f != 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(pauli(static_cast<Axis>(f - 1)));
      local = es.eigenvectors();
    }
    v = kron(v, local);
  }

  ContributionReport r;
  Eigen::MatrixXd diagonals(d, 0);
  for (const auto& p : basis) {
    if (p.is_identity()) continue;
    const Eigen::VectorXd dg = (v.adjoint() * p.matrix * v).diagonal().real();
    const bool anticommutes = max_abs(anticommutator(p.matrix, axis->matrix)) < 1e-12;
    if (anticommutes) {
      r.max_anticommuting_diagonal =
          std::max(r.max_anticommuting_diagonal, (v.adjoint() * p.matrix * v).diagonal().cwiseAbs().maxCoeff());
      continue;
    }
    r.contributing.push_back(p);
    diagonals.conservativeResize(Eigen::NoChange, diagonals.cols() + 1);
    diagonals.col(diagonals.cols() - 1) = dg;
  }
  r.count = r.contributing.size();
  if (diagonals.cols() > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(diagonals);
    qr.setThreshold(1e-10);
    r.independent_diagonals = static_cast<std::size_t>(qr.rank());
  }
  return r;
}

std::vector<FourierSample> fourier_probe(const RfDistribution& dist, const Operator& k_direction,
                                         const Operator& u0, double t, double ref_scale) {
  if (!is_hermitian(k_direction)) throw ValidationError("fourier_probe: K must be Hermitian");
  if (k_direction.rows() != u0.rows()) throw ValidationError("fourier_probe: K and U_0 dimensions differ");
  if (!(t > 0.0)) throw ValidationError("fourier_probe: t must be positive");

  PerturbationDecomposition pd;
  pd.t = t;
  pd.u0 = u0;
  const UnitaryEigen eig = eigen_unitary(u0);
  pd.vectors = eig.vectors;
  pd.phases.resize(u0.rows());
  for (long j = 0; j < u0.rows(); ++j) pd.phases(j) = -std::arg(eig.values(j)) / t;
  std::vector<double> weights;
  for (const auto& b : dist.bins()) {
    pd.k.push_back((b.scale - ref_scale) * k_direction);
    weights.push_back(b.weight);
  }
  const PerturbativeSpectrum ps = perturbative_spectrum(pd, weights);
  const Eigen::VectorXd kd = (pd.vectors.adjoint() * k_direction * pd.vectors).diagonal().real();

  std::vector<FourierSample> out;
  const long d = u0.rows();
  for (long j = 0; j < d; ++j) {
    for (long m = 0; m < d; ++m) {
      FourierSample s;
      s.j = static_cast<int>(j);
      s.m = static_cast<int>(m);
      s.psi = kd(j) - kd(m);
      s.ratio = ps.values[j * d + m] / ps.unperturbed[j * d + m];
      for (const auto& b : dist.bins()) s.direct += b.weight * std::exp(-kI * s.psi * (b.scale - ref_scale) * t);
      out.push_back(s);
    }
  }
  return out;
}

std::vector<double> reconstruct_profile(const std::vector<double>& psi, const std::vector<cplx>& ratios,
                                        const std::vector<double>& scales, double ref_scale, double t) {
  if (psi.size() != ratios.size()) throw ValidationError("reconstruct_profile: psi and ratio counts differ");
  if (scales.empty()) throw ValidationError("reconstruct_profile: empty scale grid");
  std::set<double> distinct;
  for (double p : psi) {
    if (std::none_of(distinct.begin(), distinct.end(), [&](double q) { return std::abs(p - q) < 1e-12; })) {
      distinct.insert(p);
    }
  }
  if (distinct.size() < scales.size()) {
    throw ValidationError("reconstruct_profile: insufficient distinct psi samples (" +
                          std::to_string(distinct.size()) + " for " + std::to_string(scales.size()) +
                          " grid points)");
  }
  const long ns = static_cast<long>(psi.size());
  const long nk = static_cast<long>(scales.size());
  Eigen::MatrixXd a(2 * ns, nk);
  Eigen::VectorXd b(2 * ns);
  for (long s = 0; s < ns; ++s) {
    for (long k = 0; k < nk; ++k) {
      const cplx e = std::exp(-kI * psi[s] * (scales[k] - ref_scale) * t);
      a(2 * s, k) = e.real();
      a(2 * s + 1, k) = e.imag();
    }
    b(2 * s) = ratios[s].real();
    b(2 * s + 1) = ratios[s].imag();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < nk) {
    throw ValidationError("reconstruct_profile: insufficient distinct psi samples (rank " +
                          std::to_string(qr.rank()) + " < " + std::to_string(nk) + ")");
  }
  const Eigen::VectorXd p = qr.solve(b);
  return std::vector<double>(p.data(), p.data() + nk);
}

}  // namespace spinctl
