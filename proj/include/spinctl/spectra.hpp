#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "spinctl/ensemble.hpp"
#include "spinctl/operator_kernel.hpp"
#include "spinctl/propagator.hpp"
#include "spinctl/spin_system.hpp"

namespace spinctl {

using Spectrum = std::vector<cplx>;

// All eigenvalues of a (generally non-normal) superoperator, sorted by phase
// and then by modulus.
Spectrum exact_spectrum(const Superoperator& s);

// Mean of 1 - |lambda| over the spectrum.
double mean_unit_circle_distance(const Spectrum& spectrum);

// Common phase alpha that moves -1 to the middle of the widest gap in the
// spectrum of exp(i alpha) U. Global phases do not change the channel, and
// this keeps the principal logarithm away from its branch cut.
double branch_safe_phase(const Operator& u);

// Per-bin effective Hamiltonian perturbations K_k = i (log U_k - log U_0) / t
// about a reference propagator U_0 = exp(-i H_0 t).
struct PerturbationDecomposition {
  double t = 0.0;                 // s
  double global_phase = 0.0;      // applied to U_0 and every U_k before the logs
  Operator u0;                    // exp(i global_phase) times the reference
  Operator h0;                    // rad/s
  std::vector<Operator> k;        // rad/s, one per Kraus element
  Eigen::VectorXd phases;         // phi_j in rad/s, eigenvalues of U_0 are exp(-i phi_j t)
  Operator vectors;               // columns |phi_j>
  int reference_index = -1;       // -1 when U_0 was supplied explicitly
  bool degenerate = false;        // two eigenvalues of U_0 closer than 1e-6

  long dim() const { return u0.rows(); }
};

// U_0 is the element at `reference_index`.
PerturbationDecomposition extract_perturbations(const KrausSet& ks, int reference_index, double t);
// U_0 supplied directly (for example the propagator at the mean RF scale).
PerturbationDecomposition extract_perturbations(const KrausSet& ks, const Operator& u0, double t);

// First-order eigenvalues of sum_k p_k conj(U_k) (x) U_k:
//   lambda_jm = exp(-i (phi_j - phi_m) t) sum_k p_k exp(-i (K_k,jj - K_k,mm) t)
// indexed j * d + m.
struct PerturbativeSpectrum {
  Spectrum values;
  Spectrum unperturbed;            // exp(-i (phi_j - phi_m) t)
  std::vector<bool> degenerate;    // j != m with coinciding U_0 eigenvalues
};

PerturbativeSpectrum perturbative_spectrum(const PerturbationDecomposition& pd,
                                           const std::vector<double>& weights);

struct SpectrumReport {
  Spectrum exact;
  Spectrum approx;
  std::vector<int> pairing;  // pairing[i] is the approx index matched to exact[i]
  // |lambda_exact - lambda_approx| over pairs.
  double max_modulus_deviation = 0.0;
  double mean_modulus_deviation = 0.0;
  // |arg(lambda_exact / lambda_approx)| over pairs not marked degenerate.
  double max_phase_deviation = 0.0;
  double mean_phase_deviation = 0.0;
  int excluded_pairs = 0;
};

// Greedy nearest-neighbour pairing in the complex plane. Approx entries flagged
// in `excluded` still take part in the pairing but not in phase statistics.
SpectrumReport match_spectra(const Spectrum& exact, const Spectrum& approx,
                             const std::vector<bool>& excluded = {});

struct EigenShift {
  int j = 0;
  int m = 0;
  cplx ratio;                 // lambda_jm / unperturbed_jm
  double phase_shift = 0.0;   // arg(ratio)
  double attenuation = 0.0;   // 1 - |ratio|
};

struct SymmetricProfileReport {
  std::vector<EigenShift> shifts;
  double max_phase_deviation = 0.0;
  double max_attenuation = 0.0;
  double max_imaginary = 0.0;  // max |Im ratio|
  // Spearman correlation of |phase shift| against attenuation; empty when
  // either is constant.
  std::optional<double> rank_correlation;
};

// Per-eigenvalue shifts of the first-order spectrum relative to U_0.
std::vector<EigenShift> eigen_shifts(const PerturbativeSpectrum& ps, long dim);

// First-order spectrum of `seq` under a symmetric profile, with U_0 taken at
// the mean scale. For one spin with every segment on resonance at a single
// phase the perturbations all commute, and the zero phase shift and real
// ratios are checked to 1e-9 (NumericalError otherwise).
SymmetricProfileReport symmetric_profile_test(const SpinSystem& sys, const PulseSequence& seq,
                                              const RfDistribution& dist);

std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b);

struct ContributionReport {
  std::vector<PauliProduct> contributing;  // non-identity products
  std::size_t count = 0;
  // Rank of the span of their diagonals in the product eigenbasis.
  std::size_t independent_diagonals = 0;
  // Largest |diagonal element| over the products that anticommute with H_0.
  double max_anticommuting_diagonal = 0.0;
};

// Pauli products whose diagonal in the eigenbasis of U_0 = exp(-i G) can be
// nonzero. G must be a real multiple of one non-identity Pauli product; other
// generators throw ValidationError.
ContributionReport contribution_count(const Operator& generator, int n_spins);

struct FourierSample {
  int j = 0;
  int m = 0;
  double psi = 0.0;        // <j|K|j> - <m|K|m>
  cplx ratio;              // first-order lambda_jm / unperturbed
  cplx direct;             // sum_k p_k exp(-i psi (f_k - f_ref) t)
};

// First-order spectrum under K_k = (f_k - f_ref) K, with K in rad/s per unit
// RF scale, against the direct Fourier sum of the profile.
std::vector<FourierSample> fourier_probe(const RfDistribution& dist, const Operator& k_direction,
                                         const Operator& u0, double t, double ref_scale);

// Least-squares weights on the scale grid `scales` from samples
// ratio_s = sum_k p_k exp(-i psi_s (f_k - f_ref) t). Throws ValidationError
// when there are fewer distinct psi values than grid points or the system is
// rank deficient.
std::vector<double> reconstruct_profile(const std::vector<double>& psi, const std::vector<cplx>& ratios,
                                        const std::vector<double>& scales, double ref_scale, double t);

}  // namespace spinctl
