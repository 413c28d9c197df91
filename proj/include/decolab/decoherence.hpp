#pragma once

#include <vector>

#include "decolab/model.hpp"
#include "decolab/states.hpp"

namespace decolab {

enum class SystemKind { qubit, oscillator, custom };

// Everything needed to evaluate one coherence factor I_kl(b, b') at time
// dtau, or to scan a family of them over dtau. For the qubit, indices (0, 1)
// mean (+, -). For the oscillator, k and l are level numbers. For custom
// systems, k and l index spectrum.eigenvalues.
struct DecoherenceFactorSpec {
  SystemKind kind = SystemKind::qubit;
  MeasurementConfig cfg;
  BandLimitedState probe;
  double omega = 0.0;     // oscillator only
  int k = 0;
  int l = 1;
  SpectrumSpec spectrum;  // custom only
  double b = 0.0;
  double b_prime = 0.0;
  double dtau = 0.0;
};

// Eigenvalue of the measured observable for index i under spec.kind.
double eigenvalue_of(const DecoherenceFactorSpec& spec, int i);

// Smallest positive eigenvalue gap of the family's system kind.
double min_gap_of(const DecoherenceFactorSpec& family);

// Oracle: Int dq e^{-i alpha g0 dtau (a_k - a_l) q / hbar}
//                 psi(q - c b) conj(psi(q - c b')),  c = 2 lambda/(alpha g0 dtau).
complexd I_quadrature(const DecoherenceFactorSpec& spec);

// Closed form for any sinc probe, written against the carrier variables
// w = alpha g0 dtau (a_k - a_l)/hbar and c above:
//   |w| >= 2 kappa0            -> exactly 0 (inclusive)
//   0 <= w < 2 kappa0          -> (1 - w/2kappa0) sinc((kappa0 - w/2) c (b-b'))
//                                  e^{-i w c (b+b')/2}
//   w < 0                      -> conjugate of the value at -w
// The b = b' diagonal is regular here; the sinc factor absorbs it.
complexd I_sinc_closed(const MeasurementConfig& cfg, double probe_band,
                       double w, double b, double b_prime, double dtau);

// I_{+-} for the two-level system (gap hbar): w = alpha g0 dtau.
complexd I_qubit_closed(const MeasurementConfig& cfg, double b, double b_prime,
                        double dtau);

// Harmonic levels: w = alpha g0 dtau omega (k - l); vanishes inclusively once
// omega alpha g0 |k - l| dtau >= 2 kappa0.
complexd I_oscillator_closed(const MeasurementConfig& cfg, double omega, int k,
                             int l, double b, double b_prime, double dtau);

struct ThresholdScanResult {
  double first_dtau = 0.0;       // first grid time with all samples below tol
  double analytic = 0.0;         // closed-form threshold for comparison
  double max_abs_at_first = 0.0; // largest sampled magnitude at that grid time
};

// Scans |I_kl(b,b')| over dtau_grid at a fixed seeded set of (b, b') pairs
// spanning +-3/b0 and all distinct index pairs of the family; returns the
// first grid time at which every sample is below tol. Throws NotReached
// (carrying the final max magnitude) if the grid ends first.
ThresholdScanResult decoherence_threshold_scan(const DecoherenceFactorSpec& family,
                                               const std::vector<double>& dtau_grid,
                                               double tol = 1e-8);

// Shared sampling policy for threshold scans: n seeded pairs spanning
// +-span, plus the index pairs of the family's system kind.
std::vector<std::pair<double, double>> scan_sample_pairs(double span, int n = 5);
std::vector<std::pair<int, int>> scan_index_pairs(const DecoherenceFactorSpec& family);

}  // namespace decolab
