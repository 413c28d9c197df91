#pragma once

#include <utility>
#include <vector>

#include "decolab/decoherence.hpp"
#include "decolab/model.hpp"
#include "decolab/states.hpp"

namespace decolab {

// <b|rho_k|b'> for the pointer state conditioned on eigenvalue a_k:
// Phi(b) conj(Phi(b')) F(b - b') e^{i lambda a_k (b - b')/hbar}.
complexd pointer_state_kernel(const MeasurementConfig& cfg,
                              const BandLimitedState& probe,
                              const BandLimitedState& pointer, double a_k,
                              double dtau, double b, double b_prime);

// Oracle: Int db'' e^{-i lambda (a_k - a_l) b''/hbar} |Phi(b'')|^2
//                  F(b - b'') F(b'' - b').
complexd S_quadrature(const MeasurementConfig& cfg, const BandLimitedState& probe,
                      const BandLimitedState& pointer, double a_k, double a_l,
                      double dtau, double b, double b_prime);

// Closed form for sinc probe and sinc pointer, parameterized by
// lambda_gap = lambda (a_k - a_l)/hbar. Production evaluator: the integral is
// rewritten over the overlap of the two F spectra, where the spectral weight
// is a triangle T(sigma) on [lambda_gap - 2 b0, lambda_gap + 2 b0] truncated
// at 2K, K = 2 lambda kappa0/(alpha g0 dtau). With
// R(x) = Int T(sigma) e^{-i sigma x} dsigma the value is
//   S = [e^{iKd} R(b) - e^{-iKd} R(b')] / (i d) / (4 K^2 b0),  d = b - b',
// which is manifestly regular at b = 0 and b' = 0; the b = b' diagonal is
// filled with the analytic expansion through the third derivative of R.
// Exactly 0 once 2K <= lambda_gap - 2 b0 (at and beyond orthogonality time).
complexd S_sinc_closed(const MeasurementConfig& cfg, double pointer_band,
                       double lambda_gap, double dtau, double b, double b_prime);

// Two-level system: lambda_gap = lambda (gap hbar cancels hbar).
complexd S_qubit_closed(const MeasurementConfig& cfg, double dtau, double b,
                        double b_prime);

// Harmonic levels: lambda_gap = lambda omega (k - l).
complexd S_oscillator_closed(const MeasurementConfig& cfg, double omega, int k,
                             int l, double dtau, double b, double b_prime);

// Active piecewise regime (1..4) at dtau; 4 is the identically-zero regime.
// Boundaries sit where 2K crosses lambda_gap + 2 b0, lambda_gap, and
// lambda_gap - 2 b0; an exact boundary belongs to the lower-indexed regime.
int S_branch(const MeasurementConfig& cfg, double lambda_gap, double dtau);

// Literal piecewise evaluator (the published branch formulas with shorthand
// f, h, phi+-). Singular at b = 0, b' = 0, and b = b'; used to cross-check
// the production evaluator away from those manifolds.
complexd S_branch_literal(const MeasurementConfig& cfg, double lambda_gap,
                          double dtau, double b, double b_prime);

struct ProductCheck {
  complexd grid_value;    // <b|rho_k rho_l|b'> by midpoint contraction
  complexd kernel_value;  // e^{i lambda(a_k b - a_l b')/hbar} Phi Phi* S_kl
};

// Contracts the two pointer-state kernels over a midpoint b'' grid and
// compares against the kernel formula (S from the quadrature oracle).
ProductCheck product_offdiag_check(const MeasurementConfig& cfg,
                                   const BandLimitedState& probe,
                                   const BandLimitedState& pointer, double a_k,
                                   double a_l, double dtau, double b,
                                   double b_prime, int n_grid = 256,
                                   double half_width = 40.0);

// Scan of max |S_kl(b,b')| over dtau_grid at the shared seeded sample pairs.
// The pointer defaults to the sinc state of band cfg.b0. Throws NotReached
// when the orthogonality condition fails or the grid ends above tol.
ThresholdScanResult orthogonality_threshold_scan(const DecoherenceFactorSpec& family,
                                                 const BandLimitedState& pointer,
                                                 const std::vector<double>& dtau_grid,
                                                 double tol = 1e-8);
ThresholdScanResult orthogonality_threshold_scan(const DecoherenceFactorSpec& family,
                                                 const std::vector<double>& dtau_grid,
                                                 double tol = 1e-8);

}  // namespace decolab
