#pragma once

#include <complex>
#include <vector>

namespace decolab {

using complexd = std::complex<double>;

// Couplings, band limits, and units of the measurement model. All strictly
// positive; hbar defaults to 1 so figure-style parameter sets read literally.
struct MeasurementConfig {
  double hbar = 1.0;
  double alpha = 1.0;
  double g0 = 1.0;
  double lambda = 1.0;
  double kappa0 = 1.0;
  double b0 = 1.0;

  void validate() const;  // throws ConfigError naming the offending field
};

// Eigenvalues a_k of the measured observable and the initial system
// amplitudes projected onto its eigenbasis.
struct SpectrumSpec {
  std::vector<double> eigenvalues;
  std::vector<complexd> amplitudes;

  void validate() const;  // SingleLevel / DegenerateSpectrum / ConfigError
};

// Square pulse: g(t) = g0 on [t_in, t_f), 0 outside.
struct PulseProfile {
  double g0 = 1.0;
  double t_in = 0.0;
  double t_f = 1.0;

  void validate() const;
  double value(double t) const { return (t >= t_in && t < t_f) ? g0 : 0.0; }
};

// Smallest positive difference between eigenvalues.
double min_gap(const SpectrumSpec& spec);

// 2*kappa0*hbar / (alpha*g0*a0): time at which every cross coherence factor
// becomes exactly zero.
double decoherence_time(const MeasurementConfig& cfg, double a0);

// 4*kappa0*hbar / (alpha*g0*(a0 - 2*b0*hbar/lambda)): time at which pointer
// states become exactly orthogonal. Requires orthogonality_condition.
double orthogonality_time(const MeasurementConfig& cfg, double a0);

// Strict inequality lambda > 2*b0*hbar/a0.
bool orthogonality_condition(const MeasurementConfig& cfg, double a0);

// 2*lambda / (alpha*g0^2*t^2): the probe-pointer coupling that makes the
// pointer shift equal lambda per unit eigenvalue at time t.
double beta_of(const MeasurementConfig& cfg, double t);

// Two-level spectrum {+hbar/2, -hbar/2} with equal amplitudes.
SpectrumSpec qubit_spectrum(double hbar = 1.0);

// Harmonic levels (k + 1/2)*hbar*omega for k = 0..levels-1, equal amplitudes.
SpectrumSpec oscillator_spectrum(int levels, double omega, double hbar = 1.0);

}  // namespace decolab
