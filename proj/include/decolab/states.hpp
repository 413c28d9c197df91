#pragma once

#include <functional>

#include "decolab/model.hpp"

namespace decolab {

// Wavefunction whose momentum representation is supported on
// [-hbar*band_limit, +hbar*band_limit]. Its position representation is then
// entire of exponential type band_limit; products of two such states decay as
// 1/x^2 and are absolutely integrable.
//
// Convention fixed here: psi(x) = (2*pi*hbar)^(-1/2) * Int dp e^{ipx/hbar} phi(p).
// With phi flat on its support this reproduces the closed form
// psi(x) = sqrt(tau/pi) * sin(tau*x)/(tau*x).
struct BandLimitedState {
  enum class Kind { sinc, custom };

  Kind kind = Kind::sinc;
  double band_limit = 1.0;  // tau, inverse length
  double hbar = 1.0;
  std::function<complexd(double)> momentum_amplitude;  // phi(p) on the support
  std::function<complexd(double)> position_closed;     // optional closed form
};

// Flat momentum amplitude 1/sqrt(2*hbar*tau); position amplitude
// sqrt(tau/pi)*sinc(tau*x).
BandLimitedState make_sinc_state(double tau, double hbar = 1.0);

// Caller-supplied momentum amplitude (normalized on [-hbar*tau, hbar*tau]);
// position amplitude evaluated by quadrature unless a closed form is given.
BandLimitedState make_custom_state(double tau,
                                   std::function<complexd(double)> momentum_amplitude,
                                   double hbar = 1.0,
                                   std::function<complexd(double)> position_closed = nullptr);

complexd position_amplitude(const BandLimitedState& state, double x);

// Int e^{iax} psi1(x) conj(psi2(x)) dx over the real line. The product of two
// band-limited states decays as 1/x^2, so the integral exists; it must vanish
// whenever |a| exceeds the sum of the two band limits.
complexd vanishing_check(const BandLimitedState& s1, const BandLimitedState& s2,
                         double a);

// A single bare state decays only as 1/x and is not absolutely integrable.
// Always throws NotIntegrable; present so the misuse is an explicit error.
complexd vanishing_check(const BandLimitedState& state, double a);

// F(eta) = Int dp e^{2*i*lambda*eta*p/(alpha*g0*dtau*hbar)} |phi(p)|^2 over
// the momentum support. Real and even for the probes considered; the sinc
// probe gives sin(c*eta)/(c*eta) with c = 2*lambda*kappa0/(alpha*g0*dtau).
double F_eta(const BandLimitedState& probe, const MeasurementConfig& cfg,
             double dtau, double eta);

// Exponential types add under pointwise multiplication.
double exponential_type_of_product(double tau1, double tau2);

}  // namespace decolab
