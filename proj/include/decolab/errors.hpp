#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace decolab {

// Base class for every error the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameter values (nonpositive couplings, unnormalized amplitudes, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Spectrum with fewer than two levels: no coherences exist, gap undefined.
struct SingleLevel : Error {
  using Error::Error;
};

// Two eigenvalues closer than the distinctness tolerance.
struct DegenerateSpectrum : Error {
  using Error::Error;
};

// A strictly positive duration was required.
struct DegenerateTime : Error {
  using Error::Error;
};

// Pointer-overlap decay cannot terminate: lambda <= 2*b0*hbar/a0.
struct OrthogonalityUnattainable : Error {
  using Error::Error;
};

// The requested integrand decays too slowly for an absolutely convergent integral.
struct NotIntegrable : Error {
  using Error::Error;
};

// A closed form was requested outside its validity condition.
struct ConditionViolated : Error {
  using Error::Error;
};

// Grid spacing or extent insufficient for the requested accuracy.
struct GridTooCoarse : Error {
  using Error::Error;
};

// A scan ended before the monitored quantity dropped below tolerance.
struct NotReached : Error {
  double max_abs_at_end;
  NotReached(const std::string& msg, double max_abs)
      : Error(msg), max_abs_at_end(max_abs) {}
};

// Quadrature missed its error target; carries the best value it achieved.
struct NoConvergence : Error {
  std::complex<double> achieved_value;
  double achieved_error;
  NoConvergence(const std::string& msg, std::complex<double> value, double error)
      : Error(msg), achieved_value(value), achieved_error(error) {}
};

}  // namespace decolab
