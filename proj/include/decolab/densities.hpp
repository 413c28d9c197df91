#pragma once

#include <vector>

#include "decolab/model.hpp"
#include "decolab/states.hpp"

namespace decolab {

// Continuous piecewise-linear probability density with compact support.
struct PiecewiseDensity {
  struct Segment {
    double lo = 0.0, hi = 0.0;  // half-open [lo, hi); last segment closed
    double c0 = 0.0, c1 = 0.0;  // value c0 + c1 * s
  };
  std::vector<Segment> segments;
  double support_lo = 0.0;
  double support_hi = 0.0;

  double evaluate(double s) const;  // 0 outside the support
  double area() const;              // analytic integral of the pieces
  std::vector<double> breakpoints() const;
  void validate() const;  // ordered, contiguous, continuous, vanishing ends
};

// Pointer-reading density of one level: the convolution of a flat window of
// width (L - 2 b0) hbar with the pointer's flat momentum window of width
// 2 b0 hbar, i.e. a symmetric trapezoid over [S0, S0 + L hbar] (a triangle
// when L = 4 b0). Unit area by construction.
//
// Qubit level sign = +1: S0 = 0; sign = -1: S0 = -lambda hbar; L = lambda.
// Throws ConditionViolated unless lambda > 2 b0.
PiecewiseDensity qubit_density(int sign, double lambda, double b0, double hbar = 1.0);

// Oscillator level k: S0 = k lambda omega hbar, L = lambda omega.
// Throws ConditionViolated unless lambda * omega > 2 b0.
PiecewiseDensity oscillator_density(int k, double lambda, double omega, double b0,
                                    double hbar = 1.0);

// True when no two supports overlap in their interiors (touching endpoints
// are allowed).
bool supports_disjoint(const std::vector<PiecewiseDensity>& densities);

struct DensityComparison {
  std::vector<double> s;         // sample positions
  std::vector<double> analytic;  // piecewise closed form
  std::vector<double> grid;      // grid-Fourier reconstruction
  double max_deviation = 0.0;    // max |grid - analytic| over the samples
  double max_outside_support = 0.0;  // max |grid| where the closed form is 0
};

// Reconstructs the level density on a grid, independently of the closed form:
// the pointer amplitude is sampled on an n-point window of spacing h, its
// windowed autocorrelation is combined with the probe overlap factor F and
// the level phase, and the Fourier sum is evaluated on 400 sample points
// spanning the support widened by 15% on each side. h = 0 picks
// min(1, 1.4/b0, 5.4 hbar/width) automatically. Throws GridTooCoarse when the
// spacing aliases the pointer band or the density period, or when the window
// spans fewer than 40 pointer decay lengths.
DensityComparison density_vs_grid(const PiecewiseDensity& density,
                                  const MeasurementConfig& cfg,
                                  const BandLimitedState& probe,
                                  const BandLimitedState& pointer, double a_k,
                                  double dtau, int n = 1024, double h = 0.0);

}  // namespace decolab
