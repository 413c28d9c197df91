#include "decolab/densities.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "decolab/errors.hpp"
#include "decolab/numeric.hpp"

namespace decolab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

complexd cis(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Symmetric trapezoid over [s0, s0 + len_total]: rises over the narrower of
// the two convolved window widths, sits at 1/(wider width), falls over the
// narrower width again. Equal widths give the triangle case.
PiecewiseDensity trapezoid(double s0, double width_a, double width_b) {
  PiecewiseDensity d;
  d.support_lo = s0;
  d.support_hi = s0 + width_a + width_b;
  double rise = std::min(width_a, width_b);
  double wide = std::max(width_a, width_b);
  double height = 1.0 / wide;
  double lo_top = s0 + rise;
  double hi_top = d.support_hi - rise;
  double up = height / rise;
  if (lo_top >= hi_top) {
    // Triangle: peak 2/(total width) at the midpoint.
    double mid = 0.5 * (d.support_lo + d.support_hi);
    d.segments.push_back({s0, mid, -up * s0, up});
    d.segments.push_back({mid, d.support_hi, up * d.support_hi, -up});
  } else {
    d.segments.push_back({s0, lo_top, -up * s0, up});
    d.segments.push_back({lo_top, hi_top, height, 0.0});
    d.segments.push_back({hi_top, d.support_hi, up * d.support_hi, -up});
  }
  d.validate();
  return d;
}

}  // namespace

double PiecewiseDensity::evaluate(double s) const {
  if (s < support_lo || s > support_hi) return 0.0;
  for (const Segment& seg : segments)
    if (s < seg.hi || &seg == &segments.back()) return seg.c0 + seg.c1 * s;
  return 0.0;
}

double PiecewiseDensity::area() const {
  KahanSum acc;
  for (const Segment& seg : segments) {
    acc.add(seg.c0 * (seg.hi - seg.lo));
    acc.add(0.5 * seg.c1 * (seg.hi * seg.hi - seg.lo * seg.lo));
  }
  return acc.value();
}

std::vector<double> PiecewiseDensity::breakpoints() const {
  std::vector<double> pts;
  for (const Segment& seg : segments) pts.push_back(seg.lo);
  pts.push_back(segments.back().hi);
  return pts;
}

void PiecewiseDensity::validate() const {
  if (segments.empty()) throw ConfigError("PiecewiseDensity: no segments");
  double scale = std::max(std::fabs(support_lo), std::fabs(support_hi));
  double tol = 1e-12 * std::max(1.0, scale);
  if (std::fabs(segments.front().lo - support_lo) > tol ||
      std::fabs(segments.back().hi - support_hi) > tol)
    throw ConfigError("PiecewiseDensity: segments do not span the support");
  double peak = 0.0;
  for (const Segment& seg : segments) {
    if (!(seg.hi > seg.lo)) throw ConfigError("PiecewiseDensity: empty segment");
    peak = std::max({peak, std::fabs(seg.c0 + seg.c1 * seg.lo),
                     std::fabs(seg.c0 + seg.c1 * seg.hi)});
  }
  double vtol = 1e-12 * std::max(1.0, peak);
  for (std::size_t i = 1; i < segments.size(); ++i) {
    const Segment& a = segments[i - 1];
    const Segment& b = segments[i];
    if (std::fabs(a.hi - b.lo) > tol)
      throw ConfigError("PiecewiseDensity: segments are not contiguous");
    double left = a.c0 + a.c1 * a.hi;
    double right = b.c0 + b.c1 * b.lo;
    if (std::fabs(left - right) > vtol)
      throw ConfigError("PiecewiseDensity: discontinuous at an interior joint");
  }
  const Segment& first = segments.front();
  const Segment& last = segments.back();
  if (std::fabs(first.c0 + first.c1 * first.lo) > vtol ||
      std::fabs(last.c0 + last.c1 * last.hi) > vtol)
    throw ConfigError("PiecewiseDensity: density does not vanish at the edges");
}

PiecewiseDensity qubit_density(int sign, double lambda, double b0, double hbar) {
  if (sign != 1 && sign != -1) throw ConfigError("qubit_density: sign must be +-1");
  if (!(lambda > 0.0) || !(b0 > 0.0) || !(hbar > 0.0))
    throw ConfigError("qubit_density: parameters must be positive");
  if (!(lambda > 2.0 * b0))
    throw ConditionViolated("qubit_density: requires lambda > 2*b0");
  double s0 = (sign > 0) ? 0.0 : -lambda * hbar;
  return trapezoid(s0, 2.0 * b0 * hbar, (lambda - 2.0 * b0) * hbar);
}

PiecewiseDensity oscillator_density(int k, double lambda, double omega, double b0,
                                    double hbar) {
  if (k < 0) throw ConfigError("oscillator_density: level index must be >= 0");
  if (!(lambda > 0.0) || !(omega > 0.0) || !(b0 > 0.0) || !(hbar > 0.0))
    throw ConfigError("oscillator_density: parameters must be positive");
  if (!(lambda * omega > 2.0 * b0))
    throw ConditionViolated("oscillator_density: requires lambda*omega > 2*b0");
  double s0 = static_cast<double>(k) * lambda * omega * hbar;
  return trapezoid(s0, 2.0 * b0 * hbar, (lambda * omega - 2.0 * b0) * hbar);
}

bool supports_disjoint(const std::vector<PiecewiseDensity>& densities) {
  for (std::size_t i = 0; i < densities.size(); ++i)
    for (std::size_t j = i + 1; j < densities.size(); ++j) {
      double lo = std::max(densities[i].support_lo, densities[j].support_lo);
      double hi = std::min(densities[i].support_hi, densities[j].support_hi);
      double scale = std::max({1.0, std::fabs(lo), std::fabs(hi)});
      if (hi - lo > 1e-12 * scale) return false;
    }
  return true;
}

DensityComparison density_vs_grid(const PiecewiseDensity& density,
                                  const MeasurementConfig& cfg,
                                  const BandLimitedState& probe,
                                  const BandLimitedState& pointer, double a_k,
                                  double dtau, int n, double h) {
  cfg.validate();
  if (!(dtau > 0.0)) throw DegenerateTime("density_vs_grid: dtau must be positive");
  if (n < 16) throw ConfigError("density_vs_grid: window too small");
  double width = density.support_hi - density.support_lo;
  if (h == 0.0)
    h = std::min({1.0, 1.4 / pointer.band_limit, 5.4 * cfg.hbar / width});
  if (!(h > 0.0)) throw ConfigError("density_vs_grid: spacing must be positive");
  // Hard validity limits: the pointer lattice must satisfy its Nyquist bound,
  // the 2*pi*hbar/h periodic images of the density must stay clear of the
  // widened sample window, and the window must span enough of the pointer's
  // 1/x tail for the autocorrelation truncation to stay below the target.
  if (h * pointer.band_limit >= kPi)
    throw GridTooCoarse("density_vs_grid: spacing aliases the pointer band");
  if (2.0 * kPi * cfg.hbar <= 1.15 * width * h)
    throw GridTooCoarse("density_vs_grid: periodic images reach the sample window");
  if (static_cast<double>(n) * h * pointer.band_limit < 40.0)
    throw GridTooCoarse("density_vs_grid: window spans too little pointer mass");

  std::vector<complexd> phi(n);
  for (int j = 0; j < n; ++j) {
    double b = (j + 0.5 - 0.5 * n) * h;
    phi[j] = position_amplitude(pointer, b);
  }
  // Windowed autocorrelation at lag m >= 0 (zero outside the window).
  std::vector<complexd> acf(n);
  for (int m = 0; m < n; ++m) {
    ComplexKahan acc;
    for (int j = m; j < n; ++j) acc.add(phi[j] * std::conj(phi[j - m]));
    acf[m] = acc.value() * h;
  }
  // coeff[m] = ACF(m) F(m h) e^{i lambda a_k m h / hbar}; negative lags enter
  // the reconstruction as conjugates, so the sum is real by construction.
  std::vector<complexd> coeff(n);
  for (int m = 0; m < n; ++m) {
    double d = m * h;
    coeff[m] = acf[m] * F_eta(probe, cfg, dtau, d) *
               cis(cfg.lambda * a_k * d / cfg.hbar);
  }

  DensityComparison out;
  const int n_samples = 400;
  double lo = density.support_lo - 0.15 * width;
  double span = 1.3 * width;
  out.s.resize(n_samples);
  out.analytic.resize(n_samples);
  out.grid.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    double s = lo + (i + 0.5) * span / n_samples;
    KahanSum acc;
    acc.add(coeff[0].real());
    for (int m = 1; m < n; ++m) {
      complexd z = coeff[m] * cis(-s * m * h / cfg.hbar);
      acc.add(2.0 * z.real());
    }
    double grid_value = acc.value() * h / (2.0 * kPi * cfg.hbar);
    double closed = density.evaluate(s);
    out.s[i] = s;
    out.analytic[i] = closed;
    out.grid[i] = grid_value;
    out.max_deviation = std::max(out.max_deviation, std::fabs(grid_value - closed));
    if (s < density.support_lo || s > density.support_hi)
      out.max_outside_support = std::max(out.max_outside_support, std::fabs(grid_value));
  }
  return out;
}

}  // namespace decolab
