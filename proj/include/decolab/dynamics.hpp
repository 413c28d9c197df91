#pragma once

#include <vector>

#include "decolab/model.hpp"
#include "decolab/states.hpp"

namespace decolab {

// Uniform cell-midpoint grid: n cells of width h spanning [lo, hi], points at
// the cell centers, each carrying weight h.
struct Grid1D {
  std::vector<double> points;
  double spacing = 0.0;

  static Grid1D uniform(double lo, double hi, int n);
  void validate() const;
  int size() const { return static_cast<int>(points.size()); }
  double half_span() const;  // half the covered interval (n*h/2)
  double center() const;
};

// Scan semantics for the probe-pointer coupling: either hold lambda fixed and
// derive beta(t) = 2 lambda/(alpha g0^2 t^2) at each evaluation time, or hold
// beta itself fixed (the effective lambda then scales as t^2).
struct BetaMode {
  enum class Kind { fix_lambda, fix_beta };
  Kind kind = Kind::fix_lambda;
  double beta = 0.0;

  static BetaMode fix_lambda() { return {}; }
  static BetaMode fix_beta(double beta) { return {Kind::fix_beta, beta}; }
};

double resolve_beta(const MeasurementConfig& cfg, const BetaMode& mode, double t);

// alpha*beta*g0^2*t^2/2: the coupling that multiplies a_k*b in the phases.
// Equals cfg.lambda exactly in fix_lambda mode.
double effective_lambda(const MeasurementConfig& cfg, const BetaMode& mode, double t);

// f_k(q,b;t) = s_k psi(q - beta b g0 t) Phi(b)
//              e^{-i alpha g0 t a_k q / hbar} e^{+i alpha beta g0^2 t^2 a_k b / (2 hbar)}.
// At t = 0 the phases and shift vanish: s_k psi(q) Phi(b).
complexd coefficient_f_k(const MeasurementConfig& cfg, const SpectrumSpec& spec,
                         const BandLimitedState& probe, const BandLimitedState& pointer,
                         int k, double q, double b, double t,
                         const BetaMode& mode = BetaMode::fix_lambda());

// C_kl = f_k conj(f_l).
complexd coefficient_C_kl(const MeasurementConfig& cfg, const SpectrumSpec& spec,
                          const BandLimitedState& probe, const BandLimitedState& pointer,
                          int k, int l, double q, double b, double t,
                          const BetaMode& mode = BetaMode::fix_lambda());

// | alpha g0 (a_k - a_l) q C + (hbar/i) beta g0 b dC/dq - i hbar dC/dt |
// with central differences of step h_q, h_t on the analytic C_kl evaluated at
// the supplied constant beta. O(h^2) by construction.
double pde_residual(const MeasurementConfig& cfg, const SpectrumSpec& spec,
                    const BandLimitedState& probe, const BandLimitedState& pointer,
                    int k, int l, double q, double b, double t, double h_q,
                    double h_t, double beta);

// The K coefficient arrays f_k over a (q, b) grid at one time.
struct JointCoefficients {
  Grid1D q_grid, b_grid;
  double t = 0.0;
  std::vector<std::vector<complexd>> f;  // [k][iq * n_b + ib]
  // Bound on the probability mass the window can miss (quoted, not fitted):
  // exact pointer off-window mass plus an inverse-square envelope bound on
  // the shifted probe's off-window mass.
  double declared_tolerance = 0.0;

  double mass() const;  // sum_k sum_grid |f_k|^2 h_q h_b
};

JointCoefficients evaluate_joint(const MeasurementConfig& cfg, const SpectrumSpec& spec,
                                 const BandLimitedState& probe,
                                 const BandLimitedState& pointer, double t,
                                 const Grid1D& q_grid, const Grid1D& b_grid,
                                 const BetaMode& mode = BetaMode::fix_lambda());

// Density matrix with the integration weights absorbed into the entries, so
// trace = sum of diagonal, purity = squared Frobenius norm.
struct ReducedDensityMatrix {
  enum class Basis { system_pointer_grid, system_only };
  Basis basis = Basis::system_only;
  int levels = 0;
  int block = 1;  // pointer-grid points per level; 1 in the system-only basis
  std::vector<complexd> entries;  // dim() x dim(), row-major
  Grid1D b_grid;                  // empty in the system-only basis
  // Probability mass provably outside the pointer window (added to the trace).
  double offgrid_mass = 0.0;
  double declared_tolerance = 0.0;

  int dim() const { return levels * block; }
  const complexd& at(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * dim() + j];
  }
  double trace_real() const;         // diagonal sum plus offgrid_mass
  double hermiticity_defect() const; // max |entry(i,j) - conj(entry(j,i))|
  double offdiag_frobenius() const;  // Frobenius norm over blocks with k != l
  bool psd_within(double slack) const;  // Cholesky of entries + slack*I
};

// Probe traced out on a grid: block (k,i),(l,j) entries
//   h_b s_k conj(s_l) e^{i lambda(a_k b_i - a_l b_j)/hbar}
//   Phi(b_i) conj(Phi(b_j)) T_kl(b_i, b_j)
// where T_kl is the probe trace summed over the q lattice translated to the
// midpoint of the two shifted probe centers (plus extrapolated lattice
// tails), which keeps full probe-mass coverage for every entry. Throws
// GridTooCoarse when a lattice spacing cannot resolve the spectral widths,
// when the pointer window covers less than 99.9% of its mass, or when the
// assembled trace misses 1 by more than the declared tolerance.
ReducedDensityMatrix assemble_reduced_system_pointer(
    const MeasurementConfig& cfg, const SpectrumSpec& spec,
    const BandLimitedState& probe, const BandLimitedState& pointer, double t,
    const Grid1D& q_grid, const Grid1D& b_grid,
    const BetaMode& mode = BetaMode::fix_lambda());

// Probe and pointer both traced out: K x K matrix with entries
// s_k conj(s_l) X_kl Y_kl, where X_kl is the probe Fourier integral at
// frequency alpha g0 t (a_k - a_l)/hbar and Y_kl the pointer Fourier integral
// at frequency lambda (a_k - a_l)/hbar, both evaluated by quadrature.
// At t = 0 returns the untouched initial system state s_k conj(s_l).
ReducedDensityMatrix assemble_reduced_system(const MeasurementConfig& cfg,
                                             const SpectrumSpec& spec,
                                             const BandLimitedState& probe,
                                             const BandLimitedState& pointer,
                                             double t);

// Tr(rho^2): squared Frobenius norm of the weight-absorbed matrix.
double purity(const ReducedDensityMatrix& rho);

}  // namespace decolab
