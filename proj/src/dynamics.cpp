#include "decolab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "decolab/errors.hpp"
#include "decolab/numeric.hpp"
#include "decolab/quadrature.hpp"

namespace decolab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

complexd cis(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace

Grid1D Grid1D::uniform(double lo, double hi, int n) {
  if (!(hi > lo)) throw ConfigError("Grid1D: hi must exceed lo");
  if (n < 2) throw ConfigError("Grid1D: need at least 2 cells");
  Grid1D g;
  g.spacing = (hi - lo) / n;
  g.points.resize(n);
  for (int i = 0; i < n; ++i) g.points[i] = lo + (i + 0.5) * g.spacing;
  return g;
}

void Grid1D::validate() const {
  if (points.size() < 2) throw ConfigError("Grid1D: need at least 2 points");
  if (!(spacing > 0.0)) throw ConfigError("Grid1D: spacing must be positive");
  for (std::size_t i = 1; i < points.size(); ++i) {
    double step = points[i] - points[i - 1];
    if (std::fabs(step - spacing) > 1e-12 * spacing)
      throw ConfigError("Grid1D: spacing is not uniform");
  }
}

double Grid1D::half_span() const {
  return 0.5 * spacing * static_cast<double>(points.size());
}

double Grid1D::center() const { return 0.5 * (points.front() + points.back()); }

double resolve_beta(const MeasurementConfig& cfg, const BetaMode& mode, double t) {
  if (mode.kind == BetaMode::Kind::fix_beta) {
    if (!(mode.beta > 0.0)) throw ConfigError("fix_beta: beta must be positive");
    return mode.beta;
  }
  return beta_of(cfg, t);  // throws DegenerateTime at t <= 0
}

double effective_lambda(const MeasurementConfig& cfg, const BetaMode& mode, double t) {
  if (mode.kind == BetaMode::Kind::fix_lambda) return cfg.lambda;
  if (!(mode.beta > 0.0)) throw ConfigError("fix_beta: beta must be positive");
  return 0.5 * cfg.alpha * mode.beta * cfg.g0 * cfg.g0 * t * t;
}

complexd coefficient_f_k(const MeasurementConfig& cfg, const SpectrumSpec& spec,
                         const BandLimitedState& probe, const BandLimitedState& pointer,
                         int k, double q, double b, double t, const BetaMode& mode) {
  if (k < 0 || k >= static_cast<int>(spec.eigenvalues.size()))
    throw ConfigError("coefficient_f_k: level index out of range");
  if (t < 0.0) throw ConfigError("coefficient_f_k: negative time");
  complexd base = spec.amplitudes[k] * position_amplitude(pointer, b);
  if (t == 0.0) return base * position_amplitude(probe, q);
  double beta = resolve_beta(cfg, mode, t);
  double a_k = spec.eigenvalues[k];
  double shift = beta * cfg.g0 * t * b;
  double phase = -cfg.alpha * cfg.g0 * t * a_k * q / cfg.hbar +
                 0.5 * cfg.alpha * beta * cfg.g0 * cfg.g0 * t * t * a_k * b / cfg.hbar;
  return base * position_amplitude(probe, q - shift) * cis(phase);
}

complexd coefficient_C_kl(const MeasurementConfig& cfg, const SpectrumSpec& spec,
                          const BandLimitedState& probe, const BandLimitedState& pointer,
                          int k, int l, double q, double b, double t,
                          const BetaMode& mode) {
  return coefficient_f_k(cfg, spec, probe, pointer, k, q, b, t, mode) *
         std::conj(coefficient_f_k(cfg, spec, probe, pointer, l, q, b, t, mode));
}

double pde_residual(const MeasurementConfig& cfg, const SpectrumSpec& spec,
                    const BandLimitedState& probe, const BandLimitedState& pointer,
                    int k, int l, double q, double b, double t, double h_q,
                    double h_t, double beta) {
  if (!(h_q > 0.0) || !(h_t > 0.0))
    throw ConfigError("pde_residual: step sizes must be positive");
  if (!(beta > 0.0)) throw ConfigError("pde_residual: beta must be positive");
  if (!(t - h_t > 0.0))
    throw ConfigError("pde_residual: time stencil leaves the positive axis");
  BetaMode mode = BetaMode::fix_beta(beta);
  auto C = [&](double qq, double tt) {
    return coefficient_C_kl(cfg, spec, probe, pointer, k, l, qq, b, tt, mode);
  };
  complexd c0 = C(q, t);
  complexd dq = (C(q + h_q, t) - C(q - h_q, t)) / (2.0 * h_q);
  complexd dt = (C(q, t + h_t) - C(q, t - h_t)) / (2.0 * h_t);
  double gap = spec.eigenvalues[k] - spec.eigenvalues[l];
  const complexd imag_unit{0.0, 1.0};
  complexd residual = cfg.alpha * cfg.g0 * gap * q * c0 +
                      (cfg.hbar / imag_unit) * beta * cfg.g0 * b * dq -
                      imag_unit * cfg.hbar * dt;
  return std::abs(residual);
}

double JointCoefficients::mass() const {
  KahanSum acc;
  for (const auto& fk : f)
    for (const complexd& v : fk) acc.add(std::norm(v));
  return acc.value() * q_grid.spacing * b_grid.spacing;
}

JointCoefficients evaluate_joint(const MeasurementConfig& cfg, const SpectrumSpec& spec,
                                 const BandLimitedState& probe,
                                 const BandLimitedState& pointer, double t,
                                 const Grid1D& q_grid, const Grid1D& b_grid,
                                 const BetaMode& mode) {
  cfg.validate();
  spec.validate();
  q_grid.validate();
  b_grid.validate();
  if (t < 0.0) throw ConfigError("evaluate_joint: negative time");
  const int K = static_cast<int>(spec.eigenvalues.size());
  const int n_q = q_grid.size();
  const int n_b = b_grid.size();

  JointCoefficients jc;
  jc.q_grid = q_grid;
  jc.b_grid = b_grid;
  jc.t = t;
  jc.f.assign(K, std::vector<complexd>(static_cast<std::size_t>(n_q) * n_b));

  std::vector<complexd> phi(n_b);
  for (int i = 0; i < n_b; ++i) phi[i] = position_amplitude(pointer, b_grid.points[i]);

  double c_tilde = (t == 0.0) ? 0.0 : resolve_beta(cfg, mode, t) * cfg.g0 * t;

  parallel_for(static_cast<std::size_t>(K) * n_q, [&](std::size_t slot) {
    int k = static_cast<int>(slot) / n_q;
    int iq = static_cast<int>(slot) % n_q;
    double q = q_grid.points[iq];
    complexd* row = jc.f[k].data() + static_cast<std::size_t>(iq) * n_b;
    for (int ib = 0; ib < n_b; ++ib)
      row[ib] = coefficient_f_k(cfg, spec, probe, pointer, k, q, b_grid.points[ib], t, mode);
  });

  // Window-coverage bound. The pointer deficit is the exact lattice-mass gap;
  // the probe deficit bounds |psi|^2 ~ 1/(pi tau x^2) beyond the window edge
  // around each shifted center, weighted by the pointer mass sitting there.
  KahanSum pointer_mass;
  for (int i = 0; i < n_b; ++i) pointer_mass.add(std::norm(phi[i]));
  double delta_b = std::max(0.0, 1.0 - b_grid.spacing * pointer_mass.value());
  double q_lo = q_grid.center() - q_grid.half_span();
  double q_hi = q_grid.center() + q_grid.half_span();
  KahanSum delta_q;
  for (int i = 0; i < n_b; ++i) {
    double shift = c_tilde * b_grid.points[i];
    double r_hi = q_hi - shift;
    double r_lo = shift - q_lo;
    double lost = (r_hi > 0.0 ? 1.0 / (kPi * probe.band_limit * r_hi) : 1.0) +
                  (r_lo > 0.0 ? 1.0 / (kPi * probe.band_limit * r_lo) : 1.0);
    delta_q.add(std::norm(phi[i]) * std::min(1.0, lost));
  }
  jc.declared_tolerance = delta_b + b_grid.spacing * delta_q.value();
  return jc;
}

double ReducedDensityMatrix::trace_real() const {
  KahanSum acc;
  int d = dim();
  for (int i = 0; i < d; ++i) acc.add(at(i, i).real());
  acc.add(offgrid_mass);
  return acc.value();
}

double ReducedDensityMatrix::hermiticity_defect() const {
  double worst = 0.0;
  int d = dim();
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      worst = std::max(worst, std::abs(at(i, j) - std::conj(at(j, i))));
  return worst;
}

double ReducedDensityMatrix::offdiag_frobenius() const {
  KahanSum acc;
  int d = dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i / block != j / block) acc.add(std::norm(at(i, j)));
  return std::sqrt(acc.value());
}

bool ReducedDensityMatrix::psd_within(double slack) const {
  // Cholesky of entries + slack*I, reading only the lower triangle (i.e. the
  // Hermitian part as seen from below). Success certifies all eigenvalues of
  // that Hermitian part exceed -slack.
  int d = dim();
  std::vector<complexd> a(entries);
  for (int i = 0; i < d; ++i) a[static_cast<std::size_t>(i) * d + i] += slack;
  for (int j = 0; j < d; ++j) {
    complexd* colj = a.data() + static_cast<std::size_t>(j) * d;
    double diag = colj[j].real();
    for (int k = 0; k < j; ++k) diag -= std::norm(colj[k]);
    if (!(diag > 0.0)) return false;
    double pivot = std::sqrt(diag);
    colj[j] = pivot;
    for (int i = j + 1; i < d; ++i) {
      complexd* rowi = a.data() + static_cast<std::size_t>(i) * d;
      complexd s = rowi[j];
      for (int k = 0; k < j; ++k) s -= rowi[k] * std::conj(colj[k]);
      rowi[j] = s / pivot;
    }
  }
  return true;
}

namespace {

// psi(x - delta) conj(psi(x + delta)) e^{-i w x} summed with weight h over
// the infinite midpoint lattice x_n = (n + 1/2) h. The directly summed core
// extends `margin` beyond both shifted centers; each side's remainder is
// summed in blocks of one beat of the slowest oscillation and the block
// partial sums are epsilon-accelerated (the summand decays like 1/x^2, so
// plain truncation converges far too slowly).
complexd probe_lattice_trace(const BandLimitedState& probe, double w, double delta,
                             double h, double margin) {
  auto term = [&](double x) {
    return position_amplitude(probe, x - delta) *
           std::conj(position_amplitude(probe, x + delta)) * cis(-w * x);
  };
  double reach = std::fabs(delta) + margin;
  long n_half = static_cast<long>(std::ceil(reach / h + 0.5));
  ComplexKahan core;
  for (long n = -n_half; n < n_half; ++n)
    core.add(term((static_cast<double>(n) + 0.5) * h));
  complexd total = core.value() * h;

  double nu = std::fabs(w) + 2.0 * probe.band_limit;
  long npts = std::max<long>(1, std::lround(kPi / (nu * h)));
  for (int side = 0; side < 2; ++side) {
    double sign = (side == 0) ? 1.0 : -1.0;
    WynnEpsilon eps;
    ComplexKahan partial;
    int tiny = 0;
    for (int blk = 0; blk < 160; ++blk) {
      ComplexKahan block;
      for (long j = 0; j < npts; ++j) {
        long n = n_half + static_cast<long>(blk) * npts + j;
        block.add(term(sign * (static_cast<double>(n) + 0.5) * h));
      }
      complexd bs = block.value() * h;
      partial.add(bs);
      eps.push(partial.value());
      tiny = (std::abs(bs) < 1e-16) ? tiny + 1 : 0;
      if ((blk >= 4 && eps.spread() < 1e-14) || tiny >= 3) break;
    }
    total += eps.estimate();
  }
  return total;
}

struct TraceTable {
  double w = 0.0;
  std::vector<complexd> g;   // index m + n - 1, m = i - j
  std::vector<complexd> cw;  // cis(-w * c_tilde * b_i / 2)
};

}  // namespace

ReducedDensityMatrix assemble_reduced_system_pointer(
    const MeasurementConfig& cfg, const SpectrumSpec& spec,
    const BandLimitedState& probe, const BandLimitedState& pointer, double t,
    const Grid1D& q_grid, const Grid1D& b_grid, const BetaMode& mode) {
  cfg.validate();
  spec.validate();
  q_grid.validate();
  b_grid.validate();
  if (t < 0.0) throw ConfigError("assemble_reduced_system_pointer: negative time");
  const int K = static_cast<int>(spec.eigenvalues.size());
  const int n = b_grid.size();
  const int d = K * n;
  const double h_b = b_grid.spacing;
  const double h_q = q_grid.spacing;

  if (h_b * pointer.band_limit >= kPi)
    throw GridTooCoarse(
        "pointer grid spacing cannot resolve the pointer bandwidth");

  ReducedDensityMatrix rdm;
  rdm.basis = ReducedDensityMatrix::Basis::system_pointer_grid;
  rdm.levels = K;
  rdm.block = n;
  rdm.b_grid = b_grid;
  rdm.declared_tolerance = 1e-8;
  rdm.entries.assign(static_cast<std::size_t>(d) * d, complexd{0.0, 0.0});

  std::vector<complexd> phi(n);
  for (int i = 0; i < n; ++i) phi[i] = position_amplitude(pointer, b_grid.points[i]);
  KahanSum pointer_mass;
  for (int i = 0; i < n; ++i) pointer_mass.add(std::norm(phi[i]));
  rdm.offgrid_mass = std::max(0.0, 1.0 - h_b * pointer_mass.value());
  // The default +-40-unit window holds ~99.2% of a unit-band sinc pointer;
  // the missing mass is added back to the trace exactly (diagonal lattice
  // identity), so the gate below only rejects grossly undersized windows.
  if (rdm.offgrid_mass > 1e-2)
    throw GridTooCoarse("pointer window covers less than 99% of the pointer mass");

  double c_tilde;
  double lambda_eff;
  if (t == 0.0) {
    // No evolution yet: the probe integrates out to exactly 1 for every
    // pointer pair and the state is the initial product.
    c_tilde = 0.0;
    lambda_eff = 0.0;
  } else {
    double beta = resolve_beta(cfg, mode, t);
    c_tilde = (mode.kind == BetaMode::Kind::fix_lambda)
                  ? 2.0 * cfg.lambda / (cfg.alpha * cfg.g0 * t)
                  : beta * cfg.g0 * t;
    lambda_eff = effective_lambda(cfg, mode, t);
  }

  double w_max = 0.0;
  std::vector<double> w_of_pair(static_cast<std::size_t>(K) * K);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      double w = cfg.alpha * cfg.g0 * t *
                 (spec.eigenvalues[k] - spec.eigenvalues[l]) / cfg.hbar;
      w_of_pair[static_cast<std::size_t>(k) * K + l] = w;
      w_max = std::max(w_max, std::fabs(w));
    }
  if (h_q * (2.0 * probe.band_limit + w_max) >= 2.0 * kPi)
    throw GridTooCoarse("probe grid spacing cannot resolve the probe bandwidth "
                        "plus the largest coherence frequency");

  std::vector<TraceTable> tables;
  std::vector<int> table_of_pair(static_cast<std::size_t>(K) * K);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      double w = w_of_pair[static_cast<std::size_t>(k) * K + l];
      int idx = -1;
      for (std::size_t s = 0; s < tables.size(); ++s)
        if (tables[s].w == w) { idx = static_cast<int>(s); break; }
      if (idx < 0) {
        tables.push_back(TraceTable{w, {}, {}});
        idx = static_cast<int>(tables.size()) - 1;
      }
      table_of_pair[static_cast<std::size_t>(k) * K + l] = idx;
    }
  double margin = q_grid.half_span();
  for (TraceTable& tab : tables) {
    tab.g.resize(2 * static_cast<std::size_t>(n) - 1);
    tab.cw.resize(n);
    parallel_for(tab.g.size(), [&](std::size_t slot) {
      long m = static_cast<long>(slot) - (n - 1);
      double delta = 0.5 * c_tilde * h_b * static_cast<double>(m);
      tab.g[slot] = probe_lattice_trace(probe, tab.w, delta, h_q, margin);
    });
    for (int i = 0; i < n; ++i)
      tab.cw[i] = cis(-0.5 * tab.w * c_tilde * b_grid.points[i]);
  }

  std::vector<std::vector<complexd>> v(K, std::vector<complexd>(n));
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < n; ++i)
      v[k][i] = spec.amplitudes[k] *
                cis(lambda_eff * spec.eigenvalues[k] * b_grid.points[i] / cfg.hbar) *
                phi[i];

  parallel_for(static_cast<std::size_t>(d), [&](std::size_t row) {
    int k = static_cast<int>(row) / n;
    int i = static_cast<int>(row) % n;
    complexd* out = rdm.entries.data() + row * d;
    for (int l = 0; l < K; ++l) {
      const TraceTable& tab = tables[table_of_pair[static_cast<std::size_t>(k) * K + l]];
      complexd base = h_b * v[k][i] * tab.cw[i];
      const complexd* grow = tab.g.data() + (i + n - 1);
      for (int j = 0; j < n; ++j)
        out[static_cast<std::size_t>(l) * n + j] =
            base * std::conj(v[l][j]) * tab.cw[j] * grow[-j];
    }
  });

  double trace_gap = std::fabs(rdm.trace_real() - 1.0);
  if (trace_gap > rdm.declared_tolerance)
    throw GridTooCoarse("assembled trace misses 1 by " + std::to_string(trace_gap) +
                        ", beyond the declared tolerance");
  return rdm;
}

ReducedDensityMatrix assemble_reduced_system(const MeasurementConfig& cfg,
                                             const SpectrumSpec& spec,
                                             const BandLimitedState& probe,
                                             const BandLimitedState& pointer,
                                             double t) {
  cfg.validate();
  spec.validate();
  if (t < 0.0) throw ConfigError("assemble_reduced_system: negative time");
  const int K = static_cast<int>(spec.eigenvalues.size());
  ReducedDensityMatrix rdm;
  rdm.basis = ReducedDensityMatrix::Basis::system_only;
  rdm.levels = K;
  rdm.block = 1;
  rdm.entries.assign(static_cast<std::size_t>(K) * K, complexd{0.0, 0.0});
  if (t == 0.0) {
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < K; ++l)
        rdm.entries[static_cast<std::size_t>(k) * K + l] =
            spec.amplitudes[k] * std::conj(spec.amplitudes[l]);
    rdm.declared_tolerance = 1e-12;
    return rdm;
  }
  rdm.declared_tolerance = 1e-8;
  auto fourier_norm = [](const BandLimitedState& state, double freq) {
    QuadratureRequest req;
    req.integrand = [&state, freq](double x) {
      complexd psi = position_amplitude(state, x);
      return psi * std::conj(psi) * cis(-freq * x);
    };
    req.oscillation_frequency = 2.0 * state.band_limit + std::fabs(freq);
    req.breakpoints = {0.0};
    req.abs_tol = 1e-11;
    req.rel_tol = 1e-9;
    return require_converged(integrate_real_line(req), "reduced-system factor");
  };
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      double gap = spec.eigenvalues[k] - spec.eigenvalues[l];
      complexd x = fourier_norm(probe, cfg.alpha * cfg.g0 * t * gap / cfg.hbar);
      complexd y = fourier_norm(pointer, cfg.lambda * gap / cfg.hbar);
      rdm.entries[static_cast<std::size_t>(k) * K + l] =
          spec.amplitudes[k] * std::conj(spec.amplitudes[l]) * x * y;
    }
  return rdm;
}

double purity(const ReducedDensityMatrix& rho) {
  KahanSum acc;
  for (const complexd& e : rho.entries) acc.add(std::norm(e));
  return acc.value();
}

}  // namespace decolab
