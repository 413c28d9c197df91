#include "decolab/orthogonality.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "decolab/errors.hpp"
#include "decolab/numeric.hpp"
#include "decolab/quadrature.hpp"

namespace decolab {
namespace {

const complexd kI(0.0, 1.0);

complexd cis(double t) { return complexd(std::cos(t), std::sin(t)); }

// Int_p^q (sum_m coeff[m] sigma^m) e^{-i sigma x} dsigma for degree <= 4.
// A power-series branch covers small |x|*max(|p|,|q|), where the moment
// recurrence below would divide by a near-zero u; 24 terms of the series
// leave truncation far below double precision at the 0.3 crossover.
complexd poly_fourier(const std::array<complexd, 5>& coeff, int degree, double p,
                      double q, double x) {
  const double reach = std::max(std::fabs(p), std::fabs(q));
  if (std::fabs(x) * reach < 0.3) {
    complexd total(0.0, 0.0);
    complexd term_pow(1.0, 0.0);  // (-ix)^j / j!
    for (int j = 0; j < 24; ++j) {
      complexd moment(0.0, 0.0);
      for (int m = 0; m <= degree; ++m) {
        const int n = m + j + 1;
        moment += coeff[m] * ((std::pow(q, n) - std::pow(p, n)) / n);
      }
      total += term_pow * moment;
      term_pow *= complexd(0.0, -x) / static_cast<double>(j + 1);
    }
    return total;
  }
  const complexd u(0.0, -x);
  const complexd eq = cis(-q * x);
  const complexd ep = cis(-p * x);
  complexd moment = (eq - ep) / u;  // zeroth moment
  complexd total = coeff[0] * moment;
  double pn = 1.0, qn = 1.0;
  for (int n = 1; n <= degree; ++n) {
    pn *= p;
    qn *= q;
    moment = (qn * eq - pn * ep - static_cast<double>(n) * moment) / u;
    total += coeff[n] * moment;
  }
  return total;
}

// Spectral weight of the sinc/sinc S kernel: a unit-slope triangle over
// [lambda_gap - 2 b0, lambda_gap + 2 b0] truncated on the right at 2K.
struct TriangleSpectrum {
  bool empty = true;
  double lo = 0.0, peak = 0.0, hi = 0.0;
  double rise_hi = 0.0;           // upper edge of the rising piece
  double Ar = 0.0, Br = 0.0;      // rising piece value (Ar + Br*sigma)
  double Af = 0.0, Bf = 0.0;      // falling piece value
};

TriangleSpectrum triangle_of(double lambda_gap, double b0, double K) {
  TriangleSpectrum t;
  t.lo = lambda_gap - 2.0 * b0;
  t.peak = lambda_gap;
  t.hi = std::min(lambda_gap + 2.0 * b0, 2.0 * K);
  if (t.hi <= t.lo) return t;
  t.empty = false;
  t.rise_hi = std::min(t.peak, t.hi);
  t.Ar = -t.lo / 2.0;
  t.Br = 0.5;
  t.Af = (lambda_gap + 2.0 * b0) / 2.0;
  t.Bf = -0.5;
  return t;
}

// R^(n)(x) = Int T(sigma) (-i sigma)^n e^{-i sigma x} dsigma, n in {0,1,3}.
complexd R_n(const TriangleSpectrum& t, int n, double x) {
  if (t.empty) return complexd(0.0, 0.0);
  complexd in(1.0, 0.0);
  for (int j = 0; j < n; ++j) in *= complexd(0.0, -1.0);
  std::array<complexd, 5> c{};
  c[static_cast<std::size_t>(n)] = in * t.Ar;
  c[static_cast<std::size_t>(n) + 1] = in * t.Br;
  complexd total = poly_fourier(c, n + 1, t.lo, t.rise_hi, x);
  if (t.hi > t.peak) {
    c[static_cast<std::size_t>(n)] = in * t.Af;
    c[static_cast<std::size_t>(n) + 1] = in * t.Bf;
    total += poly_fourier(c, n + 1, t.peak, t.hi, x);
  }
  return total;
}

double K_of(const MeasurementConfig& cfg, double dtau) {
  return 2.0 * cfg.lambda * cfg.kappa0 / (cfg.alpha * cfg.g0 * dtau);
}

}  // namespace

complexd S_sinc_closed(const MeasurementConfig& cfg, double pointer_band,
                       double lambda_gap, double dtau, double b, double b_prime) {
  cfg.validate();
  if (!(dtau > 0.0)) throw DegenerateTime("S requires dtau > 0");
  if (!(pointer_band > 0.0)) throw ConfigError("pointer band limit must be positive");
  if (lambda_gap < 0.0) {
    return std::conj(S_sinc_closed(cfg, pointer_band, -lambda_gap, dtau, b_prime, b));
  }
  const double b0 = pointer_band;
  if (!(lambda_gap > 2.0 * b0)) {
    throw ConditionViolated("closed S requires lambda*(a_k - a_l)/hbar > 2*b0, got " +
                            std::to_string(lambda_gap) + " vs " +
                            std::to_string(2.0 * b0));
  }
  const double K = K_of(cfg, dtau);
  const TriangleSpectrum tri = triangle_of(lambda_gap, b0, K);
  if (tri.empty) return complexd(0.0, 0.0);
  const double d = b - b_prime;
  const double reach = std::max({1.0, std::fabs(b), std::fabs(b_prime)});
  const double norm = 4.0 * K * K * b0;
  if (std::fabs(d) >= 1e-4 * reach) {
    const complexd J =
        (cis(K * d) * R_n(tri, 0, b) - cis(-K * d) * R_n(tri, 0, b_prime)) / (kI * d);
    return J / norm;
  }
  // Near-diagonal expansion: the difference quotient of R through the third
  // derivative at the midpoint; relative truncation ~ (K d)^4.
  const double mid = 0.5 * (b + b_prime);
  const complexd dq = R_n(tri, 1, mid) + (d * d / 24.0) * R_n(tri, 3, mid);
  const complexd J =
      -kI * cis(K * d) * dq + 2.0 * R_n(tri, 0, b_prime) * K * sinc(K * d);
  return J / norm;
}

complexd S_qubit_closed(const MeasurementConfig& cfg, double dtau, double b,
                        double b_prime) {
  // Level gap hbar cancels the 1/hbar in the phase: lambda_gap = lambda.
  return S_sinc_closed(cfg, cfg.b0, cfg.lambda, dtau, b, b_prime);
}

complexd S_oscillator_closed(const MeasurementConfig& cfg, double omega, int k,
                             int l, double dtau, double b, double b_prime) {
  if (k < 0 || l < 0) throw ConfigError("oscillator levels must be nonnegative");
  if (!(omega > 0.0)) throw ConfigError("omega must be strictly positive");
  return S_sinc_closed(cfg, cfg.b0, cfg.lambda * omega * (k - l), dtau, b, b_prime);
}

int S_branch(const MeasurementConfig& cfg, double lambda_gap, double dtau) {
  cfg.validate();
  if (!(dtau > 0.0)) throw DegenerateTime("S requires dtau > 0");
  const double L0 = std::fabs(lambda_gap);
  const double b0 = cfg.b0;
  if (!(L0 > 2.0 * b0)) {
    throw ConditionViolated("branch structure requires lambda*(a_k - a_l)/hbar > 2*b0");
  }
  const double twoK = 2.0 * K_of(cfg, dtau);
  if (twoK >= L0 + 2.0 * b0) return 1;
  if (twoK >= L0) return 2;
  if (twoK > L0 - 2.0 * b0) return 3;
  return 4;
}

complexd S_branch_literal(const MeasurementConfig& cfg, double lambda_gap,
                          double dtau, double b, double b_prime) {
  if (lambda_gap < 0.0) {
    return std::conj(S_branch_literal(cfg, -lambda_gap, dtau, b_prime, b));
  }
  const int branch = S_branch(cfg, lambda_gap, dtau);
  if (branch == 4) return complexd(0.0, 0.0);
  const double reach = std::max({1.0, std::fabs(b), std::fabs(b_prime)});
  const double d = b - b_prime;
  if (std::fabs(d) < 1e-9 * reach || std::fabs(b) < 1e-9 || std::fabs(b_prime) < 1e-9) {
    throw ConfigError(
        "literal branch formulas are singular at b = b', b = 0, b' = 0; "
        "use the production evaluator there");
  }
  const double b0 = cfg.b0;
  const double L0 = lambda_gap;
  const double K = K_of(cfg, dtau);
  const double C2 = 1.0 / (K * K);
  auto sin2 = [](double y) {
    const double s = std::sin(y);
    return s * s;
  };
  if (branch == 1) {
    const complexd term_bp =
        cis(-L0 * b_prime) * cis(-K * d) * (sin2(b0 * b_prime) / (b_prime * b_prime));
    const complexd term_b = cis(-L0 * b) * cis(K * d) * (sin2(b0 * b) / (b * b));
    return (kI * C2 / (2.0 * b0)) * (term_bp - term_b) / d;
  }
  if (branch == 2) {
    auto f = [&](double x) {
      return kI * cis(-L0 * x) * (4.0 * sin2(b0 * x) + cis(-2.0 * b0 * x)) / (x * x);
    };
    const complexd phi_plus =
        complexd(2.0 * b0 + L0 - 2.0 * K, 0.0) + kI * (b + b_prime) / (b * b_prime);
    return (C2 / (8.0 * b0)) *
           (f(b_prime) * cis(-K * d) / d - f(b) * cis(K * d) / d -
            phi_plus * cis(-K * (b + b_prime)) / (b * b_prime));
  }
  auto h = [&](double x) { return kI * cis(-(L0 - 2.0 * b0) * x) / (x * x); };
  const complexd phi_minus =
      complexd(-2.0 * b0 + L0 - 2.0 * K, 0.0) + kI * (b + b_prime) / (b * b_prime);
  return (C2 / (8.0 * b0)) *
         (h(b) * cis(K * d) / d - h(b_prime) * cis(-K * d) / d +
          phi_minus * cis(-K * (b + b_prime)) / (b * b_prime));
}

complexd pointer_state_kernel(const MeasurementConfig& cfg,
                              const BandLimitedState& probe,
                              const BandLimitedState& pointer, double a_k,
                              double dtau, double b, double b_prime) {
  const double overlap = F_eta(probe, cfg, dtau, b - b_prime);
  const double phase = cfg.lambda * a_k * (b - b_prime) / cfg.hbar;
  return position_amplitude(pointer, b) *
         std::conj(position_amplitude(pointer, b_prime)) * overlap * cis(phase);
}

complexd S_quadrature(const MeasurementConfig& cfg, const BandLimitedState& probe,
                      const BandLimitedState& pointer, double a_k, double a_l,
                      double dtau, double b, double b_prime) {
  cfg.validate();
  if (!(dtau > 0.0)) throw DegenerateTime("S requires dtau > 0");
  const double L0 = cfg.lambda * (a_k - a_l) / cfg.hbar;
  const double f_band = 2.0 * cfg.lambda * probe.band_limit / (cfg.alpha * cfg.g0 * dtau);
  QuadratureRequest req;
  req.integrand = [&, L0](double bpp) {
    return cis(-L0 * bpp) * std::norm(position_amplitude(pointer, bpp)) *
           F_eta(probe, cfg, dtau, b - bpp) * F_eta(probe, cfg, dtau, bpp - b_prime);
  };
  req.oscillation_frequency =
      std::fabs(L0) + 2.0 * pointer.band_limit + 2.0 * f_band;
  req.breakpoints = {0.0, b, b_prime};
  return require_converged(integrate_real_line(req), "S_quadrature");
}

ProductCheck product_offdiag_check(const MeasurementConfig& cfg,
                                   const BandLimitedState& probe,
                                   const BandLimitedState& pointer, double a_k,
                                   double a_l, double dtau, double b,
                                   double b_prime, int n_grid, double half_width) {
  cfg.validate();
  if (n_grid < 2) throw ConfigError("contraction grid needs at least 2 points");
  if (!(half_width > 0.0)) throw ConfigError("half_width must be positive");
  const double h = 2.0 * half_width / n_grid;
  const double f_band = 2.0 * cfg.lambda * probe.band_limit / (cfg.alpha * cfg.g0 * dtau);
  const double band =
      std::fabs(cfg.lambda * (a_k - a_l) / cfg.hbar) + 2.0 * f_band +
      2.0 * pointer.band_limit;
  // Midpoint sums over a band-limited integrand are alias-free only while the
  // sampling rate exceeds the full spectral width.
  if (h * band >= 2.0 * M_PI) {
    throw GridTooCoarse("contraction grid spacing " + std::to_string(h) +
                        " cannot resolve spectral width " + std::to_string(band));
  }
  if (half_width * pointer.band_limit < 10.0) {
    throw GridTooCoarse("contraction window is narrower than 10 pointer decay lengths");
  }
  ComplexKahan acc;
  for (int j = 0; j < n_grid; ++j) {
    const double bj = -half_width + (j + 0.5) * h;
    acc.add(pointer_state_kernel(cfg, probe, pointer, a_k, dtau, b, bj) *
            pointer_state_kernel(cfg, probe, pointer, a_l, dtau, bj, b_prime));
  }
  ProductCheck out;
  out.grid_value = acc.value() * h;
  const complexd s_val = S_quadrature(cfg, probe, pointer, a_k, a_l, dtau, b, b_prime);
  const double phase = cfg.lambda * (a_k * b - a_l * b_prime) / cfg.hbar;
  out.kernel_value = cis(phase) * position_amplitude(pointer, b) *
                     std::conj(position_amplitude(pointer, b_prime)) * s_val;
  return out;
}

ThresholdScanResult orthogonality_threshold_scan(const DecoherenceFactorSpec& family,
                                                 const BandLimitedState& pointer,
                                                 const std::vector<double>& dtau_grid,
                                                 double tol) {
  family.cfg.validate();
  if (dtau_grid.empty()) throw ConfigError("dtau grid is empty");
  for (std::size_t i = 0; i + 1 < dtau_grid.size(); ++i) {
    if (!(dtau_grid[i] < dtau_grid[i + 1])) {
      throw ConfigError("dtau grid must be strictly increasing");
    }
  }
  const double a0 = min_gap_of(family);
  const bool closed_ok = orthogonality_condition(family.cfg, a0) &&
                         family.kind != SystemKind::custom &&
                         pointer.kind == BandLimitedState::Kind::sinc &&
                         family.probe.kind == BandLimitedState::Kind::sinc;
  const auto points = scan_sample_pairs(3.0 / family.cfg.b0);
  const auto indices = scan_index_pairs(family);

  auto eval = [&](int k, int l, double b, double bp, double dtau) -> complexd {
    if (closed_ok) {
      if (family.kind == SystemKind::qubit) {
        return S_qubit_closed(family.cfg, dtau, b, bp);
      }
      return S_oscillator_closed(family.cfg, family.omega, k, l, dtau, b, bp);
    }
    DecoherenceFactorSpec idx = family;
    idx.k = k;
    idx.l = l;
    return S_quadrature(family.cfg, family.probe, pointer, eigenvalue_of(idx, k),
                        eigenvalue_of(idx, l), dtau, b, bp);
  };

  if (!orthogonality_condition(family.cfg, a0)) {
    double worst = 0.0;
    for (const auto& [k, l] : indices) {
      for (const auto& [b, bp] : points) {
        worst = std::max(worst, std::abs(eval(k, l, b, bp, dtau_grid.back())));
      }
    }
    throw NotReached(
        "pointer-state overlaps cannot vanish: lambda does not exceed "
        "2*b0*hbar/a0",
        worst);
  }

  std::vector<double> max_abs(dtau_grid.size(), 0.0);
  parallel_for(dtau_grid.size(), [&](std::size_t i) {
    double worst = 0.0;
    for (const auto& [k, l] : indices) {
      for (const auto& [b, bp] : points) {
        worst = std::max(worst, std::abs(eval(k, l, b, bp, dtau_grid[i])));
      }
    }
    max_abs[i] = worst;
  });

  for (std::size_t i = 0; i < dtau_grid.size(); ++i) {
    if (max_abs[i] < tol) {
      return {dtau_grid[i], orthogonality_time(family.cfg, a0), max_abs[i]};
    }
  }
  throw NotReached("pointer-state overlap never dropped below " +
                       std::to_string(tol) + " on the scanned grid",
                   max_abs.back());
}

ThresholdScanResult orthogonality_threshold_scan(const DecoherenceFactorSpec& family,
                                                 const std::vector<double>& dtau_grid,
                                                 double tol) {
  return orthogonality_threshold_scan(
      family, make_sinc_state(family.cfg.b0, family.cfg.hbar), dtau_grid, tol);
}

}  // namespace decolab
