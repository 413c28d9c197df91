#include "decolab/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "decolab/errors.hpp"
#include "decolab/numeric.hpp"
#include "decolab/quadrature.hpp"

namespace decolab {

double eigenvalue_of(const DecoherenceFactorSpec& spec, int i) {
  switch (spec.kind) {
    case SystemKind::qubit:
      if (i != 0 && i != 1) throw ConfigError("qubit index must be 0 (+) or 1 (-)");
      return (i == 0 ? +0.5 : -0.5) * spec.cfg.hbar;
    case SystemKind::oscillator:
      if (i < 0) throw ConfigError("oscillator level must be nonnegative");
      if (!(spec.omega > 0.0)) throw ConfigError("omega must be strictly positive");
      return (i + 0.5) * spec.cfg.hbar * spec.omega;
    case SystemKind::custom:
      if (i < 0 || i >= static_cast<int>(spec.spectrum.eigenvalues.size())) {
        throw ConfigError("custom spectrum index out of range");
      }
      return spec.spectrum.eigenvalues[static_cast<std::size_t>(i)];
  }
  throw ConfigError("unknown system kind");
}

complexd I_quadrature(const DecoherenceFactorSpec& spec) {
  spec.cfg.validate();
  if (!(spec.dtau > 0.0)) throw DegenerateTime("I requires dtau > 0");
  const MeasurementConfig& cfg = spec.cfg;
  const double gap = eigenvalue_of(spec, spec.k) - eigenvalue_of(spec, spec.l);
  const double w = cfg.alpha * cfg.g0 * spec.dtau * gap / cfg.hbar;
  const double c = 2.0 * cfg.lambda / (cfg.alpha * cfg.g0 * spec.dtau);
  const double u = c * spec.b;
  const double v = c * spec.b_prime;
  const BandLimitedState& probe = spec.probe;
  QuadratureRequest req;
  req.integrand = [&probe, w, u, v](double q) {
    const complexd phase(std::cos(w * q), -std::sin(w * q));
    return phase * position_amplitude(probe, q - u) *
           std::conj(position_amplitude(probe, q - v));
  };
  req.oscillation_frequency = std::fabs(w) + 2.0 * probe.band_limit;
  req.breakpoints = {u, v};
  QuadratureResult r = integrate_real_line(req);
  return require_converged(r, "I_quadrature");
}

complexd I_sinc_closed(const MeasurementConfig& cfg, double probe_band,
                       double w, double b, double b_prime, double dtau) {
  cfg.validate();
  if (!(dtau > 0.0)) throw DegenerateTime("I requires dtau > 0");
  if (!(probe_band > 0.0)) throw ConfigError("probe band limit must be positive");
  if (w < 0.0) {
    return std::conj(I_sinc_closed(cfg, probe_band, -w, b, b_prime, dtau));
  }
  const double kappa0 = probe_band;
  if (w >= 2.0 * kappa0) return complexd(0.0, 0.0);
  const double c = 2.0 * cfg.lambda / (cfg.alpha * cfg.g0 * dtau);
  const double height = 1.0 - w / (2.0 * kappa0);
  const double carrier = sinc((kappa0 - 0.5 * w) * c * (b - b_prime));
  const double phase = -0.5 * w * c * (b + b_prime);
  return height * carrier * complexd(std::cos(phase), std::sin(phase));
}

complexd I_qubit_closed(const MeasurementConfig& cfg, double b, double b_prime,
                        double dtau) {
  const double w = cfg.alpha * cfg.g0 * dtau;  // gap hbar cancels against 1/hbar
  return I_sinc_closed(cfg, cfg.kappa0, w, b, b_prime, dtau);
}

complexd I_oscillator_closed(const MeasurementConfig& cfg, double omega, int k,
                             int l, double b, double b_prime, double dtau) {
  if (k < 0 || l < 0) throw ConfigError("oscillator levels must be nonnegative");
  if (!(omega > 0.0)) throw ConfigError("omega must be strictly positive");
  const double w = cfg.alpha * cfg.g0 * dtau * omega * (k - l);
  return I_sinc_closed(cfg, cfg.kappa0, w, b, b_prime, dtau);
}

std::vector<std::pair<double, double>> scan_sample_pairs(double span, int n) {
  SplitMix64 rng(12345);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double b = rng.uniform(-span, span);
    double bp = rng.uniform(-span, span);
    pairs.emplace_back(b, bp);
  }
  return pairs;
}

std::vector<std::pair<int, int>> scan_index_pairs(const DecoherenceFactorSpec& family) {
  switch (family.kind) {
    case SystemKind::qubit:
      return {{0, 1}};
    case SystemKind::oscillator:
      return {{0, 1}, {1, 2}, {0, 2}};
    case SystemKind::custom: {
      std::vector<std::pair<int, int>> pairs;
      const int n = static_cast<int>(family.spectrum.eigenvalues.size());
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
      return pairs;
    }
  }
  throw ConfigError("unknown system kind");
}

double min_gap_of(const DecoherenceFactorSpec& family) {
  switch (family.kind) {
    case SystemKind::qubit:
      return family.cfg.hbar;
    case SystemKind::oscillator:
      if (!(family.omega > 0.0)) throw ConfigError("omega must be strictly positive");
      return family.cfg.hbar * family.omega;
    case SystemKind::custom:
      return min_gap(family.spectrum);
  }
  throw ConfigError("unknown system kind");
}

ThresholdScanResult decoherence_threshold_scan(const DecoherenceFactorSpec& family,
                                               const std::vector<double>& dtau_grid,
                                               double tol) {
  family.cfg.validate();
  if (dtau_grid.empty()) throw ConfigError("dtau grid is empty");
  for (std::size_t i = 0; i + 1 < dtau_grid.size(); ++i) {
    if (!(dtau_grid[i] < dtau_grid[i + 1])) {
      throw ConfigError("dtau grid must be strictly increasing");
    }
  }
  const auto points = scan_sample_pairs(3.0 / family.cfg.b0);
  const auto indices = scan_index_pairs(family);

  std::vector<double> max_abs(dtau_grid.size(), 0.0);
  parallel_for(dtau_grid.size(), [&](std::size_t i) {
    DecoherenceFactorSpec probe_spec = family;
    probe_spec.dtau = dtau_grid[i];
    double worst = 0.0;
    for (const auto& [k, l] : indices) {
      probe_spec.k = k;
      probe_spec.l = l;
      for (const auto& [b, bp] : points) {
        probe_spec.b = b;
        probe_spec.b_prime = bp;
        complexd val;
        switch (family.kind) {
          case SystemKind::qubit:
            val = I_qubit_closed(family.cfg, b, bp, probe_spec.dtau);
            break;
          case SystemKind::oscillator: {
            val = I_oscillator_closed(family.cfg, family.omega, k, l, b, bp,
                                      probe_spec.dtau);
            break;
          }
          case SystemKind::custom:
            val = I_quadrature(probe_spec);
            break;
        }
        worst = std::max(worst, std::abs(val));
      }
    }
    max_abs[i] = worst;
  });

  for (std::size_t i = 0; i < dtau_grid.size(); ++i) {
    if (max_abs[i] < tol) {
      return {dtau_grid[i], decoherence_time(family.cfg, min_gap_of(family)),
              max_abs[i]};
    }
  }
  throw NotReached("coherence magnitude never dropped below " + std::to_string(tol) +
                       " on the scanned grid",
                   max_abs.back());
}

}  // namespace decolab
