#include "decolab/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "decolab/errors.hpp"

namespace decolab {
namespace {

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(field) + " must be strictly positive, got " +
                      std::to_string(v));
  }
}

}  // namespace

void MeasurementConfig::validate() const {
  require_positive(hbar, "hbar");
  require_positive(alpha, "alpha");
  require_positive(g0, "g0");
  require_positive(lambda, "lambda");
  require_positive(kappa0, "kappa0");
  require_positive(b0, "b0");
}

void SpectrumSpec::validate() const {
  if (eigenvalues.size() < 2) {
    throw SingleLevel("spectrum needs at least 2 levels, got " +
                      std::to_string(eigenvalues.size()));
  }
  if (amplitudes.size() != eigenvalues.size()) {
    throw ConfigError("amplitudes length " + std::to_string(amplitudes.size()) +
                      " does not match eigenvalues length " +
                      std::to_string(eigenvalues.size()));
  }
  double scale = 0.0;
  for (double a : eigenvalues) scale = std::max(scale, std::fabs(a));
  const double tol = 1e-12 * std::max(scale, 1e-300);
  std::vector<double> sorted = eigenvalues;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i + 1] - sorted[i] <= tol) {
      throw DegenerateSpectrum("eigenvalues " + std::to_string(sorted[i]) +
                               " and " + std::to_string(sorted[i + 1]) +
                               " are degenerate within tolerance");
    }
  }
  double norm = 0.0;
  for (const complexd& s : amplitudes) norm += std::norm(s);
  if (std::fabs(norm - 1.0) > 1e-12) {
    throw ConfigError("amplitudes are not normalized: sum |s|^2 = " +
                      std::to_string(norm));
  }
}

void PulseProfile::validate() const {
  require_positive(g0, "g0");
  if (!(t_f > t_in)) {
    throw ConfigError("pulse window requires t_f > t_in");
  }
}

double min_gap(const SpectrumSpec& spec) {
  spec.validate();
  std::vector<double> sorted = spec.eigenvalues;
  std::sort(sorted.begin(), sorted.end());
  double gap = sorted.back() - sorted.front();
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    gap = std::min(gap, sorted[i + 1] - sorted[i]);
  }
  return gap;
}

double decoherence_time(const MeasurementConfig& cfg, double a0) {
  cfg.validate();
  if (!(a0 > 0.0)) throw ConfigError("a0 must be positive");
  return 2.0 * cfg.kappa0 * cfg.hbar / (cfg.alpha * cfg.g0 * a0);
}

bool orthogonality_condition(const MeasurementConfig& cfg, double a0) {
  cfg.validate();
  if (!(a0 > 0.0)) throw ConfigError("a0 must be positive");
  return cfg.lambda > 2.0 * cfg.b0 * cfg.hbar / a0;
}

double orthogonality_time(const MeasurementConfig& cfg, double a0) {
  if (!orthogonality_condition(cfg, a0)) {
    throw OrthogonalityUnattainable(
        "lambda = " + std::to_string(cfg.lambda) +
        " does not exceed 2*b0*hbar/a0 = " +
        std::to_string(2.0 * cfg.b0 * cfg.hbar / a0));
  }
  const double denom = a0 - 2.0 * cfg.b0 * cfg.hbar / cfg.lambda;
  return 4.0 * cfg.kappa0 * cfg.hbar / (cfg.alpha * cfg.g0 * denom);
}

double beta_of(const MeasurementConfig& cfg, double t) {
  cfg.validate();
  if (!(t > 0.0)) {
    throw DegenerateTime("beta is undefined at t = " + std::to_string(t));
  }
  return 2.0 * cfg.lambda / (cfg.alpha * cfg.g0 * cfg.g0 * t * t);
}

SpectrumSpec qubit_spectrum(double hbar) {
  const double r = 1.0 / std::sqrt(2.0);
  return SpectrumSpec{{+0.5 * hbar, -0.5 * hbar}, {complexd(r), complexd(r)}};
}

SpectrumSpec oscillator_spectrum(int levels, double omega, double hbar) {
  if (levels < 2) throw SingleLevel("oscillator needs at least 2 levels");
  if (!(omega > 0.0)) throw ConfigError("omega must be strictly positive");
  SpectrumSpec spec;
  const double r = 1.0 / std::sqrt(static_cast<double>(levels));
  for (int k = 0; k < levels; ++k) {
    spec.eigenvalues.push_back((k + 0.5) * hbar * omega);
    spec.amplitudes.push_back(complexd(r));
  }
  return spec;
}

}  // namespace decolab
