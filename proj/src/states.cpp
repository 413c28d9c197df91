#include "decolab/states.hpp"

#include <cmath>
#include <utility>

#include "decolab/errors.hpp"
#include "decolab/numeric.hpp"
#include "decolab/quadrature.hpp"

namespace decolab {

BandLimitedState make_sinc_state(double tau, double hbar) {
  if (!(tau > 0.0)) throw ConfigError("band limit must be strictly positive");
  if (!(hbar > 0.0)) throw ConfigError("hbar must be strictly positive");
  BandLimitedState s;
  s.kind = BandLimitedState::Kind::sinc;
  s.band_limit = tau;
  s.hbar = hbar;
  const double flat = 1.0 / std::sqrt(2.0 * hbar * tau);
  s.momentum_amplitude = [flat](double) { return complexd(flat, 0.0); };
  const double amp = std::sqrt(tau / M_PI);
  s.position_closed = [tau, amp](double x) {
    return complexd(amp * sinc(tau * x), 0.0);
  };
  return s;
}

BandLimitedState make_custom_state(double tau,
                                   std::function<complexd(double)> momentum_amplitude,
                                   double hbar,
                                   std::function<complexd(double)> position_closed) {
  if (!(tau > 0.0)) throw ConfigError("band limit must be strictly positive");
  if (!(hbar > 0.0)) throw ConfigError("hbar must be strictly positive");
  if (!momentum_amplitude) throw ConfigError("momentum_amplitude is required");
  BandLimitedState s;
  s.kind = BandLimitedState::Kind::custom;
  s.band_limit = tau;
  s.hbar = hbar;
  s.momentum_amplitude = std::move(momentum_amplitude);
  s.position_closed = std::move(position_closed);
  return s;
}

complexd position_amplitude(const BandLimitedState& state, double x) {
  if (state.position_closed) return state.position_closed(x);
  const double hbar = state.hbar;
  const double p_max = hbar * state.band_limit;
  QuadratureRequest req;
  req.integrand = [&state, x, hbar](double p) {
    const double phase = p * x / hbar;
    return state.momentum_amplitude(p) * complexd(std::cos(phase), std::sin(phase));
  };
  req.oscillation_frequency = std::fabs(x) / hbar;
  QuadratureResult r = integrate_interval(req, -p_max, p_max);
  return require_converged(r, "position_amplitude") /
         std::sqrt(2.0 * M_PI * hbar);
}

complexd vanishing_check(const BandLimitedState& s1, const BandLimitedState& s2,
                         double a) {
  QuadratureRequest req;
  req.integrand = [&s1, &s2, a](double x) {
    const complexd phase(std::cos(a * x), std::sin(a * x));
    return phase * position_amplitude(s1, x) * std::conj(position_amplitude(s2, x));
  };
  req.oscillation_frequency = std::fabs(a) + s1.band_limit + s2.band_limit;
  req.breakpoints = {0.0};
  QuadratureResult r = integrate_real_line(req);
  return require_converged(r, "vanishing_check");
}

complexd vanishing_check(const BandLimitedState& state, double) {
  throw NotIntegrable(
      "a single band-limited position amplitude decays only as 1/x and is not "
      "absolutely integrable; supply a product of two states (band limit " +
      std::to_string(state.band_limit) + ")");
}

double F_eta(const BandLimitedState& probe, const MeasurementConfig& cfg,
             double dtau, double eta) {
  cfg.validate();
  if (!(dtau > 0.0)) throw DegenerateTime("F requires dtau > 0");
  if (probe.kind == BandLimitedState::Kind::sinc) {
    const double c = 2.0 * cfg.lambda * probe.band_limit / (cfg.alpha * cfg.g0 * dtau);
    return sinc(c * eta);
  }
  const double hbar = probe.hbar;
  const double p_max = hbar * probe.band_limit;
  const double freq = 2.0 * cfg.lambda * eta / (cfg.alpha * cfg.g0 * dtau * hbar);
  QuadratureRequest req;
  req.integrand = [&probe, freq](double p) {
    const double phase = freq * p;
    return std::norm(probe.momentum_amplitude(p)) *
           complexd(std::cos(phase), std::sin(phase));
  };
  req.oscillation_frequency = std::fabs(freq);
  QuadratureResult r = integrate_interval(req, -p_max, p_max);
  return require_converged(r, "F_eta").real();
}

double exponential_type_of_product(double tau1, double tau2) {
  if (!(tau1 > 0.0) || !(tau2 > 0.0)) {
    throw ConfigError("exponential types must be strictly positive");
  }
  return tau1 + tau2;
}

}  // namespace decolab
