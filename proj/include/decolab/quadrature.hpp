#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "decolab/numeric.hpp"

namespace decolab {

// One-dimensional complex-valued integral request. oscillation_frequency is
// the dominant |a| among e^{iax}-type factors of the integrand; panels are
// kept no wider than pi over that frequency so the fixed 15-point rule always
// resolves the fastest oscillation. breakpoints seed panel edges at kinks and
// shifted centers. truncation_hint widens the directly integrated core window
// of a real-line integral beyond the breakpoint span.
struct QuadratureRequest {
  std::function<complexd(double)> integrand;
  double oscillation_frequency = 0.0;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  std::optional<double> truncation_hint;
  std::vector<double> breakpoints;
  int max_panels = 20000;
};

struct QuadratureResult {
  complexd value{0.0, 0.0};
  double error_estimate = 0.0;
  int panels_used = 0;
  bool converged = true;
  long evaluations = 0;
};

// Adaptive Gauss-Kronrod integration over [lo, hi].
QuadratureResult integrate_interval(const QuadratureRequest& req, double lo, double hi);

// Integral over the whole real line. The core window (breakpoint span plus
// padding) is integrated directly; each tail is summed cycle by cycle and the
// cycle partial sums are extrapolated with the Wynn epsilon algorithm, which
// handles both oscillatory and inverse-power tail components. The integrand
// must decay at least as 1/x^2 (caller-asserted).
QuadratureResult integrate_real_line(const QuadratureRequest& req);

// Throwing convenience: unwraps the value or raises NoConvergence carrying
// the achieved value and error estimate.
complexd require_converged(const QuadratureResult& r, const char* what);

}  // namespace decolab
