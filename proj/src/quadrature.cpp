#include "decolab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

#include "decolab/errors.hpp"

namespace decolab {
namespace {

// 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1].
// Positive abscissae; index 7 is the midpoint. Gauss points sit at the odd
// Kronrod indices.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelValue {
  complexd integral{0.0, 0.0};
  double error = 0.0;
};

PanelValue gk15(const std::function<complexd(double)>& f, double a, double b,
                long& evaluations) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  complexd fc = f(center);
  complexd res_k = fc * kWgk[7];
  complexd res_g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    double dx = half * kXgk[j];
    complexd f1 = f(center - dx);
    complexd f2 = f(center + dx);
    res_k += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) res_g += (f1 + f2) * kWg[j / 2];
  }
  evaluations += 15;
  return {res_k * half, std::abs(res_k - res_g) * half};
}

struct Panel {
  double lo, hi;
  complexd integral;
  double error;
};

}  // namespace

QuadratureResult integrate_interval(const QuadratureRequest& req, double lo, double hi) {
  QuadratureResult out;
  if (!(hi > lo)) return out;

  std::vector<double> edges;
  edges.push_back(lo);
  edges.push_back(hi);
  for (double bp : req.breakpoints) {
    if (bp > lo && bp < hi) edges.push_back(bp);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  // Width cap: the 15-point rule must see no more than half an oscillation
  // period per panel.
  const double cap = req.oscillation_frequency > 0.0
                         ? M_PI / req.oscillation_frequency
                         : std::numeric_limits<double>::infinity();

  std::vector<Panel> panels;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    double a = edges[e], b = edges[e + 1];
    int pieces = 1;
    if (std::isfinite(cap) && (b - a) > cap) {
      pieces = static_cast<int>(std::ceil((b - a) / cap));
    }
    for (int p = 0; p < pieces; ++p) {
      double pa = a + (b - a) * p / pieces;
      double pb = a + (b - a) * (p + 1) / pieces;
      PanelValue v = gk15(req.integrand, pa, pb, out.evaluations);
      panels.push_back({pa, pb, v.integral, v.error});
    }
  }

  auto worse = [&panels](std::size_t x, std::size_t y) {
    return panels[x].error < panels[y].error;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> queue(worse);
  complexd total{0.0, 0.0};
  double total_err = 0.0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    total += panels[i].integral;
    total_err += panels[i].error;
    queue.push(i);
  }

  auto target = [&](void) {
    return std::max(req.abs_tol, req.rel_tol * std::abs(total));
  };

  while (total_err > target() &&
         static_cast<int>(panels.size()) < req.max_panels && !queue.empty()) {
    std::size_t idx = queue.top();
    queue.pop();
    Panel p = panels[idx];
    if (p.error <= 0.0) break;
    double mid = 0.5 * (p.lo + p.hi);
    PanelValue left = gk15(req.integrand, p.lo, mid, out.evaluations);
    PanelValue right = gk15(req.integrand, mid, p.hi, out.evaluations);
    total += left.integral + right.integral - p.integral;
    total_err += left.error + right.error - p.error;
    panels[idx] = {p.lo, mid, left.integral, left.error};
    panels.push_back({mid, p.hi, right.integral, right.error});
    queue.push(idx);
    queue.push(panels.size() - 1);
  }

  // Deterministic final accumulation in spatial order.
  std::sort(panels.begin(), panels.end(),
            [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
  ComplexKahan acc;
  KahanSum err_acc;
  for (const Panel& p : panels) {
    acc.add(p.integral);
    err_acc.add(p.error);
  }
  out.value = acc.value();
  out.error_estimate = err_acc.value();
  out.panels_used = static_cast<int>(panels.size());
  out.converged = out.error_estimate <= std::max(req.abs_tol, req.rel_tol * std::abs(out.value));
  return out;
}

namespace {

struct TailValue {
  complexd value{0.0, 0.0};
  double error = 0.0;
  bool converged = false;
  int panels = 0;
};

// Sums one tail of a real-line integral. Blocks are one half-period of the
// dominant oscillation (or geometrically growing when no frequency is known);
// the block partial sums feed the epsilon table, which removes both the
// oscillatory and the inverse-power parts of the remainder.
TailValue sum_tail(const std::function<complexd(double)>& f, double start, int dir,
                   double frequency, double abs_tol, long& evaluations) {
  TailValue out;
  ComplexKahan partial;
  double block_err = 0.0;
  double x = start;
  int tiny_blocks = 0;
  // Deep epsilon tables amplify roundoff, so instead of one long table the
  // extrapolation restarts in rounds: each round begins further out, where
  // the non-oscillating 1/x^2 component (the hard case, near-threshold
  // carriers) is smaller and the table converges in fewer columns.
  const int max_rounds = 4;
  const int blocks_per_round = 64;
  WynnEpsilon eps;
  for (int round = 0; round < max_rounds; ++round) {
    eps = WynnEpsilon();
    for (int blk = 0; blk < blocks_per_round; ++blk) {
      double len = frequency > 0.0 ? M_PI / frequency
                                   : std::max(std::fabs(x), 1.0);
      double a = dir > 0 ? x : x - len;
      double b = dir > 0 ? x + len : x;
      PanelValue whole = gk15(f, a, b, evaluations);
      double mid = 0.5 * (a + b);
      PanelValue h1 = gk15(f, a, mid, evaluations);
      PanelValue h2 = gk15(f, mid, b, evaluations);
      complexd block = h1.integral + h2.integral;
      block_err += std::abs(whole.integral - block) + h1.error + h2.error;
      out.panels += 3;
      partial.add(block);
      eps.push(partial.value());
      x = dir > 0 ? b : a;

      if (std::abs(block) < abs_tol / 100.0) {
        ++tiny_blocks;
      } else {
        tiny_blocks = 0;
      }
      if (blk >= 5) {
        double spread = eps.spread();
        if (spread < abs_tol / 4.0 || tiny_blocks >= 3) {
          out.value = eps.estimate();
          out.error = spread + block_err;
          out.converged = true;
          return out;
        }
      }
    }
  }
  out.value = eps.estimate();
  out.error = eps.spread() + block_err;
  out.converged = eps.spread() + block_err <= abs_tol;
  return out;
}

}  // namespace

QuadratureResult integrate_real_line(const QuadratureRequest& req) {
  double span_lo = 0.0, span_hi = 0.0;
  if (!req.breakpoints.empty()) {
    span_lo = *std::min_element(req.breakpoints.begin(), req.breakpoints.end());
    span_hi = *std::max_element(req.breakpoints.begin(), req.breakpoints.end());
  }
  double pad = 40.0;
  if (req.oscillation_frequency > 0.0) {
    pad = std::max(pad, 16.0 * M_PI / req.oscillation_frequency);
  }
  if (req.truncation_hint) pad = std::max(pad, *req.truncation_hint);
  const double core_lo = span_lo - pad;
  const double core_hi = span_hi + pad;

  QuadratureRequest core_req = req;
  core_req.abs_tol = req.abs_tol / 2.0;
  QuadratureResult core = integrate_interval(core_req, core_lo, core_hi);

  TailValue right = sum_tail(req.integrand, core_hi, +1, req.oscillation_frequency,
                             req.abs_tol / 4.0, core.evaluations);
  TailValue left = sum_tail(req.integrand, core_lo, -1, req.oscillation_frequency,
                            req.abs_tol / 4.0, core.evaluations);

  QuadratureResult out;
  ComplexKahan acc;
  acc.add(core.value);
  acc.add(right.value);
  acc.add(left.value);
  out.value = acc.value();
  out.error_estimate = core.error_estimate + right.error + left.error;
  out.panels_used = core.panels_used + right.panels + left.panels;
  out.evaluations = core.evaluations;
  bool within = out.error_estimate <=
                std::max(req.abs_tol, req.rel_tol * std::abs(out.value));
  out.converged = core.converged && right.converged && left.converged && within;
  return out;
}

complexd require_converged(const QuadratureResult& r, const char* what) {
  if (!r.converged) {
    throw NoConvergence(std::string(what) + ": error target unmet (achieved " +
                            std::to_string(r.error_estimate) + ")",
                        r.value, r.error_estimate);
  }
  return r.value;
}

}  // namespace decolab
