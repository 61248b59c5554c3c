#include "ceasefire/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "ceasefire/types.hpp"

namespace ceasefire::quad {

namespace {

// G7/K15 nodes and weights on [-1, 1]; rows: abscissa, Gauss weight (0 for
// Kronrod-only nodes), Kronrod weight.
constexpr double kNw[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

struct Panel {
  double a, b;
  double value;
  double error;
};

struct PanelOrder {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

void panel_nodes(double a, double b, double* x) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  x[0] = mid;
  for (int i = 1; i < 8; ++i) {
    const double d = half * kNw[i][0];
    x[2 * i - 1] = mid - d;
    x[2 * i] = mid + d;
  }
}

Panel panel_from_values(double a, double b, const double* y) {
  const double half = 0.5 * (b - a);
  double g = kNw[0][1] * y[0];
  double k = kNw[0][2] * y[0];
  for (int i = 1; i < 8; ++i) {
    const double pair = y[2 * i - 1] + y[2 * i];
    g += kNw[i][1] * pair;
    k += kNw[i][2] * pair;
  }
  g *= half;
  k *= half;
  return Panel{a, b, k, std::abs(k - g)};
}

// Evaluate a set of panels with one batched integrand call.
std::vector<Panel> eval_panels(const BatchFn& f,
                               const std::vector<std::pair<double, double>>& spans) {
  std::vector<double> xs(spans.size() * 15);
  for (std::size_t p = 0; p < spans.size(); ++p) {
    panel_nodes(spans[p].first, spans[p].second, xs.data() + 15 * p);
  }
  std::vector<double> ys(xs.size());
  f(xs.data(), ys.data(), xs.size());
  std::vector<Panel> out;
  out.reserve(spans.size());
  for (std::size_t p = 0; p < spans.size(); ++p) {
    const Panel pl = panel_from_values(spans[p].first, spans[p].second, ys.data() + 15 * p);
    if (!std::isfinite(pl.value) || !std::isfinite(pl.error)) {
      throw Error(ErrorKind::quadrature, "non-finite integrand value in quadrature panel");
    }
    out.push_back(pl);
  }
  return out;
}

}  // namespace

Result integrate(const BatchFn& f, double a, double b, double rel_tol,
                 const std::vector<double>& breakpoints, std::size_t max_panels) {
  if (!(b > a)) return {0.0, 0.0};
  std::vector<double> bounds{a};
  for (double bp : breakpoints) {
    if (bp > a && bp < b) bounds.push_back(bp);
  }
  bounds.push_back(b);
  std::sort(bounds.begin(), bounds.end());

  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    if (bounds[i + 1] > bounds[i]) spans.emplace_back(bounds[i], bounds[i + 1]);
  }

  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> heap;
  double total = 0.0, err = 0.0;
  for (const Panel& p : eval_panels(f, spans)) {
    total += p.value;
    err += p.error;
    heap.push(p);
  }

  std::size_t n_panels = spans.size();
  while (err > rel_tol * std::max(std::abs(total), 1e-300) && !heap.empty()) {
    if (n_panels >= max_panels) {
      throw Error(ErrorKind::quadrature, "quadrature panel budget exhausted");
    }
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval cannot be split further; keep its estimate.
      continue;
    }
    const auto kids = eval_panels(f, {{worst.a, mid}, {mid, worst.b}});
    total += kids[0].value + kids[1].value - worst.value;
    err += kids[0].error + kids[1].error - worst.error;
    heap.push(kids[0]);
    heap.push(kids[1]);
    ++n_panels;
  }
  return {total, err};
}

TailIntegral integrate_line(const BatchFn& f, double seed_halfwidth, double rel_tol,
                            const std::vector<double>& breakpoints) {
  if (!(seed_halfwidth > 0.0)) {
    throw Error(ErrorKind::invalid_params, "integration window seed must be positive");
  }
  if (!(rel_tol > 1e-12 && rel_tol < 1e-2)) {
    throw Error(ErrorKind::invalid_params, "quadrature tolerance out of range");
  }

  // Geometric ladder of boundaries toward zero so narrow central features are
  // seeded before refinement starts.
  std::vector<double> bps;
  for (double w = seed_halfwidth * 0.5; w > seed_halfwidth * 1e-9; w *= 0.5) {
    bps.push_back(w);
    bps.push_back(-w);
  }
  for (double bp : breakpoints) {
    bps.push_back(bp);
  }

  double window = seed_halfwidth;
  Result inner = integrate(f, -window, window, 0.5 * rel_tol, bps);
  double total = inner.value;
  double err = inner.abs_error;

  constexpr int kMaxDoublings = 60;
  for (int k = 0; k < kMaxDoublings; ++k) {
    const Result lo = integrate(f, -2.0 * window, -window, 0.5 * rel_tol, breakpoints);
    const Result hi = integrate(f, window, 2.0 * window, 0.5 * rel_tol, breakpoints);
    const double shell = lo.value + hi.value;
    total += shell;
    err += lo.abs_error + hi.abs_error;
    window *= 2.0;
    if (!(std::abs(shell) > rel_tol * std::abs(total))) {
      const double denom = std::max(std::abs(total), 1e-300);
      return {total, (err + std::abs(shell)) / denom, window};
    }
  }
  throw Error(ErrorKind::window_expansion,
              "window expansion failed: integrand does not decay");
}

}  // namespace ceasefire::quad
