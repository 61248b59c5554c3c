#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ceasefire::quad {

// Integrands are evaluated in batches so the vectorized kernels can be used
// directly as quadrature targets.
using BatchFn = std::function<void(const double* x, double* y, std::size_t n)>;

inline BatchFn batch_of(const std::function<double(double)>& f) {
  return [f](const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = f(x[i]);
  };
}

struct Result {
  double value;
  double abs_error;  // accumulated panel error estimates
};

// Adaptive Gauss-Kronrod (G7/K15) integration over [a, b]. Breakpoints inside
// the interval become panel boundaries; use them to pin narrow features.
Result integrate(const BatchFn& f, double a, double b, double rel_tol,
                 const std::vector<double>& breakpoints = {},
                 std::size_t max_panels = 400000);

struct TailIntegral {
  double value;
  double est_rel_error;
  double window;  // final half-width of the integration window
};

// Integral of f over the whole real line for integrands that decay at
// infinity. Starts from a symmetric window [-w, w] and doubles it until the
// outermost shell contributes less than rel_tol of the running total.
TailIntegral integrate_line(const BatchFn& f, double seed_halfwidth,
                            double rel_tol,
                            const std::vector<double>& breakpoints = {});

}  // namespace ceasefire::quad
