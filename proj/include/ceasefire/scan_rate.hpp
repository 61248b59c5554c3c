#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ceasefire/quadrature.hpp"
#include "ceasefire/two_mode.hpp"

namespace ceasefire {

struct FourModeParams;  // four_mode.hpp

// Scan-rate enhancement E: ratio of the visibility-squared integral to that of
// a twice-overcoupled standard haloscope with the same kappa_l.
struct EnhancementResult {
  double value;
  double integral_cf;
  double integral_std;
  double integration_window;
  double est_rel_error;
};

struct MismatchPoint {
  double c_g;       // state-swap cooperativity 4 g^2/(kappa_m kappa_l)
  double c_h;       // two-mode-squeezing cooperativity
  double epsilon;   // fractional rate mismatch (g - h)/g0, g0 = (g + h)/2
  double refl_sq;   // |chi_mm(0)|^2
  bool oscillating; // at/past the self-oscillation boundary
};

struct IntegralResult {
  double value;
  double est_rel_error;
  double window;
};

// Integral of alpha(omega)^2 over the real line; `fn` returns alpha itself.
IntegralResult integrate_alpha_sq(const std::function<double(double)>& fn,
                                  double rel_tol, double seed_halfwidth,
                                  const std::vector<double>& breakpoints = {});
IntegralResult integrate_alpha_sq_batch(const quad::BatchFn& alpha_sq_fn,
                                        double rel_tol, double seed_halfwidth,
                                        const std::vector<double>& breakpoints = {});

// Initial half-width heuristic for the enhancement integrals.
double enhancement_seed_window(const TwoModeParams& p);

EnhancementResult enhancement(const TwoModeParams& p, double rel_tol = 1e-9);

struct OvercouplingResult {
  double kappa_m_opt;
  double e_opt;
  bool boundary_warning;
};

// Golden-section maximization of E over kappa_m at matched rates g = h.
OvercouplingResult optimize_overcoupling(double g_equals_h, double kappa_l,
                                         std::pair<double, double> search_range,
                                         double rel_tol = 1e-8);

struct EnhancementMap {
  std::vector<double> g_values;            // matched g = h, in kappa_l units
  std::vector<double> ratio_values;        // kappa_m / kappa_l
  std::vector<double> e;                   // row-major [g][ratio]
  std::vector<std::uint8_t> oscillating;   // cells at/past threshold (skipped)
  std::vector<double> ridge_ratio;         // per-g argmax ratio
  std::vector<double> ridge_e;

  double cell(std::size_t gi, std::size_t ri) const {
    return e[gi * ratio_values.size() + ri];
  }
};

EnhancementMap enhancement_map(std::span<const double> g_grid,
                               std::span<const double> ratio_grid,
                               double kappa_l = 1.0, double rel_tol = 1e-7,
                               int threads = 0);

MismatchPoint mismatch_reflection(double c_g, double c_h, const TwoModeParams& p_base);

struct MismatchFormulas {
  double chi_mm0_approx;              // 1 - 2/(2 C eps + 1)
  double alpha0_ratio_approx;         // alpha_cf(0)/alpha_bar ~ 1/(C eps^2/4 + 1)
};

MismatchFormulas mismatch_formulas(double c, double epsilon);

struct MismatchSweep {
  std::vector<double> g_over_h;
  std::vector<double> e;                  // NaN where oscillating
  std::vector<std::uint8_t> oscillating;
  int argmax_index;                       // -1 when every cell is flagged
};

// E versus g/h at fixed h and kappa_m. When `extended` is non-null the
// four-mode model is used and the ratio rescales every swap rate together
// (one difference-frequency drive feeds all of them).
MismatchSweep mismatch_enhancement_sweep(double h_fixed, double kappa_m,
                                         std::span<const double> g_over_h,
                                         const FourModeParams* extended = nullptr,
                                         double rel_tol = 1e-8);

}  // namespace ceasefire
