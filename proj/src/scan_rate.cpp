#include "ceasefire/scan_rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ceasefire/four_mode.hpp"
#include "ceasefire/parallel.hpp"

namespace ceasefire {

IntegralResult integrate_alpha_sq_batch(const quad::BatchFn& alpha_sq_fn,
                                        double rel_tol, double seed_halfwidth,
                                        const std::vector<double>& breakpoints) {
  const quad::TailIntegral t =
      quad::integrate_line(alpha_sq_fn, seed_halfwidth, rel_tol, breakpoints);
  return {t.value, t.est_rel_error, t.window};
}

IntegralResult integrate_alpha_sq(const std::function<double(double)>& fn,
                                  double rel_tol, double seed_halfwidth,
                                  const std::vector<double>& breakpoints) {
  auto batch = [&fn](const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      const double a = fn(x[i]);
      y[i] = a * a;
    }
  };
  return integrate_alpha_sq_batch(batch, rel_tol, seed_halfwidth, breakpoints);
}

double enhancement_seed_window(const TwoModeParams& p) {
  double scale = std::max(p.kappa_l, p.kappa_m);
  if (p.kappa_m > 0.0) {
    scale = std::max(scale, 4.0 * p.g * p.g / p.kappa_m);
  }
  return 50.0 * scale;
}

namespace {

void require_not_oscillating(const TwoModeParams& p) {
  const double beta0 = p.g * p.g - p.h * p.h + 0.25 * p.kappa_m * p.kappa_l;
  if (beta0 <= divergence_threshold(p)) {
    throw Error(ErrorKind::parametric_divergence,
                "parametric divergence: past the oscillation threshold");
  }
}

}  // namespace

EnhancementResult enhancement(const TwoModeParams& p, double rel_tol) {
  if (!(rel_tol > 1e-12 && rel_tol <= 1e-7)) {
    throw Error(ErrorKind::invalid_params,
                "enhancement tolerance must lie in (1e-12, 1e-7] so accepted "
                "results stay below the 1e-6 error bound");
  }
  require_not_oscillating(p);
  const double seed = enhancement_seed_window(p);

  const auto cf_kp = cf_kernel_params(p);
  auto cf_fn = [&cf_kp](const double* x, double* y, std::size_t n) {
    kernels::alpha_cf_sq(x, y, n, cf_kp);
  };
  const auto std_kp = std_kernel_params(2.0 * p.kappa_l, p);
  auto std_fn = [&std_kp](const double* x, double* y, std::size_t n) {
    kernels::alpha_std_sq(x, y, n, std_kp);
  };

  EnhancementResult r;
  if (cf_kp.a1 == 0.0) {
    // No transmission path (g = h = 0 or n_a = 0).
    r.integral_cf = 0.0;
    const IntegralResult den = integrate_alpha_sq_batch(std_fn, rel_tol, seed);
    r.integral_std = den.value;
    r.value = 0.0;
    r.integration_window = den.window;
    r.est_rel_error = den.est_rel_error;
    return r;
  }

  const IntegralResult num = integrate_alpha_sq_batch(cf_fn, rel_tol, seed);
  const IntegralResult den = integrate_alpha_sq_batch(std_fn, rel_tol, seed);
  r.integral_cf = num.value;
  r.integral_std = den.value;
  r.value = num.value / den.value;
  r.integration_window = num.window;
  r.est_rel_error = num.est_rel_error + den.est_rel_error;
  if (!(r.est_rel_error < 1e-6)) {
    throw Error(ErrorKind::quadrature, "enhancement error estimate above the acceptance bound");
  }
  return r;
}

OvercouplingResult optimize_overcoupling(double g_equals_h, double kappa_l,
                                         std::pair<double, double> search_range,
                                         double rel_tol) {
  if (!(g_equals_h > 0.0) || !(kappa_l > 0.0)) {
    throw Error(ErrorKind::invalid_params, "optimize_overcoupling needs g > 0, kappa_l > 0");
  }
  auto [lo, hi] = search_range;
  if (!(lo > 0.0 && hi > lo)) {
    throw Error(ErrorKind::invalid_params, "search range must be positive and ordered");
  }

  auto e_of = [&](double kappa_m) {
    const TwoModeParams p(kappa_l, kappa_m, g_equals_h, g_equals_h);
    return enhancement(p, rel_tol).value;
  };

  // Golden-section search on log(kappa_m); E(kappa_m) is unimodal over the
  // ranges of interest and the dense-grid oracle in the tests backs that up.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(lo), b = std::log(hi);
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = e_of(std::exp(x1));
  double f2 = e_of(std::exp(x2));
  for (int it = 0; it < 80 && (b - a) > 1e-8; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = e_of(std::exp(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = e_of(std::exp(x1));
    }
  }
  const double xopt = 0.5 * (a + b);
  OvercouplingResult r;
  r.kappa_m_opt = std::exp(xopt);
  r.e_opt = e_of(r.kappa_m_opt);
  const double span = std::log(hi) - std::log(lo);
  r.boundary_warning = (xopt - std::log(lo) < 0.005 * span) ||
                       (std::log(hi) - xopt < 0.005 * span);
  return r;
}

EnhancementMap enhancement_map(std::span<const double> g_grid,
                               std::span<const double> ratio_grid,
                               double kappa_l, double rel_tol, int threads) {
  if (g_grid.empty() || ratio_grid.empty()) {
    throw Error(ErrorKind::invalid_params, "enhancement_map grids must be non-empty");
  }
  EnhancementMap m;
  m.g_values.assign(g_grid.begin(), g_grid.end());
  m.ratio_values.assign(ratio_grid.begin(), ratio_grid.end());
  const std::size_t nr = m.ratio_values.size();
  m.e.assign(m.g_values.size() * nr, 0.0);
  m.oscillating.assign(m.e.size(), 0);

  parallel_for(m.e.size(), threads, [&](std::size_t idx) {
    const double g = m.g_values[idx / nr];
    const double ratio = m.ratio_values[idx % nr];
    const TwoModeParams p(kappa_l, ratio * kappa_l, g, g);
    const double beta0 = p.g * p.g - p.h * p.h + 0.25 * p.kappa_m * p.kappa_l;
    if (beta0 <= divergence_threshold(p)) {
      m.oscillating[idx] = 1;
      m.e[idx] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    m.e[idx] = enhancement(p, rel_tol).value;
  });

  m.ridge_ratio.resize(m.g_values.size());
  m.ridge_e.resize(m.g_values.size());
  for (std::size_t gi = 0; gi < m.g_values.size(); ++gi) {
    std::size_t best = 0;
    double best_e = -1.0;
    for (std::size_t ri = 0; ri < nr; ++ri) {
      const double e = m.cell(gi, ri);
      if (!m.oscillating[gi * nr + ri] && e > best_e) {
        best_e = e;
        best = ri;
      }
    }
    m.ridge_ratio[gi] = m.ratio_values[best];
    m.ridge_e[gi] = best_e;
  }
  return m;
}

MismatchPoint mismatch_reflection(double c_g, double c_h, const TwoModeParams& p_base) {
  if (c_g < 0.0 || c_h < 0.0) {
    throw Error(ErrorKind::invalid_params, "cooperativities must be non-negative");
  }
  const double km = p_base.kappa_m;
  const double kl = p_base.kappa_l;
  const double g = 0.5 * std::sqrt(c_g * km * kl);
  const double h = 0.5 * std::sqrt(c_h * km * kl);

  MismatchPoint mp;
  mp.c_g = c_g;
  mp.c_h = c_h;
  mp.epsilon = (g + h > 0.0) ? 2.0 * (g - h) / (g + h) : 0.0;
  const double beta0 = g * g - h * h + 0.25 * km * kl;
  mp.oscillating = beta0 <= 0.0;
  const double chi0 = 1.0 - 0.5 * km * kl / beta0;
  mp.refl_sq = chi0 * chi0;
  return mp;
}

MismatchFormulas mismatch_formulas(double c, double epsilon) {
  MismatchFormulas f;
  f.chi_mm0_approx = 1.0 - 2.0 / (2.0 * c * epsilon + 1.0);
  f.alpha0_ratio_approx = 1.0 / (0.25 * c * epsilon * epsilon + 1.0);
  return f;
}

MismatchSweep mismatch_enhancement_sweep(double h_fixed, double kappa_m,
                                         std::span<const double> g_over_h,
                                         const FourModeParams* extended,
                                         double rel_tol) {
  if (g_over_h.empty()) {
    throw Error(ErrorKind::invalid_params, "ratio grid must be non-empty");
  }
  MismatchSweep sw;
  sw.g_over_h.assign(g_over_h.begin(), g_over_h.end());
  sw.e.assign(sw.g_over_h.size(), std::numeric_limits<double>::quiet_NaN());
  sw.oscillating.assign(sw.g_over_h.size(), 0);

  for (std::size_t i = 0; i < sw.g_over_h.size(); ++i) {
    const double r = sw.g_over_h[i];
    if (r < 0.0) {
      throw Error(ErrorKind::invalid_params, "g/h ratios must be non-negative");
    }
    if (extended == nullptr) {
      const TwoModeParams p(1.0, kappa_m, r * h_fixed, h_fixed);
      const double beta0 = p.g * p.g - p.h * p.h + 0.25 * p.kappa_m * p.kappa_l;
      if (beta0 <= divergence_threshold(p)) {
        sw.oscillating[i] = 1;
        continue;
      }
      sw.e[i] = enhancement(p, rel_tol).value;
    } else {
      FourModeParams p = *extended;
      p.kappa_m = kappa_m;
      p.h_ab = h_fixed;
      // The ratio models a drive-amplitude mismatch, which rescales every
      // difference-frequency rate together.
      p.g_ab = r * p.h_ab;
      p.g_cb = r * p.h_cb;
      p.g_db = r * p.h_db;
      if (four_mode_oscillating(p)) {
        sw.oscillating[i] = 1;
        continue;
      }
      try {
        sw.e[i] = enhancement4(p, rel_tol).value;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::parametric_divergence) {
          sw.oscillating[i] = 1;
          continue;
        }
        throw;
      }
    }
  }

  sw.argmax_index = -1;
  double best = -1.0;
  for (std::size_t i = 0; i < sw.e.size(); ++i) {
    if (!sw.oscillating[i] && std::isfinite(sw.e[i]) && sw.e[i] > best) {
      best = sw.e[i];
      sw.argmax_index = static_cast<int>(i);
    }
  }
  return sw;
}

}  // namespace ceasefire
