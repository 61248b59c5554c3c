#include "ceasefire/two_mode.hpp"

#include <cmath>

#include "ceasefire/linalg.hpp"

namespace ceasefire {

TwoModeParams::TwoModeParams(double kappa_l_, double kappa_m_, double g_, double h_,
                             double kappa_a_, double n_a_, double n_t_, double phi_)
    : kappa_l(kappa_l_),
      kappa_m(kappa_m_),
      kappa_a(kappa_a_ < 0.0 ? 1e-6 * kappa_l_ : kappa_a_),
      g(g_),
      h(h_),
      phi(wrap_angle(phi_)),
      n_t(n_t_),
      n_a(n_a_) {
  if (!(kappa_l > 0.0)) {
    throw Error(ErrorKind::invalid_params, "kappa_l must be positive");
  }
  if (kappa_m < 0.0 || g < 0.0 || h < 0.0 || kappa_a < 0.0) {
    throw Error(ErrorKind::invalid_params, "rates must be non-negative");
  }
  if (!(kappa_a < 1e-3 * kappa_l)) {
    throw Error(ErrorKind::invalid_params,
                "kappa_a must be << kappa_l (kappa_a < 1e-3 * kappa_l)");
  }
  if (n_t < 0.0 || n_a < 0.0) {
    throw Error(ErrorKind::invalid_params, "occupancies must be non-negative");
  }
}

double divergence_threshold(const TwoModeParams& p) {
  return 1e-12 * p.kappa_l * p.kappa_l;
}

cplx beta(double omega, const TwoModeParams& p) {
  const cplx dm(0.5 * p.kappa_m, omega);
  const cplx dl(0.5 * p.kappa_l, omega);
  return p.g * p.g - p.h * p.h + dm * dl;
}

namespace {

cplx checked_beta(double omega, const TwoModeParams& p) {
  const cplx b = beta(omega, p);
  if (std::abs(b) < divergence_threshold(p)) {
    throw Error(ErrorKind::parametric_divergence,
                "parametric divergence: |beta(omega)| below threshold");
  }
  return b;
}

}  // namespace

Susceptibilities susceptibilities(double omega, const TwoModeParams& p) {
  const cplx b = checked_beta(omega, p);
  Susceptibilities s;
  s.chi_ma = (p.g + p.h) * std::sqrt(p.kappa_m * p.kappa_a) / b;
  s.chi_ml = std::sqrt(p.kappa_l / p.kappa_a) * s.chi_ma;
  s.chi_mm = 1.0 - p.kappa_m * cplx(0.5 * p.kappa_l, omega) / b;
  return s;
}

cplx chi_standard(double omega, double kappa_c, const TwoModeParams& p) {
  if (!(kappa_c > 0.0)) {
    throw Error(ErrorKind::invalid_params, "kappa_c must be positive");
  }
  return std::sqrt(kappa_c * p.kappa_a) / cplx(0.5 * (kappa_c + p.kappa_l), omega);
}

namespace {

// Upper three rows (output fields xi_out,a / xi_out,l / xi_out,m) of the
// scattering matrix at detuning w, from the closed forms.
std::array<cplx, 18> upper_rows(double w, const TwoModeParams& p, const cplx& b) {
  const cplx dm(0.5 * p.kappa_m, w);
  const cplx dl(0.5 * p.kappa_l, w);
  const cplx eiphi = std::polar(1.0, p.phi);
  const double ska = std::sqrt(p.kappa_a);
  const double skl = std::sqrt(p.kappa_l);
  const double skm = std::sqrt(p.kappa_m);

  const cplx zeta_aa = 1.0 - p.kappa_a * dm / b;
  const cplx zeta_ll = 1.0 - p.kappa_l * dm / b;
  const cplx zeta_mm = 1.0 - p.kappa_m * dl / b;
  const cplx zeta_la = -ska * skl * dm / b;
  const cplx zeta_ma = kI * p.g * ska * skm / b;
  const cplx zeta_ml = kI * p.g * skl * skm / b;
  const cplx zeta_ma_dag = kI * p.h * eiphi * ska * skm / b;
  const cplx zeta_ml_dag = kI * p.h * eiphi * skl * skm / b;

  return {
      zeta_aa, zeta_la, zeta_ma, zeta_ma_dag, cplx{}, cplx{},      // row a
      zeta_la, zeta_ll, zeta_ml, zeta_ml_dag, cplx{}, cplx{},      // row l
      zeta_ma, zeta_ml, zeta_mm, cplx{}, zeta_ml_dag, zeta_ma_dag  // row m
  };
}

}  // namespace

SusceptibilityMatrix zeta_matrix(double omega, const TwoModeParams& p) {
  const cplx bp = checked_beta(omega, p);
  const cplx bm = checked_beta(-omega, p);
  const auto up = upper_rows(omega, p, bp);
  const auto um = upper_rows(-omega, p, bm);

  SusceptibilityMatrix z;
  z.omega = omega;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 6; ++j) {
      z.at(i, j) = up[static_cast<std::size_t>(6 * i + j)];
      // Conjugated output fields: mirror-conjugate of the row at -omega.
      z.at(5 - i, 5 - j) = std::conj(um[static_cast<std::size_t>(6 * i + j)]);
    }
  }
  return z;
}

SusceptibilityMatrix zeta_oracle(double omega, const TwoModeParams& p) {
  // Unknowns: X0 = A(w + wD), X1 = B(w), X2 = B+(-w), X3 = A+(-w + wD).
  const cplx dl(0.5 * p.kappa_l, omega);
  const cplx dm(0.5 * p.kappa_m, omega);
  const cplx eiphi = std::polar(1.0, p.phi);
  const cplx ig = kI * p.g;
  const cplx ihp = kI * p.h * eiphi;
  const cplx ihm = kI * p.h * std::conj(eiphi);
  const double ska = std::sqrt(p.kappa_a);
  const double skl = std::sqrt(p.kappa_l);
  const double skm = std::sqrt(p.kappa_m);

  const std::array<cplx, 16> sys{
      dl,   ig,   ihp,  0.0,   //
      ig,   dm,   0.0,  ihp,   //
      -ihm, 0.0,  dm,   -ig,   //
      0.0,  -ihm, -ig,  dl};

  // Input coupling: rhs column for each unit input field.
  const std::array<std::array<cplx, 4>, 6> rhs_cols{{
      {ska, 0.0, 0.0, 0.0},   // xi_a
      {skl, 0.0, 0.0, 0.0},   // xi_l
      {0.0, skm, 0.0, 0.0},   // xi_m
      {0.0, 0.0, skm, 0.0},   // xi_m+
      {0.0, 0.0, 0.0, skl},   // xi_l+
      {0.0, 0.0, 0.0, ska},   // xi_a+
  }};

  // Output projection: v_i = u_i - sqrt(kappa) * X_k.
  const std::array<std::pair<int, double>, 6> out_map{{
      {0, ska}, {0, skl}, {1, skm}, {2, skm}, {3, skl}, {3, ska}}};

  SusceptibilityMatrix z;
  z.omega = omega;
  for (int j = 0; j < 6; ++j) {
    std::array<cplx, 16> a = sys;
    std::array<cplx, 4> x = rhs_cols[static_cast<std::size_t>(j)];
    linalg::solve_inplace<4>(a, x);
    for (int i = 0; i < 6; ++i) {
      const auto [xi, w] = out_map[static_cast<std::size_t>(i)];
      z.at(i, j) = (i == j ? 1.0 : 0.0) - w * x[static_cast<std::size_t>(xi)];
    }
  }
  return z;
}

OutputPsd output_psd(double omega, QuadratureAngle theta, const TwoModeParams& p) {
  const cplx b = checked_beta(omega, p);
  const double b2 = std::norm(b);
  const double c = std::cos(2.0 * theta.theta - p.phi);
  OutputPsd out;
  out.s_axion = p.n_a * p.kappa_a * p.kappa_m *
                (p.g * p.g + p.h * p.h + 2.0 * p.g * p.h * c) / b2;
  out.s_noise = (p.n_t + 0.5) *
                (1.0 + 2.0 * p.kappa_l * p.kappa_m * (p.h * p.h + p.g * p.h * c) / b2);
  return out;
}

kernels::TwoModeAlphaParams cf_kernel_params(const TwoModeParams& p) {
  kernels::TwoModeAlphaParams kp;
  kp.p = p.g * p.g - p.h * p.h + 0.25 * p.kappa_m * p.kappa_l;
  const double r = 0.5 * (p.kappa_m + p.kappa_l);
  kp.r2 = r * r;
  kp.a1 = p.n_a * p.kappa_a * p.kappa_m * (p.g + p.h) * (p.g + p.h);
  kp.w_beta = p.n_t + 1.0;
  kp.a2 = (p.n_t + 0.5) * 2.0 * p.kappa_l * p.kappa_m * p.h * (p.g + p.h);
  return kp;
}

kernels::StdAlphaParams std_kernel_params(double kappa_c, const TwoModeParams& p) {
  kernels::StdAlphaParams kp;
  kp.b = p.n_a * p.kappa_a * kappa_c / (p.n_t + 0.5);
  const double s = 0.5 * (kappa_c + p.kappa_l);
  kp.s2 = s * s;
  return kp;
}

double alpha_cf(double omega, const TwoModeParams& p) {
  const QuadratureAngle amp(0.5 * p.phi);
  const OutputPsd s = output_psd(omega, amp, p);
  return s.s_axion / (s.s_noise + 0.5);
}

double alpha_standard(double omega, double kappa_c, const TwoModeParams& p) {
  return p.n_a * std::norm(chi_standard(omega, kappa_c, p)) / (p.n_t + 0.5);
}

VisibilityCurve visibility(std::span<const double> omega_grid,
                           const TwoModeParams& p, VisibilityMode mode) {
  if (omega_grid.empty()) {
    throw Error(ErrorKind::invalid_params, "visibility grid must be non-empty");
  }
  for (std::size_t i = 1; i < omega_grid.size(); ++i) {
    if (!(omega_grid[i] > omega_grid[i - 1])) {
      throw Error(ErrorKind::invalid_params, "visibility grid must be strictly increasing");
    }
  }
  VisibilityCurve curve{{omega_grid.begin(), omega_grid.end()}, {}, p, mode};
  curve.alphas.resize(omega_grid.size());
  if (mode.kind == VisibilityMode::Kind::ceasefire) {
    // The closed form is a smooth function of omega; probe for divergence at
    // the band center and edges before the batch evaluation.
    checked_beta(0.0, p);
    const auto kp = cf_kernel_params(p);
    kernels::alpha_cf_sq(curve.omegas.data(), curve.alphas.data(),
                         curve.alphas.size(), kp);
    for (double& a : curve.alphas) a = std::sqrt(a);
  } else {
    if (!(mode.kappa_c > 0.0)) {
      throw Error(ErrorKind::invalid_params, "standard-mode kappa_c must be positive");
    }
    const auto kp = std_kernel_params(mode.kappa_c, p);
    kernels::alpha_std_sq(curve.omegas.data(), curve.alphas.data(),
                          curve.alphas.size(), kp);
    for (double& a : curve.alphas) a = std::sqrt(a);
  }
  for (double a : curve.alphas) {
    if (!std::isfinite(a) || a < 0.0) {
      throw Error(ErrorKind::parametric_divergence,
                  "visibility curve contains non-finite values");
    }
  }
  return curve;
}

}  // namespace ceasefire
